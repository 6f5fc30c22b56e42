from enum import Enum


class Provenance(str, Enum):
    """How a reported number was obtained."""

    EXACT = "exact"
    CERTIFIED = "certified-bound"
    HEURISTIC = "heuristic"
    MONTE_CARLO = "monte-carlo-ci"
    NONE = "none"

    def __str__(self):
        return self.value

    @property
    def certified(self) -> bool:
        return self in (Provenance.EXACT, Provenance.CERTIFIED)
