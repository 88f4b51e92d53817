"""Fair toll sharing for highways with vehicle classes and a priori unions."""
from .model import (
    CoalitionStructure,
    HighwayProblem,
    InvalidProblemError,
    classify_alliance,
    classify_sections,
    coalition_cost,
    merge_unions,
    quotient,
    restrict,
)
from .values import VALUE_NAMES, AggregatedProblem, Profile, allocate, compute

__all__ = [
    "AggregatedProblem",
    "CoalitionStructure",
    "HighwayProblem",
    "InvalidProblemError",
    "Profile",
    "VALUE_NAMES",
    "allocate",
    "classify_alliance",
    "classify_sections",
    "coalition_cost",
    "compute",
    "merge_unions",
    "quotient",
    "restrict",
]
__version__ = "0.1.0"
