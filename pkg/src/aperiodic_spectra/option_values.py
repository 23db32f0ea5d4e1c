"""Enums representing option values."""
import enum
from typing import Any, List


class LowerNameEnum(enum.Enum):
    """Enum base class that sets value to lowercase version of name."""

    def _generate_next_value_(  # type: ignore[override,misc]
        name: str,  # noqa: B902,N805
        start: int,
        count: int,
        last_values: List[Any],
    ) -> str:
        """Set member's values as their lowercase name."""
        return name.lower()


@enum.unique
class SubshiftKind(str, LowerNameEnum):
    """The subshift generators."""

    SUBSTITUTION = enum.auto()
    STURMIAN = enum.auto()
    PERIODIC = enum.auto()


@enum.unique
class CocycleVariant(str, LowerNameEnum):
    """Which transfer matrix a cocycle is built from."""

    PLAIN = enum.auto()
    SL2 = enum.auto()


@enum.unique
class EstimateMethod(str, LowerNameEnum):
    """How a spectrum estimate was obtained."""

    GAMMA_ZERO_SET = enum.auto()
    FINITE_SECTION = enum.auto()
    INTERSECTION = enum.auto()


@enum.unique
class Verdict(str, LowerNameEnum):
    """Classification of a single energy."""

    LIKELY_SPECTRUM_GAMMA_ZERO = enum.auto()
    LIKELY_RESOLVENT = enum.auto()
    UNIFORMITY_SUSPECT = enum.auto()
