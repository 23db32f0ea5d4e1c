"""Test cases for the option_values module."""
import enum

import pytest

from aperiodic_spectra import option_values
from aperiodic_spectra.option_values import (
    CocycleVariant,
    EstimateMethod,
    SubshiftKind,
    Verdict,
)


@pytest.mark.parametrize(
    "member, value",
    (
        (SubshiftKind.SUBSTITUTION, "substitution"),
        (SubshiftKind.STURMIAN, "sturmian"),
        (CocycleVariant.SL2, "sl2"),
        (EstimateMethod.GAMMA_ZERO_SET, "gamma_zero_set"),
        (Verdict.LIKELY_RESOLVENT, "likely_resolvent"),
    ),
)
def test_lowercase_values(member: option_values.LowerNameEnum, value: str) -> None:
    """It uses the lowercase member name as the value."""
    assert member.value == value
    assert member == value


def test_lookup_by_value() -> None:
    """It finds members from configuration strings."""
    assert SubshiftKind("periodic") is SubshiftKind.PERIODIC


def test_unknown_value() -> None:
    """It rejects values that name no member."""
    with pytest.raises(ValueError):
        SubshiftKind("fibonacci")


def test_generated_values() -> None:
    """It generates values for new enums."""

    class Colour(str, option_values.LowerNameEnum):
        """A throwaway enum."""

        RED = enum.auto()

    assert Colour.RED.value == "red"
