"""Package-wide test fixtures."""
import json
from pathlib import Path
from typing import Any, Callable, Dict

import numpy as np
import pytest

from aperiodic_spectra import jacobi, subshift
from aperiodic_spectra.jacobi import CoefficientWindow, SamplingFunctions
from aperiodic_spectra.subshift import Periodic, Substitution

#: Sites every shared coefficient fixture covers.
COEFFICIENT_LO = -1_200
COEFFICIENT_HI = 5_200


@pytest.fixture
def rng() -> np.random.Generator:
    """A seeded random generator."""
    return np.random.default_rng(20_221)


@pytest.fixture
def fibonacci() -> Substitution:
    """The Fibonacci substitution seeded with ``b.a``."""
    return Substitution.from_labels({"a": "ab", "b": "a"}, seed=("b", "a"))


@pytest.fixture
def alternating() -> Periodic:
    """The periodic word ``abab...``."""
    return Periodic.from_labels("ab")


@pytest.fixture
def free_coefficients() -> CoefficientWindow:
    """The free Laplacian, ``a = 1`` and ``b = 0``."""
    return CoefficientWindow.periodic([1.0], [0.0], COEFFICIENT_LO, COEFFICIENT_HI)


@pytest.fixture
def period_two_coefficients() -> CoefficientWindow:
    """Off-diagonal period two, ``a = (1, 2)`` and ``b = 0``."""
    return CoefficientWindow.periodic(
        [1.0, 2.0], [0.0, 0.0], COEFFICIENT_LO, COEFFICIENT_HI
    )


@pytest.fixture
def fibonacci_coefficients(fibonacci: Substitution) -> CoefficientWindow:
    """Off-diagonal Fibonacci, ``a`` is 1 on ``a`` and 2 on ``b``."""
    sampling = SamplingFunctions.from_symbol_values(
        fibonacci.alphabet, p={"a": 1.0, "b": 2.0}, q=0.0
    )
    orbit = subshift.build_orbit(fibonacci, max(-COEFFICIENT_LO, COEFFICIENT_HI))
    return jacobi.assemble_coefficients(
        orbit, sampling, COEFFICIENT_LO, COEFFICIENT_HI
    )


@pytest.fixture
def random_coefficients(
    rng: np.random.Generator,
) -> Callable[[int], CoefficientWindow]:
    """Return a function drawing coefficients on ``-size..size``."""

    def _random_coefficients(size: int) -> CoefficientWindow:
        """Draw ``a`` in ``[0.5, 2]`` and ``b`` in ``[-1, 1]``."""
        count = 2 * size + 1
        return CoefficientWindow(
            -size,
            a=rng.uniform(0.5, 2.0, count),
            b=rng.uniform(-1.0, 1.0, count),
        )

    return _random_coefficients


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[Dict[str, Any]], Path]:
    """Return a function writing an experiment configuration file."""

    def _write_config(config: Dict[str, Any]) -> Path:
        """Dump ``config`` as JSON next to the test's output."""
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config), encoding="utf-8")
        return path

    return _write_config
