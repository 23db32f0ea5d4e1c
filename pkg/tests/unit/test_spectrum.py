"""Test cases for the spectrum module."""
import math
from typing import Sequence, Tuple

import numpy as np
import pytest

from aperiodic_spectra import errors, jacobi, spectrum, subshift
from aperiodic_spectra.intervals import IntervalUnion
from aperiodic_spectra.jacobi import CoefficientWindow, SamplingFunctions
from aperiodic_spectra.option_values import EstimateMethod, Verdict
from aperiodic_spectra.subshift import Substitution
from aperiodic_spectra.spectrum import (
    EnergyGrid,
    FiniteSectionSpectrum,
    LyapunovCurve,
    RefinementOrder,
    SpectrumEstimate,
)

FREE_BAND = IntervalUnion.from_intervals([(-2.0, 2.0)])


@pytest.fixture
def free_curve(free_coefficients: CoefficientWindow) -> LyapunovCurve:
    """The free Lyapunov curve on ``[-3, 3]``."""
    grid = EnergyGrid.uniform(-3.0, 3.0, 0.01)
    return spectrum.gamma_curve(free_coefficients, grid, 1_000)


def zero_set_and_sections(
    coeffs: CoefficientWindow, size: int, base_offsets: Sequence[int] = (0,)
) -> Tuple[LyapunovCurve, SpectrumEstimate, FiniteSectionSpectrum]:
    """The zero set at step ``0.01`` and ``n = 1000`` next to one section."""
    grid = EnergyGrid.uniform(-4.0, 4.0, 0.01)
    curve = spectrum.gamma_curve(coeffs, grid, 1_000, base_offsets)
    sections = spectrum.finite_section_spectrum(coeffs, (size,))
    return curve, spectrum.zero_set_estimate(curve), sections


def assert_zero_set_meets_sections(
    estimate: SpectrumEstimate, sections: FiniteSectionSpectrum
) -> None:
    """Every zero-set component touches the cluster estimate."""
    assert estimate.intervals
    for component in estimate.intervals:
        single = IntervalUnion.from_intervals([component])
        assert single.intersects(sections.estimate.intervals), component


def count_resolvent_eigenvalues(
    curve: LyapunovCurve, sections: FiniteSectionSpectrum
) -> int:
    """Bulk eigenvalues nearest an energy with ``gamma >= 0.3`` and a flat spread."""
    eigenvalues = sections.bulk_eigenvalues()
    points = curve.grid.points
    nearest = np.abs(points[np.newaxis, :] - eigenvalues[:, np.newaxis]).argmin(axis=1)
    resolvent = (curve.gamma >= 0.3) & (curve.spread <= 0.02)
    return int(np.count_nonzero(resolvent[nearest]))


def test_uniform_grid() -> None:
    """It spaces the energies evenly from ``lo`` to ``hi``."""
    grid = EnergyGrid.uniform(-1.0, 1.0, 0.5)
    assert grid.points.tolist() == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert grid.lo == -1.0
    assert grid.hi == 1.0
    assert grid.spacing == pytest.approx(0.5)


def test_uneven_step() -> None:
    """It never spaces the energies wider than the step."""
    grid = EnergyGrid.uniform(0.0, 1.0, 0.3)
    assert len(grid) == 5
    assert grid.spacing <= 0.3


def test_single_energy_grid() -> None:
    """It collapses to one energy when ``lo == hi``."""
    grid = EnergyGrid.uniform(0.7, 0.7, 0.1)
    assert grid.points.tolist() == [0.7]
    assert grid.spacing == 0.0


@pytest.mark.parametrize("lo, hi, step", ((1.0, 0.0, 0.1), (0.0, 1.0, 0.0)))
def test_invalid_grid(lo: float, hi: float, step: float) -> None:
    """It rejects reversed bounds and nonpositive steps."""
    with pytest.raises(errors.PreconditionError):
        EnergyGrid.uniform(lo, hi, step)


def test_grid_must_increase() -> None:
    """It rejects repeated energies."""
    with pytest.raises(errors.PreconditionError):
        EnergyGrid(np.array([0.0, 0.0]))


def test_empty_grid() -> None:
    """It needs at least one energy."""
    with pytest.raises(errors.PreconditionError):
        EnergyGrid(np.array([]))


def test_refined_grid() -> None:
    """It halves the spacing and counts the refinement."""
    grid = EnergyGrid.uniform(0.0, 1.0, 0.5).refined()
    assert grid.points.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert grid.level == 1


def test_auto_grid() -> None:
    """It covers ``[-3K - 0.5, 3K + 0.5]``."""
    grid = EnergyGrid.auto(1.0, 0.5)
    assert grid.lo == -3.5
    assert grid.hi == 3.5
    assert len(grid) == 15


def test_curve_shape() -> None:
    """It needs one value per grid energy."""
    grid = EnergyGrid.uniform(0.0, 1.0, 0.5)
    with pytest.raises(errors.PreconditionError):
        LyapunovCurve(grid, gamma=np.zeros(2), spread=np.zeros(3), n_steps=100)


def test_default_threshold() -> None:
    """It never goes below the threshold floor and follows ``log(n)/n``."""
    grid = EnergyGrid.uniform(0.0, 1.0, 0.5)
    curve = LyapunovCurve(
        grid, gamma=np.zeros(3), spread=np.array([0.0, 0.1, 0.0]), n_steps=1_000
    )
    threshold = curve.default_threshold()
    bias = math.log(1_000) / 1_000
    np.testing.assert_allclose(threshold, [3 * bias, 3 * (0.1 + bias), 3 * bias])
    long_curve = LyapunovCurve(grid, np.zeros(3), np.zeros(3), n_steps=10**6)
    np.testing.assert_array_equal(long_curve.default_threshold(), np.full(3, 0.01))


def test_free_curve(free_curve: LyapunovCurve) -> None:
    """It vanishes on the free band and grows outside."""
    energies = np.abs(free_curve.grid.points)
    assert np.all(free_curve.gamma[energies <= 1.9] <= 0.02)
    assert np.all(free_curve.gamma[energies >= 2.5] >= 0.3)
    np.testing.assert_array_equal(free_curve.spread, np.zeros(len(energies)))


def test_free_zero_set(free_curve: LyapunovCurve) -> None:
    """It recovers the band ``[-2, 2]`` up to half a grid step."""
    estimate = spectrum.zero_set_estimate(free_curve)
    assert estimate.method is EstimateMethod.GAMMA_ZERO_SET
    assert len(estimate.intervals) == 1
    left, right = estimate.intervals.intervals[0]
    assert left == pytest.approx(-2.005, abs=1e-3)
    assert right == pytest.approx(2.005, abs=1e-3)
    assert estimate.intervals.hausdorff_distance(FREE_BAND) <= 0.01


def test_period_two_zero_set(period_two_coefficients: CoefficientWindow) -> None:
    """It finds both period-two bands and the gap between them."""
    grid = EnergyGrid.uniform(-4.0, 4.0, 0.01)
    curve = spectrum.gamma_curve(period_two_coefficients, grid, 1_000)
    estimate = spectrum.zero_set_estimate(curve)
    assert len(estimate.intervals) == 2
    assert estimate.measure() == pytest.approx(4.02, abs=0.02)
    assert not estimate.intervals.contains(0.0)


def test_scalar_threshold() -> None:
    """It pads each run of zeros by half the neighboring spacing."""
    grid = EnergyGrid.uniform(0.0, 1.0, 0.25)
    curve = LyapunovCurve(
        grid,
        gamma=np.array([1.0, 0.0, 0.0, 1.0, 1.0]),
        spread=np.zeros(5),
        n_steps=100,
    )
    estimate = spectrum.zero_set_estimate(curve, threshold=0.5)
    assert estimate.intervals.intervals == ((0.125, 0.625),)


def test_empty_zero_set() -> None:
    """It returns an empty estimate when the exponent never vanishes."""
    grid = EnergyGrid.uniform(0.0, 1.0, 0.25)
    curve = LyapunovCurve(grid, gamma=np.ones(5), spread=np.zeros(5), n_steps=100)
    assert not spectrum.zero_set_estimate(curve).intervals


def test_threads_do_not_change_the_curve(
    fibonacci_coefficients: CoefficientWindow,
) -> None:
    """It returns the same curve however the grid is split."""
    grid = EnergyGrid.uniform(-3.0, 3.0, 0.05)
    single = spectrum.gamma_curve(
        fibonacci_coefficients, grid, 500, base_offsets=(0, 100), threads=1
    )
    split = spectrum.gamma_curve(
        fibonacci_coefficients, grid, 500, base_offsets=(0, 100), threads=3
    )
    np.testing.assert_array_equal(single.gamma, split.gamma)
    np.testing.assert_array_equal(single.spread, split.spread)


def test_threads_must_be_positive(free_coefficients: CoefficientWindow) -> None:
    """It needs at least one thread."""
    with pytest.raises(errors.PreconditionError):
        spectrum.gamma_curve(
            free_coefficients, EnergyGrid.uniform(0.0, 1.0, 0.5), 100, threads=0
        )


def test_free_finite_sections(free_coefficients: CoefficientWindow) -> None:
    """It fills the free band with clustered eigenvalues."""
    sections = spectrum.finite_section_spectrum(free_coefficients, (100, 400))
    assert sorted(sections.eigenvalues) == [100, 400]
    assert len(sections.eigenvalues[400]) == 400
    assert sections.edge_states == ()
    assert len(sections.estimate.intervals) == 1
    assert sections.estimate.intervals.hausdorff_distance(FREE_BAND) <= 0.05
    assert sections.estimate.method is EstimateMethod.FINITE_SECTION


def test_period_two_finite_section(
    period_two_coefficients: CoefficientWindow,
) -> None:
    """It leaves the period-two gap empty."""
    sections = spectrum.finite_section_spectrum(period_two_coefficients, (400,))
    eigenvalues = sections.eigenvalues[400]
    assert not np.any(np.abs(eigenvalues) < 0.9)
    assert len(sections.estimate.intervals) == 2
    assert sections.edge_states == ()


def test_edge_state_screening(period_two_coefficients: CoefficientWindow) -> None:
    """It drops the zero mode bound to the weak end of an odd section."""
    sections = spectrum.finite_section_spectrum(period_two_coefficients, (401,))
    assert len(sections.edge_states) == 1
    assert sections.edge_states[0] == pytest.approx(0.0, abs=1e-8)
    assert len(sections.bulk_eigenvalues()) == 400
    assert not sections.estimate.intervals.contains(0.0)


def test_section_sizes_must_increase(free_coefficients: CoefficientWindow) -> None:
    """It rejects sizes out of order."""
    with pytest.raises(errors.PreconditionError):
        spectrum.finite_section_spectrum(free_coefficients, (400, 100))


def test_section_sizes_must_be_positive(free_coefficients: CoefficientWindow) -> None:
    """It rejects an empty section."""
    with pytest.raises(errors.PreconditionError):
        spectrum.finite_section_spectrum(free_coefficients, (0,))


def test_compare_free_estimates(
    free_coefficients: CoefficientWindow, free_curve: LyapunovCurve
) -> None:
    """It finds both free estimates close together."""
    sections = spectrum.finite_section_spectrum(free_coefficients, (100, 400))
    comparison = spectrum.compare_estimates(
        spectrum.zero_set_estimate(free_curve), sections.estimate
    )
    assert comparison.hausdorff_distance <= 0.05
    assert comparison.symmetric_difference_measure <= 0.1
    assert comparison.intersection.method is EstimateMethod.INTERSECTION
    assert comparison.intersection.measure() == pytest.approx(4.0, abs=0.05)


def test_compare_empty_estimate() -> None:
    """It needs two nonempty estimates."""
    empty = SpectrumEstimate(IntervalUnion(), EstimateMethod.GAMMA_ZERO_SET)
    other = SpectrumEstimate(FREE_BAND, EstimateMethod.FINITE_SECTION)
    with pytest.raises(errors.PreconditionError):
        spectrum.compare_estimates(empty, other)


def test_refine_estimates() -> None:
    """It intersects every estimate with the coarser ones."""
    coarse = SpectrumEstimate(
        IntervalUnion.from_intervals([(0, 2)]), EstimateMethod.GAMMA_ZERO_SET
    )
    fine = SpectrumEstimate(
        IntervalUnion.from_intervals([(1, 3)]), EstimateMethod.GAMMA_ZERO_SET
    )
    refined = spectrum.refine_estimates([coarse, fine])
    assert refined[0] == coarse
    assert refined[1].intervals.intervals == ((1.0, 2.0),)
    assert refined[1].method is EstimateMethod.INTERSECTION


def test_measure_trend(period_two_coefficients: CoefficientWindow) -> None:
    """It never lets the refined measure grow."""
    orders = (RefinementOrder(0.05, 200), RefinementOrder(0.02, 500))
    trend, curves, refined = spectrum.measure_trend(
        period_two_coefficients, orders, lo=-4.0, hi=4.0
    )
    assert [point.order for point in trend] == [0, 1]
    assert trend[1].measure <= trend[0].measure
    assert [curve.n_steps for curve in curves] == [200, 500]
    assert curves[1].grid.level == 1
    assert len(refined) == 2
    assert trend[1].measure == pytest.approx(4.0, abs=0.1)


@pytest.mark.slow
def test_fibonacci_measure_trend(fibonacci: Substitution) -> None:
    """It shrinks the Fibonacci zero set as the resolution grows."""
    sampling = SamplingFunctions.from_symbol_values(
        fibonacci.alphabet, p={"a": 1.0, "b": 2.0}, q=0.0
    )
    orbit = subshift.build_orbit(fibonacci, 16_100)
    coeffs = jacobi.assemble_coefficients(orbit, sampling, 0, 16_100)
    orders = (
        RefinementOrder(0.01, 1_000),
        RefinementOrder(0.005, 4_000),
        RefinementOrder(0.0025, 16_000),
    )
    trend, curves, refined = spectrum.measure_trend(coeffs, orders, lo=-4.0, hi=4.0)
    measures = [point.measure for point in trend]
    assert all(later < earlier for earlier, later in zip(measures, measures[1:]))
    assert measures[-1] <= 0.7 * measures[0]
    report = spectrum.cantor_diagnostic(refined[-1], curves[-1], isolation_eps=0.05)
    assert report.isolated_points == ()


def test_cantor_diagnostic() -> None:
    """It flags a lone zero and measures the widest run of zeros."""
    grid = EnergyGrid.uniform(0.0, 1.0, 0.1)
    gamma = np.ones(11)
    gamma[[0, 1, 2, 3, 8]] = 0.0
    curve = LyapunovCurve(grid, gamma=gamma, spread=np.zeros(11), n_steps=1_000)
    estimate = spectrum.zero_set_estimate(curve, threshold=0.5)
    report = spectrum.cantor_diagnostic(estimate, curve, isolation_eps=0.1)
    assert report.isolated_points == pytest.approx((0.8,))
    assert report.max_contained_interval == pytest.approx(0.3)


def test_cantor_diagnostic_empty() -> None:
    """It reports nothing for an empty estimate."""
    grid = EnergyGrid.uniform(0.0, 1.0, 0.1)
    curve = LyapunovCurve(grid, np.ones(11), np.zeros(11), n_steps=1_000)
    estimate = SpectrumEstimate(IntervalUnion(), EstimateMethod.GAMMA_ZERO_SET)
    report = spectrum.cantor_diagnostic(estimate, curve, isolation_eps=0.1)
    assert report == spectrum.CantorReport((), 0.0)


@pytest.mark.parametrize(
    "energy, verdict",
    (
        (0.0, Verdict.LIKELY_RESOLVENT),
        (2.0, Verdict.LIKELY_SPECTRUM_GAMMA_ZERO),
        (3.05, Verdict.UNIFORMITY_SUSPECT),
    ),
)
def test_classify_energy(
    period_two_coefficients: CoefficientWindow, energy: float, verdict: Verdict
) -> None:
    """It places energies of the period-two operator."""
    classification = spectrum.classify_energy(
        period_two_coefficients, energy, 1_000, sections=(200,)
    )
    assert classification.verdict is verdict
    assert classification.energy == energy


def test_classify_gap_center(period_two_coefficients: CoefficientWindow) -> None:
    """It reports the exponent and the distance to the section spectrum."""
    classification = spectrum.classify_energy(
        period_two_coefficients, 0.0, 1_000, sections=(200,)
    )
    assert classification.gamma_hat == pytest.approx(math.log(2.0) / 2, abs=1e-3)
    assert classification.spread == 0.0
    assert classification.section_distance == pytest.approx(1.0, abs=0.01)


def test_free_zero_set_meets_sections(free_coefficients: CoefficientWindow) -> None:
    """It keeps the free zero set on the section clusters."""
    _, estimate, sections = zero_set_and_sections(free_coefficients, 400)
    assert_zero_set_meets_sections(estimate, sections)


def test_period_two_zero_set_meets_sections(
    period_two_coefficients: CoefficientWindow,
) -> None:
    """It keeps both period-two bands on the section clusters."""
    _, estimate, sections = zero_set_and_sections(period_two_coefficients, 400)
    assert_zero_set_meets_sections(estimate, sections)


def test_fibonacci_zero_set_meets_sections(
    fibonacci_coefficients: CoefficientWindow,
) -> None:
    """It keeps every Fibonacci zero-set component on the section clusters."""
    _, estimate, sections = zero_set_and_sections(fibonacci_coefficients, 1_000)
    assert_zero_set_meets_sections(estimate, sections)


@pytest.mark.parametrize("size", (400, 401))
def test_no_eigenvalues_where_gamma_is_positive(
    period_two_coefficients: CoefficientWindow, size: int
) -> None:
    """It finds at most the edge states where the exponent is uniformly positive."""
    curve, _, sections = zero_set_and_sections(period_two_coefficients, size)
    assert count_resolvent_eigenvalues(curve, sections) <= 2


def test_no_fibonacci_eigenvalues_where_gamma_is_positive(
    fibonacci_coefficients: CoefficientWindow,
) -> None:
    """It finds at most the edge states in the wide Fibonacci gaps."""
    curve, _, sections = zero_set_and_sections(
        fibonacci_coefficients, 1_000, base_offsets=(0, 500)
    )
    assert count_resolvent_eigenvalues(curve, sections) <= 2


@pytest.mark.parametrize("family", ("free", "period-two"))
def test_zero_set_centers_classified_as_spectrum(
    free_coefficients: CoefficientWindow,
    period_two_coefficients: CoefficientWindow,
    family: str,
) -> None:
    """It calls the center of every zero-set component a spectral energy."""
    coeffs = free_coefficients if family == "free" else period_two_coefficients
    _, estimate, _ = zero_set_and_sections(coeffs, 200)
    for left, right in estimate.intervals:
        center = 0.5 * (left + right)
        classification = spectrum.classify_energy(coeffs, center, 1_000, (200,))
        assert classification.verdict is Verdict.LIKELY_SPECTRUM_GAMMA_ZERO


@pytest.mark.parametrize(
    "energy, verdict",
    ((0.0, Verdict.LIKELY_SPECTRUM_GAMMA_ZERO), (3.0, Verdict.LIKELY_RESOLVENT)),
)
def test_classify_free_energy(
    free_coefficients: CoefficientWindow, energy: float, verdict: Verdict
) -> None:
    """It places the free band center in the spectrum and ``E = 3`` outside."""
    classification = spectrum.classify_energy(
        free_coefficients, energy, 1_000, sections=(200,)
    )
    assert classification.verdict is verdict


def test_estimate_json() -> None:
    """It exports the method, the intervals and the measure."""
    estimate = SpectrumEstimate(FREE_BAND, EstimateMethod.FINITE_SECTION)
    assert estimate.to_json_dict() == {
        "method": "finite_section",
        "intervals": [[-2.0, 2.0]],
        "measure": 4.0,
    }
