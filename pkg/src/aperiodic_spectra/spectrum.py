"""Numerical estimates of the spectrum and classification of energies.

The spectrum is estimated twice: as the set where the Lyapunov exponent
vanishes, and as the clusters of finite-section eigenvalues. Off the
spectrum both agree once every transfer cocycle is uniform.
"""
import concurrent.futures
import dataclasses
import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from aperiodic_spectra import errors, jacobi
from aperiodic_spectra.cocycle import lyapunov_estimate, lyapunov_values
from aperiodic_spectra.intervals import IntervalUnion, from_points
from aperiodic_spectra.jacobi import CoefficientWindow, FiniteSection, FloatArray
from aperiodic_spectra.option_values import EstimateMethod, Verdict

logger = logging.getLogger(__name__)

GAMMA_FLOOR = -1e-9
ZERO_THRESHOLD_FLOOR = 0.01
ZERO_THRESHOLD_FACTOR = 3.0
UNIFORM_SPREAD = 0.02
EDGE_STATE_BUDGET = 4
EDGE_FRACTION = 0.1
EDGE_WEIGHT = 0.9
AUTO_GRID_MARGIN = 0.5


@dataclasses.dataclass(frozen=True, eq=False)
class EnergyGrid:
    """Strictly increasing energies at which exponents are evaluated.

    Args:
        points: The energies.
        level: How many times the grid has been refined.
    """

    points: FloatArray
    level: int = 0

    def __post_init__(self) -> None:
        """Check the points increase."""
        if self.points.ndim != 1 or not len(self.points):
            raise errors.PreconditionError("A grid needs at least one energy")
        if np.any(np.diff(self.points) <= 0):
            raise errors.PreconditionError("Grid energies must be strictly increasing")
        self.points.setflags(write=False)

    @classmethod
    def uniform(cls, lo: float, hi: float, step: float, level: int = 0) -> "EnergyGrid":
        """Equally spaced energies from ``lo`` to ``hi``, spaced at most ``step`` apart.

        Example:
            >>> EnergyGrid.uniform(-1.0, 1.0, 0.5).points.tolist()
            [-1.0, -0.5, 0.0, 0.5, 1.0]
        """
        if hi < lo:
            raise errors.PreconditionError(
                f"Grid bounds must satisfy lo <= hi, got {lo}, {hi}"
            )
        if step <= 0:
            raise errors.PreconditionError(f"Grid step must be positive, got {step}")
        count = math.ceil((hi - lo) / step - 1e-9) + 1
        return cls(np.linspace(lo, hi, count), level=level)

    @classmethod
    def auto(cls, bound_constant: float, step: float) -> "EnergyGrid":
        """A grid over ``[-3K - 0.5, 3K + 0.5]``, which holds every spectrum."""
        reach = 3.0 * bound_constant + AUTO_GRID_MARGIN
        return cls.uniform(-reach, reach, step)

    @property
    def lo(self) -> float:
        """The lowest energy."""
        return float(self.points[0])

    @property
    def hi(self) -> float:
        """The highest energy."""
        return float(self.points[-1])

    @property
    def spacing(self) -> float:
        """The largest gap between neighboring energies."""
        return float(np.max(np.diff(self.points))) if len(self.points) > 1 else 0.0

    def __len__(self) -> int:
        """The number of energies."""
        return len(self.points)

    def refined(self, factor: int = 2) -> "EnergyGrid":
        """The same range with the spacing divided by ``factor``."""
        return EnergyGrid.uniform(
            self.lo, self.hi, self.spacing / factor, level=self.level + 1
        )


@dataclasses.dataclass(frozen=True, eq=False)
class LyapunovCurve:
    """Estimated Lyapunov exponents and their spread over base offsets along a grid."""

    grid: EnergyGrid
    gamma: FloatArray
    spread: FloatArray
    n_steps: int

    def __post_init__(self) -> None:
        """Check the curve matches its grid."""
        shape = self.grid.points.shape
        if self.gamma.shape != shape or self.spread.shape != shape:
            raise errors.PreconditionError("A curve needs one value per grid point")

    def default_threshold(self) -> FloatArray:
        """The pointwise zero threshold ``3 (spread + log(n)/n)``, at least ``0.01``."""
        bias = math.log(abs(self.n_steps)) / abs(self.n_steps)
        threshold: FloatArray = np.maximum(
            ZERO_THRESHOLD_FLOOR, ZERO_THRESHOLD_FACTOR * (self.spread + bias)
        )
        return threshold


@dataclasses.dataclass(frozen=True)
class SpectrumEstimate:
    """An outer approximation of the spectrum by closed intervals."""

    intervals: IntervalUnion
    method: EstimateMethod

    def measure(self) -> float:
        """The Lebesgue measure of the estimate."""
        return self.intervals.measure()

    def to_json_dict(self) -> Dict[str, object]:
        """The export form ``{method, intervals, measure}``."""
        return {
            "method": self.method.value,
            "intervals": self.intervals.as_lists(),
            "measure": self.measure(),
        }


@dataclasses.dataclass(frozen=True)
class EnergyClassification:
    """Where a single energy sits relative to the spectrum."""

    energy: float
    gamma_hat: float
    spread: float
    section_distance: float
    verdict: Verdict


class FiniteSectionSpectrum(NamedTuple):
    """Section eigenvalues per size and their cluster estimate."""

    eigenvalues: Dict[int, FloatArray]
    estimate: SpectrumEstimate
    edge_states: Tuple[float, ...]
    cluster_radius: float

    def bulk_eigenvalues(self) -> FloatArray:
        """Eigenvalues of the largest section with the edge states removed."""
        largest = self.eigenvalues[max(self.eigenvalues)]
        keep = ~np.isin(largest, np.array(self.edge_states))
        bulk: FloatArray = largest[keep]
        return bulk


class EstimateComparison(NamedTuple):
    """How far the Lyapunov and finite-section estimates are apart."""

    hausdorff_distance: float
    symmetric_difference_measure: float
    intersection: SpectrumEstimate


class RefinementOrder(NamedTuple):
    """One resolution of the measure trend."""

    grid_step: float
    n_steps: int


class TrendPoint(NamedTuple):
    """The measure of the intersection-refined estimate after an order."""

    order: int
    measure: float


class CantorReport(NamedTuple):
    """Evidence for or against a Cantor spectrum."""

    isolated_points: Tuple[float, ...]
    max_contained_interval: float


def gamma_curve(
    coeffs: CoefficientWindow,
    grid: EnergyGrid,
    n_steps: int,
    base_offsets: Sequence[int] = (0,),
    threads: int = 1,
) -> LyapunovCurve:
    """Estimate the Lyapunov exponent and its spread at every grid energy.

    The grid is split into ``threads`` contiguous chunks; the result does
    not depend on the split.

    Args:
        coeffs: Coefficients covering every product.
        grid: The energies.
        n_steps: The product length.
        base_offsets: The base points averaged over.
        threads: The number of worker threads.

    Returns:
        LyapunovCurve: The curve.
    """
    if threads < 1:
        raise errors.PreconditionError(f"threads must be positive, got {threads}")
    chunks = np.array_split(grid.points, min(threads, len(grid)))
    logger.debug("Evaluating %d energies in %d chunks", len(grid), len(chunks))
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
        blocks = list(
            executor.map(
                lambda energies: lyapunov_values(
                    coeffs, energies, n_steps, base_offsets
                ),
                chunks,
            )
        )
    values = np.concatenate(blocks, axis=0)
    gamma = values.mean(axis=1)
    if np.any(gamma < GAMMA_FLOOR):
        logger.warning("Negative Lyapunov estimate %g", float(gamma.min()))
    return LyapunovCurve(
        grid=grid,
        gamma=gamma,
        spread=values.max(axis=1) - values.min(axis=1),
        n_steps=n_steps,
    )


def _runs(mask: npt.NDArray[np.bool_]) -> List[Tuple[int, int]]:
    """Index ranges ``(first, last)`` of the maximal runs of ``True``."""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return [(int(start), int(stop) - 1) for start, stop in zip(edges[::2], edges[1::2])]


def zero_set_estimate(
    curve: LyapunovCurve, threshold: Optional[Union[float, FloatArray]] = None
) -> SpectrumEstimate:
    """The energies where the Lyapunov exponent is numerically zero.

    Runs of consecutive grid points with ``gamma <= threshold`` become
    intervals padded by half the neighboring spacing on each side.

    Args:
        curve: The Lyapunov curve.
        threshold: A scalar or pointwise threshold; by default
            :meth:`LyapunovCurve.default_threshold`.

    Returns:
        SpectrumEstimate: The zero set, possibly empty.
    """
    limit = curve.default_threshold() if threshold is None else threshold
    points = curve.grid.points
    spacing = np.diff(points)
    intervals = []
    for first, last in _runs(curve.gamma <= limit):
        left_pad = 0.5 * spacing[first - 1] if first > 0 else 0.5 * curve.grid.spacing
        right_pad = (
            0.5 * spacing[last] if last < len(spacing) else 0.5 * curve.grid.spacing
        )
        intervals.append((points[first] - left_pad, points[last] + right_pad))
    return SpectrumEstimate(
        IntervalUnion.from_intervals(intervals), EstimateMethod.GAMMA_ZERO_SET
    )


def _edge_weight(section: FiniteSection, eigenvalue: float) -> float:
    """The share of an eigenvector's weight in the outer tenth at either end."""
    vector = jacobi.inverse_iteration(section, eigenvalue)
    margin = max(1, int(EDGE_FRACTION * section.size))
    weights = vector**2
    return float(max(weights[:margin].sum(), weights[-margin:].sum()))


def finite_section_spectrum(
    coeffs: CoefficientWindow,
    sizes: Sequence[int],
    tol: float = 1e-10,
    center: int = 0,
) -> FiniteSectionSpectrum:
    """Eigenvalues of growing sections and the clusters they form.

    Every eigenvalue of the largest section is widened to ``[l - d, l +
    d]`` with ``d = max(tol, (pi/2) * mean spacing)``. Components
    carried by at most four eigenvalues whose eigenvectors live at a
    section end are Dirichlet edge states and are left out.

    Args:
        coeffs: Coefficients covering the largest section.
        sizes: Increasing section sizes.
        tol: The bisection tolerance.
        center: The site the sections are centered on.

    Returns:
        FiniteSectionSpectrum: Eigenvalues, estimate and edge states.
    """
    if not sizes or any(later <= earlier for earlier, later in zip(sizes, sizes[1:])):
        raise errors.PreconditionError(f"Section sizes must increase, got {sizes}")
    if sizes[0] < 1:
        raise errors.PreconditionError("Section sizes must be positive")
    eigenvalues: Dict[int, FloatArray] = {}
    for size in sizes:
        section = FiniteSection.from_coefficients(
            coeffs, *jacobi.section_bounds(center, size)
        )
        eigenvalues[size] = jacobi.eigenvalues_bisection(section, tol)
        logger.debug("Section of size %d solved", size)
    largest = eigenvalues[sizes[-1]]
    radius = jacobi.cluster_radius(largest, tol)
    clusters = from_points(largest, radius)
    edge_states: List[float] = []
    for left, right in clusters:
        members = largest[(largest >= left) & (largest <= right)]
        if len(members) > EDGE_STATE_BUDGET or section.size < 2 * EDGE_STATE_BUDGET:
            continue
        if all(_edge_weight(section, value) >= EDGE_WEIGHT for value in members):
            edge_states.extend(float(value) for value in members)
    bulk = largest[~np.isin(largest, np.array(edge_states))]
    if edge_states:
        logger.info("Screened %d Dirichlet edge states", len(edge_states))
    return FiniteSectionSpectrum(
        eigenvalues=eigenvalues,
        estimate=SpectrumEstimate(
            from_points(bulk, radius), EstimateMethod.FINITE_SECTION
        ),
        edge_states=tuple(edge_states),
        cluster_radius=radius,
    )


def compare_estimates(
    gamma_estimate: SpectrumEstimate, section_estimate: SpectrumEstimate
) -> EstimateComparison:
    """Measure the disagreement between two spectrum estimates."""
    if not gamma_estimate.intervals or not section_estimate.intervals:
        raise errors.PreconditionError("Both estimates must be nonempty")
    first, second = gamma_estimate.intervals, section_estimate.intervals
    return EstimateComparison(
        hausdorff_distance=first.hausdorff_distance(second),
        symmetric_difference_measure=first.symmetric_difference_measure(second),
        intersection=SpectrumEstimate(
            first.intersection(second), EstimateMethod.INTERSECTION
        ),
    )


def refine_estimates(estimates: Sequence[SpectrumEstimate]) -> List[SpectrumEstimate]:
    """Intersect each estimate with all coarser ones."""
    refined: List[SpectrumEstimate] = []
    for estimate in estimates:
        intervals = (
            refined[-1].intervals.intersection(estimate.intervals)
            if refined
            else estimate.intervals
        )
        method = EstimateMethod.INTERSECTION if refined else estimate.method
        refined.append(SpectrumEstimate(intervals, method))
    return refined


def measure_trend(
    coeffs: CoefficientWindow,
    orders: Sequence[RefinementOrder],
    base_offsets: Sequence[int] = (0,),
    lo: Optional[float] = None,
    hi: Optional[float] = None,
    threads: int = 1,
) -> Tuple[List[TrendPoint], List[LyapunovCurve], List[SpectrumEstimate]]:
    """Follow the measure of the zero-set estimate as the resolution grows.

    Each order gets its own grid and product length; the estimates are
    intersected across orders so the measures never increase.

    Returns:
        Tuple: The trend, the curve of every order and the refined
        estimate of every order.
    """
    reach = 3.0 * coeffs.bound_constant + AUTO_GRID_MARGIN
    low = -reach if lo is None else lo
    high = reach if hi is None else hi
    curves = []
    for level, order in enumerate(orders):
        grid = EnergyGrid.uniform(low, high, order.grid_step, level=level)
        curves.append(gamma_curve(coeffs, grid, order.n_steps, base_offsets, threads))
        logger.debug("Order %d: %d energies, n=%d", level, len(grid), order.n_steps)
    refined = refine_estimates([zero_set_estimate(curve) for curve in curves])
    trend = [
        TrendPoint(level, estimate.measure()) for level, estimate in enumerate(refined)
    ]
    return trend, curves, refined


def cantor_diagnostic(
    estimate: SpectrumEstimate, curve: LyapunovCurve, isolation_eps: float
) -> CantorReport:
    """Look for isolated points and whole intervals in a zero-set estimate.

    Components no wider than the grid spacing with no other component
    within ``isolation_eps`` are discrete-point suspects. The widest
    contained interval is the longest stretch of grid energies inside a
    single component.
    """
    components = estimate.intervals.intervals
    if not components:
        return CantorReport(isolated_points=(), max_contained_interval=0.0)
    spacing = curve.grid.spacing
    isolated = []
    for index, (left, right) in enumerate(components):
        if right - left > spacing * (1 + 1e-9):
            continue
        neighbors = [
            components[other]
            for other in (index - 1, index + 1)
            if 0 <= other < len(components)
        ]
        gaps = [
            max(neighbor[0] - right, left - neighbor[1]) for neighbor in neighbors
        ]
        if all(gap > isolation_eps for gap in gaps):
            isolated.append(0.5 * (left + right))
    points = curve.grid.points
    widest = 0.0
    for left, right in components:
        inside = points[(points >= left) & (points <= right)]
        if len(inside):
            widest = max(widest, float(inside[-1] - inside[0]))
    return CantorReport(isolated_points=tuple(isolated), max_contained_interval=widest)


def classify_energy(
    coeffs: CoefficientWindow,
    energy: float,
    n_steps: int,
    sections: Sequence[int],
    base_offsets: Sequence[int] = (0,),
    threshold: Optional[float] = None,
    tol: float = 1e-10,
) -> EnergyClassification:
    """Place one energy in the zero set, the resolvent set, or neither.

    An energy with a numerically zero exponent is likely in the
    spectrum. A positive exponent with a small spread and no nearby
    section eigenvalues is likely in the resolvent set. A positive
    exponent with eigenvalues accumulating nearby is flagged, since a
    non-uniform cocycle puts the energy in the spectrum.
    """
    sample = lyapunov_estimate(coeffs, energy, n_steps, base_offsets)
    limit = (
        max(
            ZERO_THRESHOLD_FLOOR,
            ZERO_THRESHOLD_FACTOR
            * (sample.spread + math.log(abs(n_steps)) / abs(n_steps)),
        )
        if threshold is None
        else threshold
    )
    sectioned = finite_section_spectrum(coeffs, sections, tol)
    bulk = sectioned.bulk_eigenvalues()
    distance = float(np.min(np.abs(bulk - energy))) if len(bulk) else math.inf
    if sample.value <= limit:
        verdict = Verdict.LIKELY_SPECTRUM_GAMMA_ZERO
    elif sample.spread <= UNIFORM_SPREAD and distance > 2.0 * sectioned.cluster_radius:
        verdict = Verdict.LIKELY_RESOLVENT
    else:
        verdict = Verdict.UNIFORMITY_SUSPECT
    logger.debug("E=%g classified as %s", energy, verdict.value)
    return EnergyClassification(
        energy=energy,
        gamma_hat=sample.value,
        spread=sample.spread,
        section_distance=distance,
        verdict=verdict,
    )
