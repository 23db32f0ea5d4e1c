"""Transfer-matrix cocycles and their Lyapunov exponents.

The one-step matrix at site ``n`` consumes ``b(n)``, ``a(n)`` and
``a(n+1)`` and maps ``(u(n), u(n-1))`` to ``(u(n+1), u(n))``. A product
of ``n`` steps from base offset ``k`` runs over sites ``k+1..k+n`` and
maps ``(u(k+1), u(k))`` to ``(u(k+n+1), u(k+n))``.
"""
import dataclasses
import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from aperiodic_spectra import errors
from aperiodic_spectra.jacobi import CoefficientWindow, FloatArray
from aperiodic_spectra.option_values import CocycleVariant

logger = logging.getLogger(__name__)

Mat2 = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]

LOG_TWO = math.log(2.0)
MIN_LYAPUNOV_STEPS = 100
MIN_UNIFORMITY_OFFSETS = 8

_Entries = Tuple[FloatArray, FloatArray, FloatArray, FloatArray]


def det(matrix: Mat2) -> float:
    """The determinant of a 2-by-2 matrix."""
    return float(matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0])


def _spectral_norm(
    m00: FloatArray, m01: FloatArray, m10: FloatArray, m11: FloatArray
) -> FloatArray:
    """The largest singular value of stacked 2-by-2 matrices."""
    frobenius_squared = m00**2 + m01**2 + m10**2 + m11**2
    determinant = m00 * m11 - m01 * m10
    discriminant = np.sqrt(
        np.maximum(frobenius_squared**2 - 4.0 * determinant**2, 0.0)
    )
    norm: FloatArray = np.sqrt(0.5 * (frobenius_squared + discriminant))
    return norm


def spectral_norm(matrix: Mat2) -> float:
    """The operator 2-norm of a 2-by-2 matrix."""
    entries = (np.asarray(matrix[i, j]) for i in (0, 1) for j in (0, 1))
    return float(_spectral_norm(*entries))


def transfer_matrix(coeffs: CoefficientWindow, energy: float, site: int) -> Mat2:
    """The one-step matrix ``[[(E - b(n))/a(n+1), -a(n)/a(n+1)], [1, 0]]``.

    Example:
        >>> coeffs = CoefficientWindow.from_arrays([1, 2], [1, 1])
        >>> transfer_matrix(coeffs, 0.0, 0).tolist()
        [[-0.5, -0.5], [1.0, 0.0]]
    """
    a_next = coeffs.a_at(site + 1)
    return np.array(
        [
            [(energy - coeffs.b_at(site)) / a_next, -coeffs.a_at(site) / a_next],
            [1.0, 0.0],
        ]
    )


def sl2_transfer_matrix(coeffs: CoefficientWindow, energy: float, site: int) -> Mat2:
    """The unimodular one-step matrix ``[[(E - b(n))/a(n+1), -1/a(n+1)], [a(n+1), 0]]``.

    It is conjugate to :func:`transfer_matrix` through ``C(n) =
    diag(1, a(n))``, so that ``M(n) = C(n+1)^{-1} M~(n) C(n)``.
    """
    a_next = coeffs.a_at(site + 1)
    return np.array(
        [
            [(energy - coeffs.b_at(site)) / a_next, -1.0 / a_next],
            [a_next, 0.0],
        ]
    )


def conjugator(coeffs: CoefficientWindow, site: int) -> Mat2:
    """``C(n) = diag(1, a(n))``."""
    return np.diag([1.0, coeffs.a_at(site)])


def _step_entries(
    coeffs: CoefficientWindow,
    energies: FloatArray,
    sites: IntArray,
    variant: CocycleVariant,
    inverse: bool,
) -> _Entries:
    """Entries of the one-step matrices (or their inverses) at ``sites``."""
    a_here = coeffs.a[sites - coeffs.lo]
    a_next = coeffs.a[sites + 1 - coeffs.lo]
    x = (energies - coeffs.b[sites - coeffs.lo]) / a_next
    if variant is CocycleVariant.PLAIN:
        y = np.broadcast_to(-a_here / a_next, x.shape)
        z = np.ones_like(x)
    else:
        y = np.broadcast_to(-1.0 / a_next, x.shape)
        z = np.broadcast_to(a_next, x.shape)
    if not inverse:
        return x, y, z, np.zeros_like(x)
    return np.zeros_like(x), 1.0 / z, 1.0 / y, -x / (y * z)


def _check_sites(
    coeffs: CoefficientWindow, offsets: IntArray, n_steps: int
) -> None:
    """Raise unless the coefficients cover every step of every product."""
    if n_steps >= 0:
        first, last = int(offsets.min()) + 1, int(offsets.max()) + n_steps
    else:
        first, last = int(offsets.min()) + n_steps + 1, int(offsets.max())
    if n_steps and not coeffs.covers(first, last + 1):
        raise errors.CoverageError(
            f"Coefficients cover [{coeffs.lo}, {coeffs.hi}], a product of "
            f"{n_steps} steps needs sites [{first}, {last + 1}]"
        )


def _accumulate(
    coeffs: CoefficientWindow,
    energies: FloatArray,
    offsets: IntArray,
    n_steps: int,
    variant: CocycleVariant,
) -> Tuple[Mat2, FloatArray]:
    """Renormalized products for every pair of energy and base offset.

    Negative ``n_steps`` multiply inverse one-step matrices backwards
    from the base offset, ``M(-n, w) = M(n, T^{-n} w)^{-1}``.

    Returns:
        Tuple[Mat2, FloatArray]: Scaled matrices of shape ``(E, k, 2, 2)``
        with Frobenius norms in ``[0.5, 2]`` and their log scales of
        shape ``(E, k)``.
    """
    _check_sites(coeffs, offsets, n_steps)
    column = np.asarray(energies, dtype=np.float64)[:, np.newaxis]
    shape = (len(column), len(offsets))
    m00, m01 = np.ones(shape), np.zeros(shape)
    m10, m11 = np.zeros(shape), np.ones(shape)
    log_scale = np.zeros(shape)
    inverse = n_steps < 0
    rebalances = 0
    for step in range(abs(n_steps)):
        sites = offsets - step if inverse else offsets + step + 1
        p, q, r, t = _step_entries(coeffs, column, sites, variant, inverse)
        m00, m01, m10, m11 = (
            p * m00 + q * m10,
            p * m01 + q * m11,
            r * m00 + t * m10,
            r * m01 + t * m11,
        )
        norm = np.sqrt(m00**2 + m01**2 + m10**2 + m11**2)
        _, exponent = np.frexp(norm)
        exponent = np.where((norm > 2.0) | (norm < 0.5), exponent, 0)
        if exponent.any():
            rebalances += 1
            m00, m01 = np.ldexp(m00, -exponent), np.ldexp(m01, -exponent)
            m10, m11 = np.ldexp(m10, -exponent), np.ldexp(m11, -exponent)
            log_scale += exponent * LOG_TWO
    logger.debug(
        "Accumulated %d x %d products of %d steps, %d rebalancing steps",
        shape[0],
        shape[1],
        n_steps,
        rebalances,
    )
    matrices = np.stack((np.stack((m00, m01), -1), np.stack((m10, m11), -1)), -2)
    return matrices, log_scale


@dataclasses.dataclass(frozen=True, eq=False)
class CocycleAccumulator:
    """A cocycle product ``e^s B`` kept at unit scale.

    Args:
        scaled_matrix: ``B``, with Frobenius norm in ``[0.5, 2]``.
        log_scale: The accumulated scale ``s``.
        steps: The signed number of one-step factors.
        variant: Which one-step matrix was multiplied.
    """

    scaled_matrix: Mat2
    log_scale: float
    steps: int
    variant: CocycleVariant = CocycleVariant.SL2

    @property
    def log_norm(self) -> float:
        """``log`` of the operator norm of the exact product."""
        return self.log_scale + math.log(spectral_norm(self.scaled_matrix))

    @property
    def log_frobenius_norm(self) -> float:
        """``log`` of the Frobenius norm of the exact product."""
        return self.log_scale + math.log(float(np.linalg.norm(self.scaled_matrix)))

    @property
    def unimodularity_defect(self) -> float:
        """``|det(e^s B) - 1|`` relative to the squared norm of the product."""
        scaled_det = det(self.scaled_matrix)
        frobenius_squared = float(np.sum(self.scaled_matrix**2))
        with np.errstate(over="ignore"):
            unit_det = float(np.exp(-2.0 * self.log_scale))
        return abs(scaled_det - unit_det) / frobenius_squared

    def product(self) -> Mat2:
        """The exact product ``e^s B``, which overflows once ``s`` passes ~709."""
        exact: Mat2 = self.scaled_matrix * math.exp(self.log_scale)
        return exact

    def lyapunov(self) -> float:
        """``(1/|n|) log ||M(n)||``."""
        if not self.steps:
            return 0.0
        return self.log_norm / abs(self.steps)


def cocycle_product(
    coeffs: CoefficientWindow,
    energy: float,
    n_steps: int,
    base_offset: int = 0,
    variant: CocycleVariant = CocycleVariant.SL2,
) -> CocycleAccumulator:
    """Multiply ``n_steps`` one-step matrices starting after ``base_offset``.

    Args:
        coeffs: The coefficients.
        energy: The energy ``E``.
        n_steps: The number of factors; negative values build the
            backward cocycle and ``0`` the identity.
        base_offset: The base point ``k`` of ``M(n, T^k w)``.
        variant: ``plain`` for ``M^E``, ``sl2`` for the unimodular
            ``M~^E``.

    Returns:
        CocycleAccumulator: The renormalized product.
    """
    matrices, log_scale = _accumulate(
        coeffs,
        np.array([energy], dtype=np.float64),
        np.array([base_offset], dtype=np.int64),
        n_steps,
        variant,
    )
    return CocycleAccumulator(
        matrices[0, 0], log_scale=float(log_scale[0, 0]), steps=n_steps, variant=variant
    )


def lyapunov_values(
    coeffs: CoefficientWindow,
    energies: Sequence[float],
    n_steps: int,
    base_offsets: Sequence[int],
) -> FloatArray:
    """``(1/|n|) log ||M~(n, T^k w)||`` for every energy and base offset.

    Returns:
        FloatArray: An array of shape ``(len(energies), len(base_offsets))``.
    """
    if not n_steps:
        raise errors.PreconditionError("n_steps must be nonzero")
    matrices, log_scale = _accumulate(
        coeffs,
        np.asarray(energies, dtype=np.float64),
        np.asarray(base_offsets, dtype=np.int64),
        n_steps,
        CocycleVariant.SL2,
    )
    norms = _spectral_norm(
        matrices[..., 0, 0],
        matrices[..., 0, 1],
        matrices[..., 1, 0],
        matrices[..., 1, 1],
    )
    values: FloatArray = (log_scale + np.log(norms)) / abs(n_steps)
    return values


@dataclasses.dataclass(frozen=True)
class LyapunovSample:
    """A Lyapunov exponent estimate aggregated over base offsets."""

    energy: float
    n_steps: int
    value: float
    minimum: float
    maximum: float
    base_offsets: Tuple[int, ...]

    @property
    def spread(self) -> float:
        """``max - min`` over the base offsets."""
        return self.maximum - self.minimum


def lyapunov_estimate(
    coeffs: CoefficientWindow,
    energy: float,
    n_steps: int,
    base_offsets: Sequence[int] = (0,),
) -> LyapunovSample:
    """Estimate ``gamma(E)`` as the mean of ``(1/n) log ||M~(n, T^k w)||``.

    Example:
        >>> coeffs = CoefficientWindow.periodic([1.0], [0.0], -1, 10_002)
        >>> round(lyapunov_estimate(coeffs, 3.0, 10_000).value, 3)
        0.962
    """
    if abs(n_steps) < MIN_LYAPUNOV_STEPS:
        raise errors.PreconditionError(
            f"Lyapunov estimates need at least {MIN_LYAPUNOV_STEPS} steps,"
            f" got {n_steps}"
        )
    values = lyapunov_values(coeffs, [energy], n_steps, base_offsets)[0]
    return LyapunovSample(
        energy=energy,
        n_steps=n_steps,
        value=float(values.mean()),
        minimum=float(values.min()),
        maximum=float(values.max()),
        base_offsets=tuple(int(offset) for offset in base_offsets),
    )


def inverse_symmetry_gap(
    coeffs: CoefficientWindow,
    energy: float,
    n_steps: int,
    base_offsets: Sequence[int] = (0,),
) -> float:
    """``|gamma(n) - gamma(-n)|``, which vanishes in the limit for SL(2) cocycles."""
    forward = lyapunov_estimate(coeffs, energy, abs(n_steps), base_offsets)
    backward = lyapunov_estimate(coeffs, energy, -abs(n_steps), base_offsets)
    return abs(forward.value - backward.value)


def closed_form_lyapunov_periodic(
    a_period: Sequence[float], b_period: Sequence[float], energy: float
) -> float:
    """The exact Lyapunov exponent of periodic coefficients.

    ``(1/P) log rho`` where ``rho`` is the spectral radius of the
    monodromy over one period.

    Example:
        >>> round(closed_form_lyapunov_periodic([1.0], [0.0], 3.0), 6)
        0.962424
    """
    period = len(a_period)
    if not period or len(b_period) != period:
        raise errors.PreconditionError("Periods of a and b must match and be nonempty")
    if any(value == 0 for value in a_period):
        raise errors.PreconditionError("a must never vanish")
    monodromy = np.eye(2)
    for site in range(period):
        a_next = a_period[(site + 1) % period]
        step = np.array(
            [[(energy - b_period[site]) / a_next, -1.0 / a_next], [a_next, 0.0]]
        )
        monodromy = step @ monodromy
    half_trace = 0.5 * abs(float(np.trace(monodromy)))
    if half_trace <= 1.0:
        return 0.0
    return math.log(half_trace + math.sqrt(half_trace**2 - 1.0)) / period


@dataclasses.dataclass(frozen=True)
class UniformityReport:
    """Spread of per-offset Lyapunov estimates over a doubling sequence of lengths."""

    energy: float
    n_list: Tuple[int, ...]
    minima: Tuple[float, ...]
    maxima: Tuple[float, ...]
    means: Tuple[float, ...]

    @property
    def spreads(self) -> Tuple[float, ...]:
        """``max - min`` for each length."""
        return tuple(high - low for low, high in zip(self.minima, self.maxima))

    @property
    def consistent_with_uniform(self) -> bool:
        """Whether the spread never grows with the length."""
        spreads = self.spreads
        return all(
            later <= earlier + 1e-12 for earlier, later in zip(spreads, spreads[1:])
        )


def uniformity_diagnostic(
    coeffs: CoefficientWindow,
    energy: float,
    n_steps: int,
    base_offsets: Sequence[int],
    n_list: Optional[Iterable[int]] = None,
) -> UniformityReport:
    """Track the spread over base offsets of ``(1/n) log ||M~(n, T^k w)||``.

    Args:
        coeffs: The coefficients.
        energy: The energy ``E``.
        n_steps: The first length ``n``.
        base_offsets: At least eight base offsets.
        n_list: The lengths to compare, ``(n, 2n, 4n)`` by default.

    Returns:
        UniformityReport: The per-length statistics.
    """
    if len(base_offsets) < MIN_UNIFORMITY_OFFSETS:
        raise errors.PreconditionError(
            f"Uniformity needs at least {MIN_UNIFORMITY_OFFSETS} base offsets, "
            f"got {len(base_offsets)}"
        )
    lengths = (
        tuple(n_list) if n_list is not None else (n_steps, 2 * n_steps, 4 * n_steps)
    )
    minima: List[float] = []
    maxima: List[float] = []
    means: List[float] = []
    for length in lengths:
        values = lyapunov_values(coeffs, [energy], length, base_offsets)[0]
        minima.append(float(values.min()))
        maxima.append(float(values.max()))
        means.append(float(values.mean()))
    return UniformityReport(
        energy=energy,
        n_list=lengths,
        minima=tuple(minima),
        maxima=tuple(maxima),
        means=tuple(means),
    )


def conjugation_residual(
    coeffs: CoefficientWindow, energy: float, n_steps: int, base_offset: int = 0
) -> float:
    """``||M(n) - C(k+n+1)^{-1} M~(n) C(k+1)|| / ||M(n)||`` in the Frobenius norm."""
    plain = cocycle_product(coeffs, energy, n_steps, base_offset, CocycleVariant.PLAIN)
    unimodular = cocycle_product(
        coeffs, energy, n_steps, base_offset, CocycleVariant.SL2
    )
    outer = np.linalg.inv(conjugator(coeffs, base_offset + n_steps + 1))
    inner = conjugator(coeffs, base_offset + 1)
    conjugated = (
        math.exp(unimodular.log_scale - plain.log_scale)
        * outer
        @ unimodular.scaled_matrix
        @ inner
    )
    return float(
        np.linalg.norm(plain.scaled_matrix - conjugated)
        / np.linalg.norm(plain.scaled_matrix)
    )


def cocycle_identity_residual(
    coeffs: CoefficientWindow,
    energy: float,
    m: int,
    n: int,
    base_offset: int = 0,
    variant: CocycleVariant = CocycleVariant.SL2,
) -> float:
    """Relative deviation of ``M(m, T^n w) M(n, w)`` from ``M(m + n, w)``."""
    later = cocycle_product(coeffs, energy, m, base_offset + n, variant)
    earlier = cocycle_product(coeffs, energy, n, base_offset, variant)
    whole = cocycle_product(coeffs, energy, m + n, base_offset, variant)
    composed = later.scaled_matrix @ earlier.scaled_matrix
    rescale = math.exp(later.log_scale + earlier.log_scale - whole.log_scale)
    return float(
        np.linalg.norm(rescale * composed - whole.scaled_matrix)
        / np.linalg.norm(whole.scaled_matrix)
    )


@dataclasses.dataclass(frozen=True)
class SingularDirections:
    """Right singular vectors of an ``n``-step unimodular product.

    ``u_hat`` is the most contracted unit vector and ``v_hat`` the most
    expanded one.
    """

    u_hat: FloatArray
    v_hat: FloatArray
    sigma_max: float
    sigma_min: float
    log_sigma_max: float


def _oriented(vector: FloatArray) -> FloatArray:
    """Fix the sign so the first nonzero component is positive."""
    pivot = vector[np.flatnonzero(np.abs(vector) > 1e-300)[0]]
    oriented: FloatArray = vector if pivot > 0 else -vector
    return oriented


def singular_directions(
    coeffs: CoefficientWindow, energy: float, n_steps: int, base_offset: int = 0
) -> SingularDirections:
    """Split the plane into the contracted and expanded directions of ``M~(n)``.

    The smaller singular value comes from the unit determinant, so
    ``sigma_max * sigma_min = 1`` whatever the scale.
    """
    if n_steps < 10:
        raise errors.PreconditionError(f"n_steps must be at least 10, got {n_steps}")
    product = cocycle_product(coeffs, energy, n_steps, base_offset, CocycleVariant.SL2)
    _, singular_values, right = np.linalg.svd(product.scaled_matrix)
    v_hat = _oriented(right[0])
    u_hat = _oriented(np.array([-v_hat[1], v_hat[0]]))
    log_sigma_max = product.log_scale + math.log(float(singular_values[0]))
    return SingularDirections(
        u_hat=u_hat,
        v_hat=v_hat,
        sigma_max=math.exp(log_sigma_max),
        sigma_min=math.exp(-log_sigma_max),
        log_sigma_max=log_sigma_max,
    )


def plain_sl2_log_gap(
    coeffs: CoefficientWindow, energy: float, n_steps: int, base_offset: int = 0
) -> float:
    """``|log ||M(n)|| - log ||M~(n)|||``, at most ``log K^2`` by conjugation."""
    plain = cocycle_product(coeffs, energy, n_steps, base_offset, CocycleVariant.PLAIN)
    unimodular = cocycle_product(
        coeffs, energy, n_steps, base_offset, CocycleVariant.SL2
    )
    return abs(plain.log_norm - unimodular.log_norm)


def propagate(
    coeffs: CoefficientWindow, energy: float, u0: float, u1: float, lo: int, hi: int
) -> FloatArray:
    """A solution through ``u(0) = u0``, ``u(1) = u1`` built by transfer matrices.

    Steps are multiplied one at a time without renormalization.
    """
    values = {0: u0, 1: u1}
    state = np.array([u1, u0])
    for site in range(1, hi):
        state = transfer_matrix(coeffs, energy, site) @ state
        values[site + 1] = float(state[0])
    state = np.array([u1, u0])
    for site in range(0, lo, -1):
        state = np.linalg.solve(transfer_matrix(coeffs, energy, site), state)
        values[site - 1] = float(state[1])
    return np.array([values[site] for site in range(lo, hi + 1)])
