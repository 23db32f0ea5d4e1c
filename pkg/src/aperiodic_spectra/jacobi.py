"""Jacobi operators sampled along a subshift orbit."""
import dataclasses
import logging
import math
from typing import Hashable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from aperiodic_spectra import errors, subshift
from aperiodic_spectra.subshift import Alphabet, OrbitWindow, Word

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

PIVOT_FLOOR = 1e-300
SINGULAR_MARGIN = 1e-13
OVERFLOW_LIMIT = 1e300


def _bound_constant(a: FloatArray, b: FloatArray) -> float:
    """The smallest ``K >= 1`` with ``1/K <= |a| <= K`` and ``|b| <= K``."""
    candidates = [1.0]
    if a.size:
        absolute_a = np.abs(a)
        candidates += [float(absolute_a.max()), float(1.0 / absolute_a.min())]
    if b.size:
        candidates.append(float(np.abs(b).max()))
    return max(candidates)


@dataclasses.dataclass(frozen=True, eq=False)
class SamplingFunctions:
    """Locally constant maps ``p`` and ``q`` read off ``(2N+1)``-windows.

    Args:
        window_radius: The radius ``N`` of the windows the tables are
            keyed on.
        p_table: The off-diagonal value of each window, never zero.
        q_table: The diagonal value of each window.
    """

    window_radius: int
    p_table: Mapping[Word, float]
    q_table: Mapping[Word, float]
    bound_constant: float = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        """Validate the tables and compute the bound constant."""
        if self.window_radius < 0:
            raise errors.PreconditionError("The window radius must be nonnegative")
        width = 2 * self.window_radius + 1
        for table in (self.p_table, self.q_table):
            if any(len(word) != width for word in table):
                raise errors.PreconditionError(
                    f"Every sampling key must be a word of length {width}"
                )
        if any(value == 0 for value in self.p_table.values()):
            raise errors.PreconditionError("p must never vanish")
        p_values = np.array(list(self.p_table.values()), dtype=np.float64)
        q_values = np.array(list(self.q_table.values()), dtype=np.float64)
        object.__setattr__(self, "bound_constant", _bound_constant(p_values, q_values))

    @classmethod
    def from_symbol_values(
        cls,
        alphabet: Alphabet,
        p: Union[float, Mapping[Hashable, float]],
        q: Union[float, Mapping[Hashable, float]],
    ) -> "SamplingFunctions":
        """Sampling functions depending on the letter at the site only.

        Constants are broadcast over the whole alphabet.
        """
        tables = []
        for values in (p, q):
            if isinstance(values, Mapping):
                table = {
                    (alphabet.index(label),): float(values[label]) for label in values
                }
            else:
                table = {(letter,): float(values) for letter in range(alphabet.size)}
            tables.append(table)
        return cls(0, p_table=tables[0], q_table=tables[1])

    @classmethod
    def from_label_tables(
        cls,
        alphabet: Alphabet,
        window_radius: int,
        p: Mapping[Sequence[Hashable], float],
        q: Mapping[Sequence[Hashable], float],
    ) -> "SamplingFunctions":
        """Sampling functions keyed on label words such as ``{"aba": 1.0}``."""
        p_table = {alphabet.encode(word): float(value) for word, value in p.items()}
        q_table = {alphabet.encode(word): float(value) for word, value in q.items()}
        return cls(window_radius, p_table=p_table, q_table=q_table)

    def _lookup(
        self, orbit: OrbitWindow, table: Mapping[Word, float], lo: int, hi: int
    ) -> FloatArray:
        """Evaluate one table at every site of ``lo..hi``."""
        radius = self.window_radius
        symbols = orbit.sites(lo - radius, hi + radius)
        windows = np.lib.stride_tricks.sliding_window_view(symbols, 2 * radius + 1)
        rows, inverse = np.unique(windows, axis=0, return_inverse=True)
        values = np.empty(len(rows), dtype=np.float64)
        for index, row in enumerate(rows):
            word = tuple(int(symbol) for symbol in row)
            try:
                values[index] = table[word]
            except KeyError:
                labels = "".join(str(label) for label in orbit.alphabet.decode(word))
                raise errors.UnknownWord(
                    f"The sampling table has no value for the orbit factor {labels!r}"
                ) from None
        return values[np.ravel(inverse)]

    def check_coverage(self, orbit: OrbitWindow, lo: int, hi: int) -> None:
        """Fail fast when an orbit factor on ``lo..hi`` is missing from a table."""
        self._lookup(orbit, self.p_table, lo, hi)
        self._lookup(orbit, self.q_table, lo, hi)


@dataclasses.dataclass(frozen=True, eq=False)
class CoefficientWindow:
    """The Jacobi coefficients ``a(n)`` and ``b(n)`` on sites ``lo..hi``.

    Args:
        lo: The first site.
        a: The off-diagonal coefficients, ``a[i] = a(lo + i)``.
        b: The diagonal coefficients, ``b[i] = b(lo + i)``.
    """

    lo: int
    a: FloatArray
    b: FloatArray
    bound_constant: float = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        """Check the coefficients and freeze them."""
        if self.a.shape != self.b.shape or self.a.ndim != 1:
            raise errors.PreconditionError("a and b must be vectors of equal length")
        if np.any(self.a == 0):
            raise errors.PreconditionError("The off-diagonal a must never vanish")
        self.a.setflags(write=False)
        self.b.setflags(write=False)
        object.__setattr__(self, "bound_constant", _bound_constant(self.a, self.b))

    @classmethod
    def from_arrays(
        cls, a: Sequence[float], b: Sequence[float], lo: int = 0
    ) -> "CoefficientWindow":
        """Wrap plain sequences."""
        return cls(
            lo,
            a=np.array(a, dtype=np.float64),
            b=np.array(b, dtype=np.float64),
        )

    @classmethod
    def periodic(
        cls,
        a_period: Sequence[float],
        b_period: Sequence[float],
        lo: int,
        hi: int,
    ) -> "CoefficientWindow":
        """Coefficients ``a(n) = a_period[n mod P]`` and likewise for ``b``."""
        if len(a_period) != len(b_period) or not a_period:
            raise errors.PreconditionError("Periods of a and b must match")
        sites = np.mod(np.arange(lo, hi + 1), len(a_period))
        return cls(
            lo,
            a=np.asarray(a_period, dtype=np.float64)[sites],
            b=np.asarray(b_period, dtype=np.float64)[sites],
        )

    @property
    def hi(self) -> int:
        """The last site."""
        return self.lo + len(self.a) - 1

    def covers(self, lo: int, hi: int) -> bool:
        """Whether sites ``lo..hi`` have coefficients."""
        return self.lo <= lo and hi <= self.hi

    def _check(self, lo: int, hi: int) -> None:
        """Raise unless ``lo..hi`` is covered."""
        if not self.covers(lo, hi):
            raise errors.CoverageError(
                f"Coefficients cover [{self.lo}, {self.hi}],"
                f" sites [{lo}, {hi}] requested"
            )

    def a_range(self, lo: int, hi: int) -> FloatArray:
        """``a(lo..hi)``."""
        self._check(lo, hi)
        return self.a[lo - self.lo : hi - self.lo + 1]

    def b_range(self, lo: int, hi: int) -> FloatArray:
        """``b(lo..hi)``."""
        self._check(lo, hi)
        return self.b[lo - self.lo : hi - self.lo + 1]

    def a_at(self, site: int) -> float:
        """``a(site)``."""
        return float(self.a_range(site, site)[0])

    def b_at(self, site: int) -> float:
        """``b(site)``."""
        return float(self.b_range(site, site)[0])


@dataclasses.dataclass(frozen=True, eq=False)
class FiniteSection:
    """The Dirichlet restriction of a Jacobi operator to ``lo..hi``.

    ``diag`` holds ``b(lo..hi)`` and ``offdiag`` holds ``a(lo+1..hi)``,
    the couplings between consecutive sites.
    """

    lo: int
    diag: FloatArray
    offdiag: FloatArray
    bound_constant: float = dataclasses.field(init=False)

    def __post_init__(self) -> None:
        """Check the shape and the couplings."""
        if len(self.diag) < 1 or len(self.offdiag) != len(self.diag) - 1:
            raise errors.PreconditionError(
                "A section needs n diagonal and n - 1 off-diagonal entries"
            )
        if np.any(self.offdiag == 0):
            raise errors.PreconditionError("Section couplings must never vanish")
        object.__setattr__(
            self, "bound_constant", _bound_constant(self.offdiag, self.diag)
        )

    @classmethod
    def from_coefficients(
        cls, coeffs: CoefficientWindow, lo: int, hi: int
    ) -> "FiniteSection":
        """Cut the section ``lo..hi`` out of a coefficient window."""
        if hi < lo:
            raise errors.PreconditionError(f"Empty section [{lo}, {hi}]")
        return cls(
            lo,
            diag=coeffs.b_range(lo, hi).copy(),
            offdiag=coeffs.a_range(lo + 1, hi).copy(),
        )

    @classmethod
    def from_arrays(
        cls, diag: Sequence[float], offdiag: Sequence[float], lo: int = 0
    ) -> "FiniteSection":
        """Wrap plain sequences."""
        return cls(
            lo,
            diag=np.array(diag, dtype=np.float64),
            offdiag=np.array(offdiag, dtype=np.float64),
        )

    @property
    def size(self) -> int:
        """The dimension of the section."""
        return len(self.diag)

    @property
    def hi(self) -> int:
        """The last site."""
        return self.lo + self.size - 1

    def leading(self, size: int) -> "FiniteSection":
        """The leading ``size``-by-``size`` block."""
        return FiniteSection(
            self.lo,
            diag=self.diag[:size].copy(),
            offdiag=self.offdiag[: size - 1].copy(),
        )

    def to_dense(self) -> FloatArray:
        """The section as a dense symmetric matrix."""
        matrix: FloatArray = np.diag(self.diag)
        if self.size > 1:
            matrix += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return matrix


@dataclasses.dataclass(frozen=True, eq=False)
class Solution:
    """A solution ``u(lo..hi)`` of the eigenvalue difference equation at ``energy``."""

    lo: int
    u: FloatArray
    energy: float

    @property
    def hi(self) -> int:
        """The last site."""
        return self.lo + len(self.u) - 1

    def at(self, site: int) -> float:
        """``u(site)``."""
        return float(self.u[site - self.lo])


@dataclasses.dataclass(frozen=True)
class CombesThomasReport:
    """Exponential decay of a Green's function column off the spectrum.

    Args:
        eta: Distance from the energy to the nearest section eigenvalue.
        kappa_fit: Least-squares decay rate of ``log |G(n, m)|``.
        kappa_bound: Largest ``kappa`` with ``|G(n, m)| <= (2/eta)
            exp(-kappa |n - m|)`` on every checked site.
        bound_satisfied: Whether some ``kappa > 0`` satisfies the bound.
        kappa_apriori: The rate ``(eta / K) c`` the estimate guarantees.
        apriori_bound_satisfied: Whether the bound holds with
            ``kappa_apriori``.
    """

    eta: float
    kappa_fit: float
    kappa_bound: float
    bound_satisfied: bool
    kappa_apriori: float
    apriori_bound_satisfied: bool


def assemble_coefficients(
    orbit: OrbitWindow, sampling: SamplingFunctions, lo: int, hi: int
) -> CoefficientWindow:
    """Sample ``a(n) = p(omega(n-N..n+N))`` and ``b(n) = q(omega(n-N..n+N))``.

    Args:
        orbit: The orbit, extended when it does not cover
            ``lo - N..hi + N``.
        sampling: The locally constant maps.
        lo: The first site.
        hi: The last site.

    Returns:
        CoefficientWindow: The coefficients on ``lo..hi``.

    Raises:
        UnknownWord: If an orbit factor has no table entry.
    """
    if hi < lo:
        raise errors.PreconditionError(f"Empty coefficient range [{lo}, {hi}]")
    a = sampling._lookup(orbit, sampling.p_table, lo, hi)
    b = sampling._lookup(orbit, sampling.q_table, lo, hi)
    return CoefficientWindow(lo, a=a, b=b)


def _padded(u: FloatArray, u_lo: int, lo: int, hi: int) -> FloatArray:
    """``u`` on ``lo..hi`` with zeros where it is undefined."""
    padded = np.zeros(hi - lo + 1, dtype=np.float64)
    start = max(lo, u_lo)
    stop = min(hi, u_lo + len(u) - 1)
    if start <= stop:
        padded[start - lo : stop - lo + 1] = u[start - u_lo : stop - u_lo + 1]
    return padded


def apply_operator(
    u: Sequence[float], coeffs: CoefficientWindow, lo: int, hi: int, u_lo: int = 0
) -> FloatArray:
    """Evaluate ``(Hu)(n) = a(n+1) u(n+1) + b(n) u(n) + a(n) u(n-1)`` on ``lo..hi``.

    Args:
        u: The vector, ``u[i] = u(u_lo + i)`` and zero elsewhere.
        coeffs: The coefficients, covering ``lo..hi+1``.
        lo: The first site to evaluate.
        hi: The last site to evaluate.
        u_lo: The site of ``u[0]``.

    Returns:
        FloatArray: ``(Hu)(lo..hi)``.
    """
    padded = _padded(np.asarray(u, dtype=np.float64), u_lo, lo - 1, hi + 1)
    return (
        coeffs.a_range(lo + 1, hi + 1) * padded[2:]
        + coeffs.b_range(lo, hi) * padded[1:-1]
        + coeffs.a_range(lo, hi) * padded[:-2]
    )


def _sturm_counts(
    section: FiniteSection, energies: FloatArray
) -> npt.NDArray[np.int64]:
    """Count the negative LDL^T pivots of ``section - E`` for every energy."""
    offdiag_squared = section.offdiag**2
    counts = np.zeros(energies.shape, dtype=np.int64)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        pivot = section.diag[0] - energies
        for k in range(section.size):
            if k:
                pivot = (section.diag[k] - energies) - offdiag_squared[k - 1] / pivot
            pivot = np.where(
                np.abs(pivot) < PIVOT_FLOOR, np.copysign(PIVOT_FLOOR, pivot), pivot
            )
            counts += pivot < 0
    return counts


def sturm_count(section: FiniteSection, energy: float) -> int:
    """The number of section eigenvalues strictly below ``energy``.

    Example:
        >>> sturm_count(FiniteSection.from_arrays([0, 0, 0], [1, 1]), 1.0)
        2
    """
    return int(_sturm_counts(section, np.array([energy], dtype=np.float64))[0])


def eigenvalues_bisection(section: FiniteSection, tol: float = 1e-10) -> FloatArray:
    """All eigenvalues of a section by simultaneous Sturm bisection.

    Every eigenvalue is bracketed inside ``[-3K - tol, 3K + tol]`` and
    the brackets are halved until narrower than ``tol``.

    Args:
        section: The section.
        tol: The bracket width.

    Returns:
        FloatArray: The ``size`` eigenvalues in ascending order.
    """
    if tol <= 0:
        raise errors.PreconditionError(f"tol must be positive, got {tol}")
    reach = 3.0 * section.bound_constant + tol
    lower = np.full(section.size, -reach)
    upper = np.full(section.size, reach)
    index = np.arange(section.size)
    iterations = math.ceil(math.log2(2.0 * reach / tol)) + 1
    for _ in range(iterations):
        middle = 0.5 * (lower + upper)
        below_middle = _sturm_counts(section, middle) > index
        upper = np.where(below_middle, middle, upper)
        lower = np.where(below_middle, lower, middle)
    eigenvalues: FloatArray = 0.5 * (lower + upper)
    return eigenvalues


def solve_difference_equation(
    coeffs: CoefficientWindow,
    energy: float,
    u0: float,
    u1: float,
    lo: int,
    hi: int,
    overflow_limit: Optional[float] = None,
) -> Solution:
    """Propagate ``u(0) = u0``, ``u(1) = u1`` through the eigenvalue equation.

    Both directions solve ``a(n+1) u(n+1) + b(n) u(n) + a(n) u(n-1) =
    E u(n)``.

    Args:
        coeffs: The coefficients, covering ``lo..hi``.
        energy: The energy ``E``.
        u0: The value at site 0.
        u1: The value at site 1.
        lo: The first site, at most 0.
        hi: The last site, at least 1.
        overflow_limit: If given, raise once ``|u|`` exceeds it.

    Returns:
        Solution: The solution on ``lo..hi``.

    Raises:
        OverflowGuard: If ``overflow_limit`` is exceeded.
    """
    if not lo <= 0 < 1 <= hi:
        raise errors.PreconditionError(f"Range [{lo}, {hi}] must contain 0 and 1")
    a = coeffs.a_range(lo, hi)
    b = coeffs.b_range(lo, hi)
    u = np.zeros(hi - lo + 1, dtype=np.float64)
    origin = -lo
    u[origin] = u0
    u[origin + 1] = u1
    limit = math.inf if overflow_limit is None else overflow_limit
    for i in range(origin + 1, len(u) - 1):
        u[i + 1] = ((energy - b[i]) * u[i] - a[i] * u[i - 1]) / a[i + 1]
        if not abs(u[i + 1]) <= limit:
            raise errors.OverflowGuard(
                f"|u({lo + i + 1})| exceeded {limit:g} at E={energy}"
            )
    for i in range(origin, 0, -1):
        u[i - 1] = ((energy - b[i]) * u[i] - a[i + 1] * u[i + 1]) / a[i]
        if not abs(u[i - 1]) <= limit:
            raise errors.OverflowGuard(
                f"|u({lo + i - 1})| exceeded {limit:g} at E={energy}"
            )
    return Solution(lo, u=u, energy=energy)


def _thomas_solve(diag: FloatArray, offdiag: FloatArray, rhs: FloatArray) -> FloatArray:
    """Solve a symmetric tridiagonal system by elimination without pivoting.

    Pivots smaller than ``PIVOT_FLOOR`` are nudged to it, so a shift
    sitting exactly on an eigenvalue still yields a huge but finite
    vector along its eigenvector.
    """
    size = len(diag)
    ratios = np.empty(max(size - 1, 0), dtype=np.float64)
    forward = np.empty(size, dtype=np.float64)
    pivot = 0.0
    for i in range(size):
        pivot = diag[i] - (offdiag[i - 1] * ratios[i - 1] if i else 0.0)
        if abs(pivot) < PIVOT_FLOOR:
            pivot = math.copysign(PIVOT_FLOOR, pivot)
        if i < size - 1:
            ratios[i] = offdiag[i] / pivot
        forward[i] = (rhs[i] - (offdiag[i - 1] * forward[i - 1] if i else 0.0)) / pivot
    solution = forward
    for i in range(size - 2, -1, -1):
        solution[i] = forward[i] - ratios[i] * solution[i + 1]
    return solution


def greens_function(
    coeffs: CoefficientWindow, energy: float, lo: int, hi: int, m: int
) -> FloatArray:
    """The column ``G(n, m) = <delta_n, (H - E)^{-1} delta_m>`` on ``lo..hi``.

    Args:
        coeffs: The coefficients.
        energy: An energy off the section spectrum.
        lo: The first site of the section.
        hi: The last site of the section.
        m: The source site.

    Returns:
        FloatArray: ``G(lo..hi, m)``.

    Raises:
        SingularSystem: If a section eigenvalue lies within ``1e-13``
            of ``E``.

    Example:
        >>> window = CoefficientWindow.from_arrays([1.0, 2.0], [0.0, 1.0])
        >>> greens_function(window, 0.0, 0, 1, 0).tolist()
        [-0.25, 0.5]
    """
    if not lo <= m <= hi:
        raise errors.PreconditionError(f"Source site {m} is outside [{lo}, {hi}]")
    section = FiniteSection.from_coefficients(coeffs, lo, hi)
    if sturm_count(section, energy + SINGULAR_MARGIN) > sturm_count(
        section, energy - SINGULAR_MARGIN
    ):
        raise errors.SingularSystem(
            f"A section eigenvalue lies within {SINGULAR_MARGIN:g} of E={energy}"
        )
    banded = np.zeros((3, section.size), dtype=np.float64)
    banded[0, 1:] = section.offdiag
    banded[1] = section.diag - energy
    banded[2, :-1] = section.offdiag
    source = np.zeros(section.size, dtype=np.float64)
    source[m - lo] = 1.0
    try:
        column: FloatArray = scipy.linalg.solve_banded((1, 1), banded, source)
    except np.linalg.LinAlgError as exception:  # pragma: no cover
        raise errors.SingularSystem(f"H - E is singular at E={energy}") from exception
    return column


def inverse_iteration(
    section: FiniteSection, eigenvalue: float, sweeps: int = 3
) -> FloatArray:
    """A unit eigenvector for an already accurate eigenvalue."""
    vector = np.ones(section.size, dtype=np.float64) / math.sqrt(section.size)
    shifted = section.diag - eigenvalue
    for _ in range(sweeps):
        vector = _thomas_solve(shifted, section.offdiag, vector)
        vector /= np.linalg.norm(vector)
    return vector


def cluster_radius(eigenvalues: FloatArray, tol: float) -> float:
    """The half-width ``max(tol, (pi/2) * mean spacing)`` of an eigenvalue cluster.

    Example:
        >>> cluster_radius(np.array([-1.0, 0.0, 1.0]), 1e-10) == math.pi / 2
        True
    """
    mean_spacing = 0.0
    if len(eigenvalues) > 1:
        mean_spacing = float(eigenvalues[-1] - eigenvalues[0]) / (len(eigenvalues) - 1)
    return max(tol, 0.5 * math.pi * mean_spacing)


def _apriori_rate(eta: float, bound_constant: float) -> float:
    """``kappa = (eta / K) c`` where ``c`` solves ``2 c exp(kappa) = 1/2``."""
    low, high = 0.0, 0.25
    for _ in range(100):
        middle = 0.5 * (low + high)
        if 2.0 * middle * math.exp(eta * middle / bound_constant) < 0.5:
            low = middle
        else:
            high = middle
    return eta * low / bound_constant


def combes_thomas_check(
    coeffs: CoefficientWindow,
    energy: float,
    lo: int,
    hi: int,
    m: int,
    tol: float = 1e-10,
) -> CombesThomasReport:
    """Check the exponential decay bound ``|G(n, m)| <= (2/eta) exp(-kappa |n - m|)``.

    The decay rate is fitted by least squares over distances in the
    middle half of the checked range, skipping ``|n - m| <= 2``.

    ``E`` counts as inside the spectrum when it sits between two
    consecutive section eigenvalues no further apart than twice the
    cluster radius, that is inside one band of the finite-section
    estimate. Energies in a wider gap or beyond the extreme eigenvalues
    are accepted however small ``eta`` is, as long as it exceeds ``tol``.

    Raises:
        InSpectrum: If ``eta <= tol`` or ``E`` lies inside a band.
    """
    section = FiniteSection.from_coefficients(coeffs, lo, hi)
    eigenvalues = eigenvalues_bisection(section, tol)
    eta = float(np.min(np.abs(eigenvalues - energy)))
    above = int(np.searchsorted(eigenvalues, energy))
    inside_band = 0 < above < section.size and bool(
        eigenvalues[above] - eigenvalues[above - 1]
        <= 2.0 * cluster_radius(eigenvalues, tol)
    )
    if eta <= tol or inside_band:
        raise errors.InSpectrum(
            f"E={energy} lies in the section spectrum, {eta:.3g} from an eigenvalue"
        )
    column = np.abs(greens_function(coeffs, energy, lo, hi, m))
    distances = np.abs(np.arange(lo, hi + 1) - m)
    reach = int(distances.max())
    fitted = (
        (distances >= reach / 4)
        & (distances <= 3 * reach / 4)
        & (distances > 2)
        & (column > 0)
    )
    kappa_fit = math.nan
    if np.count_nonzero(fitted) >= 2:
        slope, _ = np.polyfit(distances[fitted], np.log(column[fitted]), 1)
        kappa_fit = float(-slope)

    prefactor = 2.0 / eta
    off_site = (distances > 0) & (column > 0)
    kappa_bound = math.inf
    if np.any(off_site):
        rates = (math.log(prefactor) - np.log(column[off_site])) / distances[off_site]
        kappa_bound = float(np.min(rates))
    bound_satisfied = bool(column[distances == 0][0] <= prefactor and kappa_bound > 0)

    kappa_apriori = _apriori_rate(eta, section.bound_constant)
    apriori_bound_satisfied = bool(
        np.all(column <= prefactor * np.exp(-kappa_apriori * distances))
    )
    logger.debug(
        "Combes-Thomas at E=%g: eta=%g kappa_fit=%g kappa_bound=%g",
        energy,
        eta,
        kappa_fit,
        kappa_bound,
    )
    return CombesThomasReport(
        eta=eta,
        kappa_fit=kappa_fit,
        kappa_bound=kappa_bound,
        bound_satisfied=bound_satisfied,
        kappa_apriori=kappa_apriori,
        apriori_bound_satisfied=apriori_bound_satisfied,
    )


def weyl_residual(
    coeffs: CoefficientWindow, energy: float, u0: float, u1: float, length: int
) -> float:
    """The Weyl quotient ``||(H - E) u_l|| / ||u_l||`` of a truncated solution.

    ``u_l`` is the solution through ``(u0, u1)`` cut to ``[-l, l]``.

    Raises:
        OverflowGuard: If the solution exceeds ``1e300`` before site
            ``l``, a sign that ``E`` is off the spectrum.
    """
    if length < 2:
        raise errors.PreconditionError(f"l must be at least 2, got {length}")
    if u0 == 0 and u1 == 0:
        raise errors.PreconditionError("The initial condition must be nonzero")
    solution = solve_difference_equation(
        coeffs,
        energy,
        u0,
        u1,
        lo=-length,
        hi=length,
        overflow_limit=OVERFLOW_LIMIT,
    )
    truncated = solution.u / np.max(np.abs(solution.u))
    image = apply_operator(truncated, coeffs, -length - 1, length + 1, u_lo=-length)
    image -= energy * _padded(truncated, -length, -length - 1, length + 1)
    return float(np.linalg.norm(image) / np.linalg.norm(truncated))


def condition_a_probe(
    coeffs: CoefficientWindow, max_period: int, probe_length: int
) -> Optional[int]:
    """Look for a period of the coefficient pairs ``(a(n), b(n))``, ``n = 0..L-1``.

    No period means the aperiodicity of the orbit survives sampling at
    this scale.
    """
    if probe_length < 2 * max_period:
        raise errors.PreconditionError(
            f"probe_length must be at least 2 * max_period, got {probe_length}"
        )
    pairs = np.column_stack(
        (coeffs.a_range(0, probe_length - 1), coeffs.b_range(0, probe_length - 1))
    )
    return subshift.smallest_period(pairs, max_period)


def section_bounds(center: int, size: int) -> Tuple[int, int]:
    """The sites ``lo..hi`` of a section of ``size`` sites around ``center``."""
    lo = center - size // 2
    return lo, lo + size - 1
