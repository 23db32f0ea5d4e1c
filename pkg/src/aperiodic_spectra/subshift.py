"""Symbolic orbits of subshifts and their word statistics."""
import dataclasses
import itertools
import logging
import math
from typing import (
    Dict,
    Hashable,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import numpy as np
import numpy.typing as npt

from aperiodic_spectra import errors

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
Symbols = npt.NDArray[np.int64]

MAX_ITERATIONS = 64
LEGALITY_SCAN_LENGTH = 10_000
MIN_SAMPLING_RATIO = 10


@dataclasses.dataclass(frozen=True)
class Alphabet:
    """An ordered finite alphabet.

    Symbols are stored as indices; the labels are only used for input
    and output.

    Args:
        labels: The distinct labels, in index order.
    """

    labels: Tuple[Hashable, ...]

    def __post_init__(self) -> None:
        """Check the labels are usable."""
        if not self.labels:
            raise errors.PreconditionError("An alphabet needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise errors.PreconditionError(
                f"Alphabet labels must be distinct, got {self.labels!r}"
            )

    @property
    def size(self) -> int:
        """The number of letters."""
        return len(self.labels)

    def index(self, label: Hashable) -> int:
        """Return the index of a label."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise errors.PreconditionError(
                f"{label!r} is not in the alphabet {self.labels!r}"
            ) from None

    def encode(self, labels: Iterable[Hashable]) -> Word:
        """Translate a sequence of labels into a word."""
        return tuple(self.index(label) for label in labels)

    def decode(self, word: Iterable[int]) -> Tuple[Hashable, ...]:
        """Translate a word into its labels."""
        return tuple(self.labels[index] for index in word)


@dataclasses.dataclass(frozen=True)
class Substitution:
    """A substitution rule set together with a two-sided seed.

    Args:
        alphabet: The alphabet the rules act on.
        images: The image of every letter, indexed like the alphabet.
        seed: The pair ``(s_left, s_right)`` sitting at positions -1
            and 0.
    """

    alphabet: Alphabet
    images: Tuple[Word, ...]
    seed: Tuple[int, int]

    def __post_init__(self) -> None:
        """Check every letter has a nonempty image."""
        if len(self.images) != self.alphabet.size:
            raise errors.PreconditionError(
                "A substitution needs exactly one image per letter"
            )
        for letter, image in enumerate(self.images):
            if not image:
                raise errors.PreconditionError(
                    f"The image of {self.alphabet.labels[letter]!r} is empty"
                )
            if any(not 0 <= symbol < self.alphabet.size for symbol in image):
                raise errors.PreconditionError(
                    f"The image of {self.alphabet.labels[letter]!r} leaves the alphabet"
                )
        if any(not 0 <= symbol < self.alphabet.size for symbol in self.seed):
            raise errors.PreconditionError("The seed leaves the alphabet")

    @classmethod
    def from_labels(
        cls,
        rules: Dict[str, Sequence[Hashable]],
        seed: Tuple[Hashable, Hashable],
    ) -> "Substitution":
        """Create a substitution from label rules such as ``{"a": "ab"}``."""
        alphabet = Alphabet(tuple(rules))
        images = tuple(alphabet.encode(rules[label]) for label in alphabet.labels)
        encoded_seed = (alphabet.index(seed[0]), alphabet.index(seed[1]))
        return cls(alphabet, images=images, seed=encoded_seed)

    def apply(self, word: Sequence[int], times: int = 1) -> List[int]:
        """Apply the substitution ``times`` times to a word."""
        image = list(word)
        for _ in range(times):
            image = list(
                itertools.chain.from_iterable(self.images[symbol] for symbol in image)
            )
        return image


@dataclasses.dataclass(frozen=True)
class Sturmian:
    """A rotation coding ``1`` on ``[1 - alpha, 1)`` and ``0`` elsewhere."""

    alpha: float
    theta: float = 0.0
    alphabet: Alphabet = dataclasses.field(default=Alphabet(("0", "1")), init=False)

    def __post_init__(self) -> None:
        """Check the rotation parameters."""
        if not 0.0 < self.alpha < 1.0:
            raise errors.PreconditionError(
                f"Sturmian alpha must lie in (0, 1), got {self.alpha}"
            )
        if not 0.0 <= self.theta < 1.0:
            raise errors.PreconditionError(
                f"Sturmian theta must lie in [0, 1), got {self.theta}"
            )


@dataclasses.dataclass(frozen=True)
class Periodic:
    """The two-sided repetition of a single word."""

    alphabet: Alphabet
    word: Word

    def __post_init__(self) -> None:
        """Check the word is nonempty."""
        if not self.word:
            raise errors.PreconditionError("A periodic word needs at least one letter")

    @classmethod
    def from_labels(cls, word: Sequence[Hashable]) -> "Periodic":
        """Create a periodic generator, the alphabet in order of appearance."""
        labels = tuple(dict.fromkeys(word))
        alphabet = Alphabet(labels)
        return cls(alphabet, word=alphabet.encode(word))


SubshiftSpec = Union[Substitution, Sturmian, Periodic]


@dataclasses.dataclass(frozen=True, eq=False)
class OrbitWindow:
    """A finite two-sided sample of a subshift point.

    ``symbols[i]`` holds the letter at site ``lo + i``. Windows are
    immutable; growing a window regenerates it from ``spec``.

    Args:
        lo: The site of the first symbol.
        symbols: The letters, as alphabet indices.
        spec: The generator the window came from.
        shift: How many times the shift was applied to the generated
            point.
    """

    lo: int
    symbols: Symbols
    spec: SubshiftSpec
    shift: int = 0

    def __post_init__(self) -> None:
        """Freeze the symbol array."""
        self.symbols.setflags(write=False)

    @property
    def alphabet(self) -> Alphabet:
        """The alphabet of the generator."""
        return self.spec.alphabet

    @property
    def hi(self) -> int:
        """The site of the last symbol."""
        return self.lo + len(self.symbols) - 1

    @property
    def center_offset(self) -> int:
        """The offset written in orbit exports, the site of the first symbol."""
        return self.lo

    def __len__(self) -> int:
        """The number of symbols in the window."""
        return len(self.symbols)

    def covers(self, lo: int, hi: int) -> bool:
        """Whether sites ``lo..hi`` are inside the window."""
        return self.lo <= lo and hi <= self.hi

    def at(self, site: int) -> int:
        """The letter at one site."""
        if not self.covers(site, site):
            raise errors.CoverageError(
                f"Site {site} is outside the orbit window [{self.lo}, {self.hi}]"
            )
        return int(self.symbols[site - self.lo])

    def sites(self, lo: int, hi: int) -> Symbols:
        """The letters at sites ``lo..hi``, extending the window if needed."""
        window = self if self.covers(lo, hi) else self.extend(max(abs(lo), abs(hi)))
        return window.symbols[lo - window.lo : hi - window.lo + 1]

    def extend(self, radius: int) -> "OrbitWindow":
        """Regenerate the window so it covers at least ``[-radius, radius]``."""
        radius = max(radius, -self.lo, self.hi)
        grown = build_orbit(self.spec, radius + abs(self.shift))
        return grown.shifted(self.shift).restrict(radius)

    def restrict(self, radius: int) -> "OrbitWindow":
        """Cut the window down to ``[-radius, radius]``."""
        if not self.covers(-radius, radius):
            raise errors.CoverageError(
                f"Window [{self.lo}, {self.hi}] does not cover radius {radius}"
            )
        start = -radius - self.lo
        symbols = self.symbols[start : start + 2 * radius + 1].copy()
        return dataclasses.replace(self, lo=-radius, symbols=symbols)

    def shifted(self, steps: int = 1) -> "OrbitWindow":
        """Apply the shift ``steps`` times, so site ``n`` reads ``omega(n + steps)``."""
        return dataclasses.replace(
            self,
            lo=self.lo - steps,
            symbols=self.symbols.copy(),
            shift=self.shift + steps,
        )

    def labels(self) -> Tuple[Hashable, ...]:
        """The window as alphabet labels."""
        return self.alphabet.decode(self.symbols)


class CylinderStats(NamedTuple):
    """Occurrence counts of the length-``n`` factors in a sample."""

    n: int
    counts: Dict[Word, int]
    sample_length: int

    @property
    def total(self) -> int:
        """The number of factor positions, ``L - n + 1``."""
        return self.sample_length - self.n + 1

    def frequency(self, word: Word) -> float:
        """The empirical measure of the cylinder of ``word``."""
        return self.counts.get(word, 0) / self.total

    def frequencies(self) -> Dict[Word, float]:
        """All nonzero empirical cylinder measures."""
        return {word: count / self.total for word, count in self.counts.items()}

    def min_frequency(self) -> float:
        """The smallest observed cylinder measure."""
        return min(self.counts.values()) / self.total


class BoshernitzanTerm(NamedTuple):
    """One term ``n * eta(n)`` of the Boshernitzan sequence."""

    n: int
    eta: float
    n_eta: float


def _first_return_power(
    substitution: Substitution, letter: int, end: int, side: str
) -> int:
    """Smallest power whose image of ``letter`` has ``letter`` at ``end``."""
    current = letter
    for power in range(1, substitution.alphabet.size + 1):
        current = substitution.images[current][end]
        if current == letter:
            return power
    raise errors.NonExtendableSeed(
        f"{substitution.alphabet.labels[letter]!r} never returns to the {side}"
        " end of its own image, so it seeds no fixed point"
    )


def _grow(
    substitution: Substitution, letter: int, power: int, length: int
) -> List[int]:
    """Iterate a power of the substitution on a letter until long enough."""
    word = [letter]
    for _ in range(MAX_ITERATIONS):
        if length <= len(word):
            return word
        image = substitution.apply(word, times=power)
        if len(image) <= len(word):
            break
        word = image
    if length <= len(word):
        return word
    raise errors.BudgetExceeded(
        f"Fixed point from {substitution.alphabet.labels[letter]!r} stays shorter"
        f" than {length} after {MAX_ITERATIONS} iterations"
    )


def _legal_pairs(substitution: Substitution) -> Set[Tuple[int, int]]:
    """Two-letter factors of the iterated images of every letter."""
    pairs: Set[Tuple[int, int]] = set()
    for letter in range(substitution.alphabet.size):
        word = [letter]
        for _ in range(MAX_ITERATIONS):
            pairs.update(zip(word, word[1:]))
            image = substitution.apply(word)
            if len(image) <= len(word) or LEGALITY_SCAN_LENGTH < len(word):
                break
            word = image
    return pairs


def build_substitution_orbit(substitution: Substitution, radius: int) -> OrbitWindow:
    """Sample a two-sided fixed point of a substitution.

    Sites ``0..N`` are a prefix of the one-sided fixed point grown from
    ``s_right`` and sites ``-N..-1`` a suffix of the left fixed point grown
    from ``s_left``.

    Args:
        substitution: The rules and seed pair.
        radius: The radius ``N`` of the window.

    Returns:
        OrbitWindow: The symbols at sites ``-N..N``.

    Raises:
        NonExtendableSeed: If the seed pair never occurs in an iterated
            image, or a seed letter generates no fixed point.
        BudgetExceeded: If the fixed point stops growing before it is
            long enough.

    Example:
        >>> fibonacci = Substitution.from_labels({"a": "ab", "b": "a"}, ("b", "a"))
        >>> "".join(build_substitution_orbit(fibonacci, 6).labels()[6:])
        'abaabab'
    """
    if radius < 0:
        raise errors.PreconditionError(f"Radius must be nonnegative, got {radius}")
    left, right = substitution.seed
    if (left, right) not in _legal_pairs(substitution):
        labels = substitution.alphabet.decode((left, right))
        raise errors.NonExtendableSeed(
            f"Seed pair {labels!r} never occurs in an iterated image"
        )
    right_power = _first_return_power(substitution, right, end=0, side="left")
    left_power = _first_return_power(substitution, left, end=-1, side="right")
    right_side = _grow(substitution, right, right_power, radius + 1)[: radius + 1]
    left_side = _grow(substitution, left, left_power, radius)
    left_side = left_side[len(left_side) - radius :] if radius else []
    logger.debug(
        "Grew substitution fixed point with powers %d/%d", left_power, right_power
    )
    symbols = np.array(left_side + right_side, dtype=np.int64)
    return OrbitWindow(-radius, symbols=symbols, spec=substitution)


def build_sturmian_orbit(sturmian: Sturmian, radius: int) -> OrbitWindow:
    """Sample the rotation coding ``omega(n) = [frac(n alpha + theta) >= 1 - alpha]``.

    Example:
        >>> build_sturmian_orbit(Sturmian(0.3, 0.95), 1).labels()
        ('0', '1', '0')
    """
    if radius < 0:
        raise errors.PreconditionError(f"Radius must be nonnegative, got {radius}")
    sites = np.arange(-radius, radius + 1, dtype=np.float64)
    phases = np.mod(sites * sturmian.alpha + sturmian.theta, 1.0)
    symbols = (phases >= 1.0 - sturmian.alpha).astype(np.int64)
    return OrbitWindow(-radius, symbols=symbols, spec=sturmian)


def build_periodic_orbit(periodic: Periodic, radius: int) -> OrbitWindow:
    """Sample ``omega(n) = word[n mod |word|]``."""
    if radius < 0:
        raise errors.PreconditionError(f"Radius must be nonnegative, got {radius}")
    sites = np.arange(-radius, radius + 1)
    word = np.array(periodic.word, dtype=np.int64)
    symbols = word[np.mod(sites, len(word))]
    return OrbitWindow(-radius, symbols=symbols, spec=periodic)


def build_orbit(spec: SubshiftSpec, radius: int) -> OrbitWindow:
    """Sample any generator on ``[-radius, radius]``."""
    if isinstance(spec, Substitution):
        return build_substitution_orbit(spec, radius)
    elif isinstance(spec, Sturmian):
        return build_sturmian_orbit(spec, radius)
    elif isinstance(spec, Periodic):
        return build_periodic_orbit(spec, radius)
    else:
        raise TypeError(f"{spec!r} is not a subshift generator")


def _sample(orbit: OrbitWindow, sample_length: int) -> Symbols:
    """The first ``sample_length`` symbols ``omega(0..L-1)``."""
    return orbit.sites(0, sample_length - 1)


def _factor_counts(sample: Symbols, n: int) -> Dict[Word, int]:
    """Count every length-``n`` factor of a sample."""
    windows = np.lib.stride_tricks.sliding_window_view(sample, n)
    rows, counts = np.unique(windows, axis=0, return_counts=True)
    return {
        tuple(int(symbol) for symbol in row): int(count)
        for row, count in zip(rows, counts)
    }


def words_of_length(orbit: OrbitWindow, n: int, sample_length: int) -> Set[Word]:
    """The distinct length-``n`` factors of ``omega(0..L-1)``.

    The size of the result is the empirical complexity.

    Args:
        orbit: The orbit to read, extended when too short.
        n: The word length.
        sample_length: The number of symbols ``L`` to read.

    Returns:
        Set[Word]: The observed factors.

    Raises:
        PreconditionError: Unless ``L >= n >= 1``.
    """
    if not 1 <= n <= sample_length:
        raise errors.PreconditionError(
            f"Need sample_length >= n >= 1, got n={n}, L={sample_length}"
        )
    return set(_factor_counts(_sample(orbit, sample_length), n))


def cylinder_frequencies(
    orbit: OrbitWindow, n: int, sample_length: int
) -> CylinderStats:
    """Birkhoff counts of the length-``n`` cylinders along ``omega(0..L-1)``.

    Args:
        orbit: The orbit to read, extended when too short.
        n: The word length.
        sample_length: The number of symbols ``L`` to read, at least
            ``10 n``.

    Returns:
        CylinderStats: The occurrence counts.

    Raises:
        PreconditionError: If ``L < 10 n`` or ``n < 1``.
    """
    if n < 1 or sample_length < MIN_SAMPLING_RATIO * n:
        raise errors.PreconditionError(
            f"Need n >= 1 and sample_length >= {MIN_SAMPLING_RATIO} n,"
            f" got n={n}, L={sample_length}"
        )
    counts = _factor_counts(_sample(orbit, sample_length), n)
    return CylinderStats(n, counts=counts, sample_length=sample_length)


def boshernitzan_sequence(
    orbit: OrbitWindow, n_max: int, sample_length: int
) -> List[BoshernitzanTerm]:
    """Tabulate ``n * eta(n)`` for ``n = 1..n_max``.

    ``eta(n)`` is the smallest empirical frequency among the observed
    length-``n`` factors.
    """
    if n_max < 1 or sample_length < MIN_SAMPLING_RATIO * n_max:
        raise errors.PreconditionError(
            f"Need n_max >= 1 and sample_length >= {MIN_SAMPLING_RATIO} n_max,"
            f" got n_max={n_max}, L={sample_length}"
        )
    sample = _sample(orbit, sample_length)
    terms = []
    for n in range(1, n_max + 1):
        stats = CylinderStats(n, _factor_counts(sample, n), sample_length)
        eta = stats.min_frequency()
        terms.append(BoshernitzanTerm(n, eta=eta, n_eta=n * eta))
    return terms


def smallest_period(values: npt.NDArray[np.generic], max_period: int) -> Optional[int]:
    """The smallest period ``m <= max_period`` of ``values``."""
    for period in range(1, min(max_period, len(values) - 1) + 1):
        if np.array_equal(values[period:], values[:-period]):
            return period
    return None


def detect_period(
    orbit: OrbitWindow, max_period: int, probe_length: int
) -> Optional[int]:
    """Look for a period of ``omega`` on the probe window ``0..probe_length-1``.

    An absent period is evidence of aperiodicity at this scale, never a
    proof.

    Example:
        >>> alternating = build_periodic_orbit(Periodic.from_labels("ab"), 10)
        >>> detect_period(alternating, max_period=5, probe_length=10)
        2
    """
    if probe_length < 2 * max_period:
        raise errors.PreconditionError(
            f"probe_length must be at least 2 * max_period, got {probe_length}"
        )
    return smallest_period(_sample(orbit, probe_length), max_period)


def golden_alpha() -> float:
    """The inverse golden ratio ``(sqrt 5 - 1) / 2``."""
    return (math.sqrt(5.0) - 1.0) / 2.0
