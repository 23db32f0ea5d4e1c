"""Experiment configuration files."""
import dataclasses
import json
import logging
import pathlib
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import jsonschema
import numpy as np

from aperiodic_spectra import errors, subshift
from aperiodic_spectra.jacobi import SamplingFunctions
from aperiodic_spectra.option_values import SubshiftKind
from aperiodic_spectra.spectrum import EnergyGrid, RefinementOrder
from aperiodic_spectra.subshift import Periodic, Sturmian, Substitution, SubshiftSpec

logger = logging.getLogger(__name__)

_WORD = {
    "oneOf": [
        {"type": "string", "minLength": 1},
        {"type": "array", "minItems": 1, "items": {"type": ["string", "number"]}},
    ]
}
_SAMPLING_VALUES = {
    "oneOf": [
        {"type": "number"},
        {"type": "object", "additionalProperties": {"type": "number"}},
    ]
}
_POSITIVE_INT = {"type": "integer", "minimum": 1}

SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "aperiodic-spectra experiment",
    "type": "object",
    "required": ["subshift", "sampling"],
    "additionalProperties": False,
    "properties": {
        "subshift": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": [kind.value for kind in SubshiftKind]},
                "rules": {
                    "type": "object",
                    "minProperties": 1,
                    "additionalProperties": _WORD,
                },
                "seed": {"type": "array", "minItems": 2, "maxItems": 2},
                "alpha": {
                    "oneOf": [
                        {
                            "type": "number",
                            "exclusiveMinimum": 0,
                            "exclusiveMaximum": 1,
                        },
                        {
                            "type": "array",
                            "minItems": 1,
                            "items": {"type": "integer", "minimum": 0},
                        },
                        {"const": "golden"},
                    ]
                },
                "theta": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "word": _WORD,
            },
            "allOf": [
                {
                    "if": {"properties": {"kind": {"const": "substitution"}}},
                    "then": {"required": ["rules", "seed"]},
                },
                {
                    "if": {"properties": {"kind": {"const": "sturmian"}}},
                    "then": {"required": ["alpha"]},
                },
                {
                    "if": {"properties": {"kind": {"const": "periodic"}}},
                    "then": {"required": ["word"]},
                },
            ],
        },
        "sampling": {
            "type": "object",
            "required": ["p", "q"],
            "additionalProperties": False,
            "properties": {
                "window_radius": {"type": "integer", "minimum": 0},
                "p": _SAMPLING_VALUES,
                "q": _SAMPLING_VALUES,
            },
        },
        "grid": {
            "type": "object",
            "required": ["step"],
            "additionalProperties": False,
            "properties": {
                "lo": {"type": "number"},
                "hi": {"type": "number"},
                "step": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "n_steps": {"type": "integer", "minimum": 100},
        "base_offsets": {
            "oneOf": [
                {"type": "array", "minItems": 1, "items": {"type": "integer"}},
                {
                    "type": "object",
                    "required": ["count"],
                    "additionalProperties": False,
                    "properties": {"count": _POSITIVE_INT, "range": _POSITIVE_INT},
                },
            ]
        },
        "sizes": {"type": "array", "minItems": 1, "items": _POSITIVE_INT},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "orders": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["grid_step", "n_steps"],
                "additionalProperties": False,
                "properties": {
                    "grid_step": {"type": "number", "exclusiveMinimum": 0},
                    "n_steps": {"type": "integer", "minimum": 100},
                },
            },
        },
        "isolation_eps": {"type": "number", "exclusiveMinimum": 0},
        "orbit_radius": {"type": "integer", "minimum": 0},
        "complexity_max": _POSITIVE_INT,
        "cylinder_length": _POSITIVE_INT,
        "boshernitzan": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"n_max": _POSITIVE_INT, "sample_length": _POSITIVE_INT},
        },
        "combes_thomas": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "radius": {"type": "integer", "minimum": 3},
                "m": {"type": "integer"},
            },
        },
        "uniformity": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "energies": {"type": "array", "items": {"type": "number"}},
                "n_list": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "integer"},
                },
            },
        },
        "output_dir": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
    },
}


def continued_fraction(terms: Sequence[int]) -> float:
    """Evaluate ``[a0; a1, a2, ...]`` from the tail.

    Example:
        >>> round(continued_fraction([0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]), 4)
        0.618
    """
    value = float(terms[-1])
    for term in reversed(terms[:-1]):
        if value == 0:
            raise errors.ConfigError(
                "Continued-fraction terms after a0 must be positive"
            )
        value = term + 1.0 / value
    return value


def _parse_alpha(alpha: Union[float, str, List[int]]) -> float:
    """Read a rotation number given as a decimal, a continued fraction or a preset."""
    if alpha == "golden":
        return subshift.golden_alpha()
    if isinstance(alpha, list):
        return continued_fraction(alpha)
    return float(alpha)


def _labels(word: Union[str, Sequence[Any]]) -> Tuple[Any, ...]:
    """A word given as a string of one-character labels or a list of labels."""
    return tuple(word)


def _parse_subshift(data: Mapping[str, Any]) -> SubshiftSpec:
    """Build the generator described by the ``subshift`` section."""
    kind = SubshiftKind(data["kind"])
    if kind is SubshiftKind.SUBSTITUTION:
        rules = {label: _labels(image) for label, image in data["rules"].items()}
        return Substitution.from_labels(rules, seed=tuple(data["seed"]))
    if kind is SubshiftKind.STURMIAN:
        theta = float(data.get("theta", 0.0))
        return Sturmian(_parse_alpha(data["alpha"]), theta=theta)
    return Periodic.from_labels(_labels(data["word"]))


def _parse_sampling(
    data: Mapping[str, Any], alphabet: subshift.Alphabet
) -> SamplingFunctions:
    """Build the sampling functions described by the ``sampling`` section."""
    window_radius = data.get("window_radius", 0)
    p, q = data["p"], data["q"]
    if window_radius == 0:
        return SamplingFunctions.from_symbol_values(
            alphabet, p=_letter_keys(p, alphabet), q=_letter_keys(q, alphabet)
        )
    if not isinstance(p, Mapping) or not isinstance(q, Mapping):
        raise errors.ConfigError("Windowed sampling needs explicit p and q tables")
    return SamplingFunctions.from_label_tables(
        alphabet,
        window_radius,
        p={_labels(word): value for word, value in p.items()},
        q={_labels(word): value for word, value in q.items()},
    )


def _letter_keys(
    values: Union[float, Mapping[str, float]], alphabet: subshift.Alphabet
) -> Union[float, Dict[Any, float]]:
    """Match JSON object keys, always strings, to the alphabet labels."""
    if not isinstance(values, Mapping):
        return float(values)
    by_name = {str(label): label for label in alphabet.labels}
    try:
        return {by_name[key]: float(value) for key, value in values.items()}
    except KeyError as exception:
        raise errors.ConfigError(
            f"Sampling key {exception.args[0]!r} is not a letter of the alphabet"
        ) from None


def _parse_offsets(value: Any, seed: int) -> Tuple[int, ...]:
    """Explicit base offsets, or ``count`` distinct ones drawn with the seed."""
    if isinstance(value, list):
        return tuple(int(offset) for offset in value)
    count, spread = value["count"], value.get("range", 1000)
    if count > spread:
        raise errors.ConfigError(f"Cannot draw {count} distinct offsets from {spread}")
    generator = np.random.default_rng(seed)
    drawn = generator.choice(spread, size=count, replace=False)
    return tuple(sorted(int(offset) for offset in drawn))


@dataclasses.dataclass(frozen=True)
class GridSettings:
    """The ``grid`` section; missing bounds mean ``[-3K - 0.5, 3K + 0.5]``."""

    step: float
    lo: Optional[float] = None
    hi: Optional[float] = None

    def build(self, bound_constant: float) -> EnergyGrid:
        """The grid for sampling functions with bound constant ``K``."""
        if self.lo is None and self.hi is None:
            return EnergyGrid.auto(bound_constant, self.step)
        auto = EnergyGrid.auto(bound_constant, self.step)
        lo = auto.lo if self.lo is None else self.lo
        hi = auto.hi if self.hi is None else self.hi
        return EnergyGrid.uniform(lo, hi, self.step)


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment.

    Args:
        subshift: The orbit generator.
        sampling: The locally constant maps.
        grid: The energy grid settings.
        n_steps: The cocycle length.
        base_offsets: The base points of the cocycles.
        sizes: Finite-section sizes.
        tol: Bisection tolerance.
        orders: Refinement orders of the measure trend.
        isolation_eps: Isolation radius of the Cantor diagnostic.
        orbit_radius: Radius of exported orbits.
        complexity_max: Largest word length in complexity exports.
        cylinder_length: Word length of the cylinder export.
        n_max: Largest word length of the Boshernitzan sequence.
        sample_length: Sample length of the Boshernitzan sequence.
        combes_thomas_radius: Half-width of the Green's function section.
        combes_thomas_site: Source site of the Green's function.
        uniformity_energies: Energies of the uniformity report.
        uniformity_n_list: Lengths of the uniformity report.
        output_dir: Where artifacts go unless overridden.
        seed: Seed of every random choice.
        raw: The configuration as read, echoed into the manifest.
    """

    subshift: SubshiftSpec
    sampling: SamplingFunctions
    grid: GridSettings
    n_steps: int
    base_offsets: Tuple[int, ...]
    sizes: Tuple[int, ...]
    tol: float
    orders: Tuple[RefinementOrder, ...]
    isolation_eps: float
    orbit_radius: int
    complexity_max: int
    cylinder_length: int
    n_max: int
    sample_length: int
    combes_thomas_radius: int
    combes_thomas_site: int
    uniformity_energies: Tuple[float, ...]
    uniformity_n_list: Optional[Tuple[int, ...]]
    output_dir: Path
    seed: int
    raw: Mapping[str, Any]


def parse_config(
    data: Mapping[str, Any], seed: Optional[int] = None
) -> ExperimentConfig:
    """Validate a configuration mapping and build the experiment.

    Args:
        data: The decoded JSON document.
        seed: Overrides the ``seed`` of the document.

    Returns:
        ExperimentConfig: The experiment.

    Raises:
        ConfigError: If the document does not match the schema or
            violates a precondition of the modules.
    """
    validator = jsonschema.Draft7Validator(SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        location = "/".join(str(part) for part in error.absolute_path) or "<root>"
        raise errors.ConfigError(
            f"Invalid configuration at {location}: {error.message}"
        )
    run_seed = data.get("seed", 0) if seed is None else seed
    spec = _parse_subshift(data["subshift"])
    sampling = _parse_sampling(data["sampling"], spec.alphabet)
    grid = GridSettings(**data.get("grid", {"step": 0.01}))
    n_steps = data.get("n_steps", 1000)
    orders = tuple(
        RefinementOrder(order["grid_step"], order["n_steps"])
        for order in data.get("orders", [{"grid_step": grid.step, "n_steps": n_steps}])
    )
    sizes = tuple(data.get("sizes", [400]))
    if any(later <= earlier for earlier, later in zip(sizes, sizes[1:])):
        raise errors.ConfigError(f"sizes must increase, got {list(sizes)}")
    boshernitzan = data.get("boshernitzan", {})
    combes_thomas = data.get("combes_thomas", {})
    uniformity = data.get("uniformity", {})
    n_list = uniformity.get("n_list")
    config = ExperimentConfig(
        subshift=spec,
        sampling=sampling,
        grid=grid,
        n_steps=n_steps,
        base_offsets=_parse_offsets(data.get("base_offsets", {"count": 8}), run_seed),
        sizes=sizes,
        tol=data.get("tol", 1e-10),
        orders=orders,
        isolation_eps=data.get("isolation_eps", 0.05),
        orbit_radius=data.get("orbit_radius", 100),
        complexity_max=data.get("complexity_max", 20),
        cylinder_length=data.get("cylinder_length", 2),
        n_max=boshernitzan.get("n_max", 30),
        sample_length=boshernitzan.get("sample_length", 10_000),
        combes_thomas_radius=combes_thomas.get("radius", 30),
        combes_thomas_site=combes_thomas.get("m", 0),
        uniformity_energies=tuple(uniformity.get("energies", [0.0])),
        uniformity_n_list=tuple(n_list) if n_list is not None else None,
        output_dir=pathlib.Path(data.get("output_dir", "aperiodic-spectra-output")),
        seed=run_seed,
        raw=data,
    )
    logger.debug("Configuration with %d base offsets", len(config.base_offsets))
    return config


def load_config(path: Path, seed: Optional[int] = None) -> ExperimentConfig:
    """Read, validate and build the experiment in a JSON file."""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exception:
        raise errors.ConfigError(f"{path} is not valid JSON: {exception}") from None
    except OSError as exception:
        raise errors.ConfigError(f"Cannot read {path}: {exception.strerror}") from None
    if not isinstance(data, dict):
        raise errors.ConfigError(f"{path} must hold a JSON object")
    return parse_config(data, seed=seed)
