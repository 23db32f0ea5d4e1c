"""Writers for orbits, tables, reports and the run manifest."""
import contextlib
import csv
import dataclasses
import hashlib
import json
import logging
import math
import time
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Sequence

from aperiodic_spectra import __version__
from aperiodic_spectra.subshift import CylinderStats, OrbitWindow

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def format_value(value: Any) -> str:
    """Render a table cell, floats with 17 significant digits.

    Example:
        >>> format_value(0.1)
        '0.10000000000000001'
    """
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _jsonable(value: Any) -> Any:
    """Replace non-finite floats, which JSON cannot hold, by ``null``."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Mapping):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return value


def dumps(data: Any) -> str:
    """Serialize with sorted keys and a trailing newline."""
    return json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n"


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write an RFC 4180 table with a header row."""
    with path.open("w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\r\n")
        writer.writerow(header)
        writer.writerows([format_value(cell) for cell in row] for row in rows)
    return path


def write_json(path: Path, data: Any) -> Path:
    """Write a JSON document."""
    path.write_text(dumps(data), encoding="utf-8")
    return path


def write_orbit(path: Path, orbit: OrbitWindow) -> Path:
    """Write one label per line after an ``# offset=<lo>`` header."""
    lines = [f"# offset={orbit.center_offset}"]
    lines += [str(label) for label in orbit.labels()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def cylinder_rows(stats: CylinderStats, orbit: OrbitWindow) -> List[List[Any]]:
    """Rows ``word,count,frequency`` in word order."""
    return [
        [
            "".join(str(label) for label in orbit.alphabet.decode(word)),
            count,
            stats.frequency(word),
        ]
        for word, count in sorted(stats.counts.items())
    ]


def sha256(path: Path) -> str:
    """The hex SHA-256 digest of a file."""
    return hashlib.sha256(path.read_bytes()).hexdigest()


@dataclasses.dataclass
class RunManifest:
    """Records what a run wrote and how long each stage took.

    The manifest is written by :meth:`finish`, so it exists only for
    runs that completed.

    Args:
        out_dir: The output directory.
        config: The configuration echo.
        command: The subcommand that ran.
    """

    out_dir: Path
    config: Mapping[str, Any]
    command: str
    outputs: List[Path] = dataclasses.field(default_factory=list)
    timings: Dict[str, float] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        """Create the output directory."""
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        """Register an output file and return where to write it."""
        path = self.out_dir / name
        self.outputs.append(path)
        return path

    @contextlib.contextmanager
    def stage(self, name: str) -> Iterator[None]:
        """Time a stage and log one line when it ends."""
        start = time.perf_counter()
        yield
        elapsed = time.perf_counter() - start
        self.timings[name] = elapsed
        logger.info("%s finished in %.2f s", name, elapsed)

    def to_dict(self) -> Dict[str, Any]:
        """The manifest document."""
        return {
            "command": self.command,
            "config": self.config,
            "version": __version__,
            "outputs": {path.name: sha256(path) for path in self.outputs},
            "timings": self.timings,
        }

    def finish(self) -> Path:
        """Write ``manifest.json``."""
        return write_json(self.out_dir / MANIFEST_NAME, self.to_dict())


def verify_manifest(manifest_path: Path) -> List[str]:
    """The names of recorded outputs whose checksum no longer matches."""
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    directory = manifest_path.parent
    return [
        name
        for name, digest in manifest["outputs"].items()
        if not (directory / name).exists() or sha256(directory / name) != digest
    ]
