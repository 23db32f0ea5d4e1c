"""Command-line interface."""
import logging
from pathlib import Path
from typing import Optional, Tuple

import typer
from rich import traceback

from aperiodic_spectra import _color_typer, _logging, config, parameters, pipelines
from aperiodic_spectra.config import ExperimentConfig

app = _color_typer.ColorTyper(
    help="Spectra of Jacobi operators over subshifts.", no_args_is_help=True
)
traceback.install(theme="ansi_dark")
logger = logging.getLogger(__name__)


def _prepare(
    config_path: Path, out: Optional[Path], seed: Optional[int]
) -> Tuple[ExperimentConfig, Path]:
    """Load the configuration and settle the output directory."""
    experiment = config.load_config(config_path, seed=seed)
    out_dir = out if out is not None else experiment.output_dir
    logger.info("Writing artifacts to %s", out_dir)
    return experiment, out_dir


@app.callback()
def main(
    verbose: bool = parameters.verbose_option,
    version: Optional[bool] = parameters.version_option,
) -> None:
    """Numerics for spectra of ergodic Jacobi operators."""
    _logging.configure_logging(verbose)


@app.command()
def orbit(
    config_path: Path = parameters.config_option,
    out: Optional[Path] = parameters.out_option,
    seed: Optional[int] = parameters.seed_option,
) -> None:
    """Export an orbit with its factor complexity and detected periods."""
    experiment, out_dir = _prepare(config_path, out, seed)
    pipelines.run_orbit(experiment, out_dir)


@app.command()
def lyapunov(
    config_path: Path = parameters.config_option,
    out: Optional[Path] = parameters.out_option,
    threads: int = parameters.threads_option,
    seed: Optional[int] = parameters.seed_option,
) -> None:
    """Export the Lyapunov curve over the energy grid and uniformity reports."""
    experiment, out_dir = _prepare(config_path, out, seed)
    pipelines.run_lyapunov(experiment, out_dir, threads=threads)


@app.command()
def spectrum(
    config_path: Path = parameters.config_option,
    out: Optional[Path] = parameters.out_option,
    threads: int = parameters.threads_option,
    seed: Optional[int] = parameters.seed_option,
) -> None:
    """Estimate the spectrum twice, compare the estimates and follow the measure."""
    experiment, out_dir = _prepare(config_path, out, seed)
    pipelines.run_spectrum(experiment, out_dir, threads=threads)


@app.command()
def boshernitzan(
    config_path: Path = parameters.config_option,
    out: Optional[Path] = parameters.out_option,
    seed: Optional[int] = parameters.seed_option,
) -> None:
    """Export n times the smallest cylinder frequency for each word length n."""
    experiment, out_dir = _prepare(config_path, out, seed)
    pipelines.run_boshernitzan(experiment, out_dir)


@app.command("combes-thomas")
def combes_thomas(
    energy: float = parameters.energy_option,
    config_path: Path = parameters.config_option,
    out: Optional[Path] = parameters.out_option,
    seed: Optional[int] = parameters.seed_option,
) -> None:
    """Check the exponential decay of the Green's function at an energy."""
    experiment, out_dir = _prepare(config_path, out, seed)
    pipelines.run_combes_thomas(experiment, out_dir, energy)


@app.command()
def uniformity(
    config_path: Path = parameters.config_option,
    out: Optional[Path] = parameters.out_option,
    seed: Optional[int] = parameters.seed_option,
) -> None:
    """Export the spread of Lyapunov estimates over base offsets."""
    experiment, out_dir = _prepare(config_path, out, seed)
    pipelines.run_uniformity(experiment, out_dir)


typer_click_object = typer.main.get_command(app)
if __name__ == "__main__":
    typer_click_object()  # pragma: no cover
