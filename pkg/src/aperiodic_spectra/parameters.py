"""Command line interface parameters."""
from typing import Optional

import typer

from aperiodic_spectra import __version__


def version_callback(value: Optional[bool] = None) -> None:
    """Return the package version.

    Args:
        value (bool): Whether to return the version.

    Raises:
        Exit: Exits the command line interface with an exit code of 0.
    """
    if value:
        typer.echo(f"aperiodic-spectra {__version__}")
        raise typer.Exit()


def _threads_callback(threads: int) -> int:
    """Reject thread counts below one."""
    if threads < 1:
        raise typer.BadParameter("must be at least 1")
    return threads


config_option = typer.Option(
    ...,
    "--config",
    "-c",
    help="The JSON experiment configuration.",
    exists=True,
    file_okay=True,
    dir_okay=False,
    readable=True,
    envvar="APERIODIC_SPECTRA_CONFIG",
)
out_option = typer.Option(
    None,
    "--out",
    "-o",
    help="The directory artifacts are written to."
    " Defaults to the output_dir of the configuration.",
    file_okay=False,
    dir_okay=True,
    envvar="APERIODIC_SPECTRA_OUT",
)
threads_option = typer.Option(
    1,
    "--threads",
    "-t",
    help="The number of worker threads energy grids are split across."
    " Outputs do not depend on it.",
    envvar="APERIODIC_SPECTRA_THREADS",
    callback=_threads_callback,
)
seed_option = typer.Option(
    None,
    "--seed",
    "-s",
    help="Seed for randomized base offsets, overriding the configuration.",
    min=0,
    envvar="APERIODIC_SPECTRA_SEED",
)
energy_option = typer.Option(
    ...,
    "--energy",
    "-e",
    help="The energy E the Green's function is evaluated at.",
)
verbose_option = typer.Option(
    False,
    "--verbose",
    "-v",
    help="Log debug details of every stage.",
    envvar="APERIODIC_SPECTRA_VERBOSE",
)
version_option = typer.Option(
    None,
    "--version",
    "-V",
    help="Display the version and exit.",
    callback=version_callback,
    is_eager=True,
)
