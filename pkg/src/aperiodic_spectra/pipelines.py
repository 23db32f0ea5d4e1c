"""The batch stages behind each subcommand."""
import logging
from pathlib import Path
from typing import Any, Dict, Sequence

from aperiodic_spectra import cocycle, export, jacobi, spectrum, subshift
from aperiodic_spectra.config import ExperimentConfig
from aperiodic_spectra.export import RunManifest
from aperiodic_spectra.jacobi import CoefficientWindow

logger = logging.getLogger(__name__)

PERIOD_SCAN_MAX = 50
PERIOD_SCAN_LENGTH = 500


def coefficients(config: ExperimentConfig, lo: int, hi: int) -> CoefficientWindow:
    """Generate the orbit and sample the coefficients on ``lo..hi``."""
    radius = max(abs(lo), abs(hi)) + config.sampling.window_radius
    orbit = subshift.build_orbit(config.subshift, radius)
    return jacobi.assemble_coefficients(orbit, config.sampling, lo, hi)


def _cocycle_sites(offsets: Sequence[int], n_steps: int) -> Dict[str, int]:
    """The coefficient range forward products of ``n_steps`` need."""
    return {"lo": min(0, min(offsets)), "hi": max(offsets) + n_steps + 1}


def _manifest(config: ExperimentConfig, out_dir: Path, command: str) -> RunManifest:
    """Start the manifest of a run, echoing the effective seed."""
    echo = {**config.raw, "seed": config.seed}
    return RunManifest(out_dir, config=echo, command=command)


def _uniformity_dict(report: cocycle.UniformityReport) -> Dict[str, Any]:
    """The export form of a uniformity report."""
    return {
        "E": report.energy,
        "n_list": list(report.n_list),
        "spreads": list(report.spreads),
        "means": list(report.means),
        "consistent_with_uniform": report.consistent_with_uniform,
    }


def run_orbit(config: ExperimentConfig, out_dir: Path) -> Path:
    """Write the orbit, its factor complexity and cylinder frequencies.

    Returns:
        Path: The manifest.
    """
    manifest = _manifest(config, out_dir, "orbit")
    with manifest.stage("orbit"):
        orbit = subshift.build_orbit(config.subshift, config.orbit_radius)
        export.write_orbit(manifest.path("orbit.txt"), orbit)
    with manifest.stage("word statistics"):
        complexity = [
            (n, len(subshift.words_of_length(orbit, n, config.sample_length)))
            for n in range(1, config.complexity_max + 1)
        ]
        export.write_csv(
            manifest.path("complexity.csv"), ["n", "complexity"], complexity
        )
        stats = subshift.cylinder_frequencies(
            orbit, config.cylinder_length, config.sample_length
        )
        export.write_csv(
            manifest.path("cylinders.csv"),
            ["word", "count", "frequency"],
            export.cylinder_rows(stats, orbit),
        )
    with manifest.stage("period detection"):
        scan_coeffs = coefficients(config, 0, PERIOD_SCAN_LENGTH)
        export.write_json(
            manifest.path("periods.json"),
            {
                "max_period": PERIOD_SCAN_MAX,
                "probe_length": PERIOD_SCAN_LENGTH,
                "orbit_period": subshift.detect_period(
                    orbit, PERIOD_SCAN_MAX, PERIOD_SCAN_LENGTH
                ),
                "coefficient_period": jacobi.condition_a_probe(
                    scan_coeffs, PERIOD_SCAN_MAX, PERIOD_SCAN_LENGTH
                ),
            },
        )
    return manifest.finish()


def run_lyapunov(config: ExperimentConfig, out_dir: Path, threads: int = 1) -> Path:
    """Write the Lyapunov curve over the grid and the uniformity reports.

    Returns:
        Path: The manifest.
    """
    manifest = _manifest(config, out_dir, "lyapunov")
    n_list = config.uniformity_n_list or (
        config.n_steps,
        2 * config.n_steps,
        4 * config.n_steps,
    )
    longest = max(config.n_steps, *n_list)
    with manifest.stage("coefficients"):
        coeffs = coefficients(config, **_cocycle_sites(config.base_offsets, longest))
    with manifest.stage("lyapunov curve"):
        grid = config.grid.build(coeffs.bound_constant)
        curve = spectrum.gamma_curve(
            coeffs, grid, config.n_steps, config.base_offsets, threads
        )
        export.write_csv(
            manifest.path("lyapunov.csv"),
            ["E", "gamma", "spread", "n"],
            (
                (float(energy), float(gamma), float(spread), config.n_steps)
                for energy, gamma, spread in zip(grid.points, curve.gamma, curve.spread)
            ),
        )
    with manifest.stage("uniformity"):
        reports = [
            cocycle.uniformity_diagnostic(
                coeffs, energy, config.n_steps, config.base_offsets, n_list
            )
            for energy in config.uniformity_energies
        ]
        export.write_json(
            manifest.path("uniformity.json"),
            [_uniformity_dict(report) for report in reports],
        )
    return manifest.finish()


def run_uniformity(config: ExperimentConfig, out_dir: Path) -> Path:
    """Write the uniformity report of every configured energy.

    Returns:
        Path: The manifest.
    """
    manifest = _manifest(config, out_dir, "uniformity")
    n_list = config.uniformity_n_list or (
        config.n_steps,
        2 * config.n_steps,
        4 * config.n_steps,
    )
    with manifest.stage("coefficients"):
        sites = _cocycle_sites(config.base_offsets, max(n_list))
        coeffs = coefficients(config, **sites)
    with manifest.stage("uniformity"):
        reports = [
            cocycle.uniformity_diagnostic(
                coeffs, energy, config.n_steps, config.base_offsets, n_list
            )
            for energy in config.uniformity_energies
        ]
        export.write_json(
            manifest.path("uniformity.json"),
            [_uniformity_dict(report) for report in reports],
        )
    return manifest.finish()


def run_spectrum(config: ExperimentConfig, out_dir: Path, threads: int = 1) -> Path:
    """Write both spectrum estimates, their comparison and the measure trend.

    Returns:
        Path: The manifest.
    """
    manifest = _manifest(config, out_dir, "spectrum")
    longest = max(order.n_steps for order in config.orders)
    largest = config.sizes[-1]
    cocycle_sites = _cocycle_sites(config.base_offsets, longest)
    section_lo, section_hi = jacobi.section_bounds(0, largest)
    with manifest.stage("coefficients"):
        coeffs = coefficients(
            config,
            lo=min(cocycle_sites["lo"], section_lo),
            hi=max(cocycle_sites["hi"], section_hi),
        )
    with manifest.stage("measure trend"):
        trend, curves, refined = spectrum.measure_trend(
            coeffs,
            config.orders,
            config.base_offsets,
            lo=config.grid.lo,
            hi=config.grid.hi,
            threads=threads,
        )
        finest = curves[-1]
        gamma_estimate = spectrum.zero_set_estimate(finest)
        export.write_csv(manifest.path("trend.csv"), ["order", "measure"], trend)
        export.write_csv(
            manifest.path("curve.csv"),
            ["E", "gamma", "spread"],
            (
                (float(energy), float(gamma), float(spread))
                for energy, gamma, spread in zip(
                    finest.grid.points, finest.gamma, finest.spread
                )
            ),
        )
    with manifest.stage("finite sections"):
        sectioned = spectrum.finite_section_spectrum(coeffs, config.sizes, config.tol)
        export.write_csv(
            manifest.path("eigenvalues.csv"),
            ["index", "eigenvalue"],
            (
                (index, float(value))
                for index, value in enumerate(sectioned.eigenvalues[largest])
            ),
        )
        export.write_csv(
            manifest.path("section.csv"),
            ["n", "a", "b"],
            (
                (site, coeffs.a_at(site), coeffs.b_at(site))
                for site in range(section_lo, section_hi + 1)
            ),
        )
    with manifest.stage("comparison"):
        comparison = None
        if gamma_estimate.intervals and sectioned.estimate.intervals:
            compared = spectrum.compare_estimates(gamma_estimate, sectioned.estimate)
            comparison = {
                "hausdorff_distance": compared.hausdorff_distance,
                "symmetric_difference_measure": compared.symmetric_difference_measure,
                "intersection": compared.intersection.to_json_dict(),
            }
        else:
            logger.warning("An estimate is empty, skipping the comparison")
        cantor = spectrum.cantor_diagnostic(
            gamma_estimate, finest, config.isolation_eps
        )
        export.write_json(
            manifest.path("spectrum.json"),
            {
                "gamma_zero_set": gamma_estimate.to_json_dict(),
                "finite_section": sectioned.estimate.to_json_dict(),
                "refined": refined[-1].to_json_dict(),
                "comparison": comparison,
                "edge_states": list(sectioned.edge_states),
                "cantor": {
                    "isolated_points": list(cantor.isolated_points),
                    "max_contained_interval": cantor.max_contained_interval,
                },
            },
        )
    return manifest.finish()


def run_boshernitzan(config: ExperimentConfig, out_dir: Path) -> Path:
    """Write the Boshernitzan sequence ``n, eta, n * eta``.

    Returns:
        Path: The manifest.
    """
    manifest = _manifest(config, out_dir, "boshernitzan")
    with manifest.stage("boshernitzan"):
        orbit = subshift.build_orbit(config.subshift, config.sample_length)
        terms = subshift.boshernitzan_sequence(
            orbit, config.n_max, config.sample_length
        )
        export.write_csv(
            manifest.path("boshernitzan.csv"), ["n", "eta", "n_eta"], terms
        )
    return manifest.finish()


def run_combes_thomas(config: ExperimentConfig, out_dir: Path, energy: float) -> Path:
    """Write the Combes-Thomas report and the Green's function column at ``energy``.

    Returns:
        Path: The manifest.

    Raises:
        InSpectrum: If ``energy`` lies on the section spectrum.
    """
    manifest = _manifest(config, out_dir, "combes-thomas")
    site = config.combes_thomas_site
    lo = site - config.combes_thomas_radius
    hi = site + config.combes_thomas_radius
    with manifest.stage("combes-thomas"):
        coeffs = coefficients(config, lo, hi)
        report = jacobi.combes_thomas_check(coeffs, energy, lo, hi, site, config.tol)
        column = jacobi.greens_function(coeffs, energy, lo, hi, site)
    export.write_json(
        manifest.path("combes_thomas.json"),
        {
            "E": energy,
            "eta": report.eta,
            "kappa_fit": report.kappa_fit,
            "kappa_bound": report.kappa_bound,
            "bound_satisfied": report.bound_satisfied,
            "kappa_apriori": report.kappa_apriori,
            "apriori_bound_satisfied": report.apriori_bound_satisfied,
        },
    )
    export.write_csv(
        manifest.path("greens.csv"),
        ["n", "m", "value"],
        ((n, site, float(value)) for n, value in zip(range(lo, hi + 1), column)),
    )
    return manifest.finish()
