"""
The lab experiments: each takes an `ExperimentConfig` and an output
directory and returns a `Report` whose artifacts are written there.
"""
import logging
import math
from pathlib import Path

import numpy as np

from superint_lab.dynamics import drift_report, integrate, write_trajectory_csv
from superint_lab.exceptions import DomainError
from superint_lab.geometry import get_chart
from superint_lab.integrals import coefficient_table, fifth_integral_sign_scan, integral_set
from superint_lab.observables import (
    bracket_residual,
    detect_momentum_degree,
    gradient_spectra,
    independence_rank,
)
from superint_lab.potentials import TTW, Calogero, Wolfes, shift_profile
from superint_lab.reports import Check, Report, above, below, write_csv
from superint_lab.sampling import PhaseSampler, sample_points
from superint_lab.utils import get_rank_tolerance

logger = logging.getLogger(__name__)

EQUIVALENCE_TOLERANCE = 1e-12
EQUIVALENCE_GUARD = 0.1
NEGATIVE_CONTROL_THRESHOLD = 1e-2


def _sample(config, integrals, count):
    return sample_points(
        integrals.chart,
        count,
        config.sampling["seed"],
        spec=config.system,
        margin=config.sampling["margin"],
        attempts=config.sampling["attempts"],
    )


def _certified_rank(report, integrals, bracket, points):
    tolerance = get_rank_tolerance()
    explicit = integrals.observables()
    certified = integrals.rank_observables(bracket)
    rank = independence_rank(certified, points, tolerance)
    report.add(
        Check(
            name="rank",
            value=rank,
            passed=rank >= integrals.claimed_independent,
            tolerance=tolerance,
            kind="rank",
            details={"claimed": integrals.claimed_independent, "observables": [o.name for o in certified]},
        )
    )
    if [o.name for o in certified] != [o.name for o in explicit]:
        report.add(
            Check(
                name="rank[explicit]",
                value=independence_rank(explicit, points, tolerance),
                passed=True,
                tolerance=tolerance,
                kind="rank",
                informational=True,
                details={"observables": [o.name for o in explicit]},
            )
        )
    return certified


def _bracket_checks(report, integrals, bracket):
    for name, residual in bracket.residuals.items():
        report.add(
            below(
                "bracket[%s]" % name,
                residual,
                bracket.tolerance,
                details={"absolute": bracket.absolute[name]},
            )
        )
    for name, residual in bracket.candidate_residuals.items():
        report.add(
            below(
                "candidate[%s]" % name,
                residual,
                bracket.tolerance,
                informational=True,
                details={"verified": bracket.verified[name]},
            )
        )


def cmd_verify(config, out_dir):
    """
    Brackets of every member (and screened candidate) with the Hamiltonian
    over the sample, then the independence rank of the certified set.
    """
    spec = config.system
    options = config.options
    report = Report("verify", config.resolved)
    integrals = integral_set(spec, fifth=options["fifth"], corrupt_h3=options["negative_control"])
    with report.timer("sampling"):
        points = _sample(config, integrals, config.sampling["count"])
    with report.timer("brackets"):
        bracket = bracket_residual(integrals, points)
    _bracket_checks(report, integrals, bracket)
    report.data["pairwise"] = {"names": bracket.member_names, "max_abs": bracket.pairwise}
    report.data["exact_derivatives"] = integrals.exact
    with report.timer("rank"):
        _certified_rank(report, integrals, bracket, points[: config.sampling["rank_points"]])

    if options["fifth"] and isinstance(spec, TTW):
        candidate = integrals.candidates[0]
        degree = detect_momentum_degree(candidate, points[0])
        report.add(
            Check(
                name="momentum_degree[%s]" % candidate.name,
                value=degree,
                passed=degree == 2 * spec.n + 1,
                tolerance=None,
                kind="degree",
                informational=True,
            )
        )
        if not bracket.verified[candidate.name]:
            reduced = sample_points(
                "reduced_polar",
                min(len(points), 100),
                config.sampling["seed"],
                spec=spec,
                margin=config.sampling["margin"],
            )
            with report.timer("sign_scan"):
                scan = fifth_integral_sign_scan(spec.n, spec.k, reduced)
            report.data["sign_scan"] = {
                "default_residual": scan.default_residual,
                "best_residual": scan.best_residual,
                "best_signs": scan.best_signs,
                "vanishing": len(scan.vanishing),
                "min_singular_value": scan.min_singular_value,
                "terms": scan.terms,
            }
    return report


def cmd_rank(config, out_dir):
    """Independence rank with the per-point singular value spectra."""
    spec = config.system
    report = Report("rank", config.resolved)
    integrals = integral_set(spec, fifth=config.options["fifth"])
    points = _sample(config, integrals, config.sampling["rank_points"])
    bracket = bracket_residual(integrals, points, pairwise=False)
    certified = _certified_rank(report, integrals, bracket, points)
    if config.options["duplicate"]:
        duplicated = certified + [certified[1].renamed("%s_copy" % certified[1].name)]
        rank = independence_rank(duplicated, points)
        report.add(
            Check(
                name="rank[duplicated]",
                value=rank,
                passed=rank == independence_rank(certified, points),
                kind="rank",
                details={"duplicate": certified[1].name},
            )
        )
    spectra = gradient_spectra(certified, points)
    report.data["spectra"] = {"observables": [o.name for o in certified], "normalized": spectra}
    report.data["candidates"] = {name: bracket.verified[name] for name in bracket.verified}
    return report


def cmd_coeffs(config, out_dir):
    """The exact coefficient table of the higher order integral, as CSV."""
    n = config.options["n"]
    report = Report("coeffs", config.resolved)
    table = coefficient_table(n)
    rows = list(table.rows())
    name = "coefficients_n%s.csv" % n
    write_csv(Path(out_dir) / name, ["sigma", "i", "l", "numerator", "denominator"], rows)
    report.artifacts.append(name)
    report.data["rows"] = rows
    expected = (n + 1) * (n + 2)
    report.add(
        Check(name="rows", value=len(rows), passed=len(rows) == expected, kind="count", details={"expected": expected})
    )
    return report


def equivalence_grid(g, h, alpha, size, guard=EQUIVALENCE_GUARD):
    """
    psi, the shifted equal-coupling Calogero profile, the Wolfes profile and
    their relative deviation on `size` points of (-pi, pi], keeping only
    |sin(3 psi)| > guard.
    """
    calogero = shift_profile(Calogero(g, g, g).angular_profile(), alpha)
    wolfes = Wolfes(h, h, h).angular_profile()
    psi = np.linspace(-math.pi, math.pi, size + 1)[1:]
    psi = psi[np.abs(np.sin(3.0 * psi)) > guard]
    shifted = np.array([calogero(x) for x in psi])
    target = np.array([wolfes(x) for x in psi])
    deviation = np.abs(target - shifted) / np.maximum(1.0, np.abs(target))
    return np.column_stack([psi, shifted, target, deviation])


def cmd_equivalence(config, out_dir):
    """
    Compares the Wolfes profile with the Calogero profile shifted by alpha
    (pi / 6 by default) on a guarded grid.
    """
    options = config.options
    report = Report("equivalence", config.resolved)
    if options["g"] == 0.0 and options["h"] == 0.0:
        raise DomainError("equivalence needs a nonzero coupling")
    grid = equivalence_grid(options["g"], options["h"], options["alpha"], options["grid"])
    name = "equivalence.csv"
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, grid, delimiter=",", fmt="%.17g", header="psi,calogero_shifted,wolfes,deviation", comments="")
    report.artifacts.append(name)
    deviation = float(np.max(grid[:, 3]))
    report.add(
        below("max_deviation", deviation, EQUIVALENCE_TOLERANCE, kind="deviation", details={"points": len(grid)})
    )
    if options["negative_control"]:
        report.add(
            above("mismatch_detected", deviation, NEGATIVE_CONTROL_THRESHOLD, kind="deviation", informational=True)
        )
    return report


def cmd_simulate(config, out_dir):
    """Integrates one trajectory and reports the drift of every integral."""
    spec = config.system
    cfg = config.integrator
    report = Report("simulate", config.resolved)
    integrals = integral_set(spec)
    if config.x0 is not None:
        x0, p0 = np.array(config.x0), np.array(config.p0)
    else:
        cartesian = get_chart("cartesian", spec.particles)
        sampler = PhaseSampler(
            cartesian,
            spec=spec,
            seed=config.sampling["seed"],
            margin=config.sampling["margin"],
            attempts=config.sampling["attempts"],
        )
        point = sampler.sample(1)[0]
        x0, p0 = point.q, point.p
    report.data["initial_state"] = {"x0": x0, "p0": p0}
    with report.timer("integration"):
        trajectory = integrate(spec, x0, p0, cfg, observables=integrals.observables())
    name = "trajectory.csv"
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(trajectory, Path(out_dir) / name)
    report.artifacts.append(name)
    report.add(
        Check(
            name="status",
            value=trajectory.status,
            passed=trajectory.completed,
            kind="status",
            details={"reason": trajectory.reason},
        )
    )
    if not trajectory.completed:
        return report
    drift = drift_report(trajectory, integrals)
    tolerance = config.options["drift_tolerance"]
    for name in drift.names:
        report.add(
            below(
                "drift[%s]" % name,
                drift.drifts[name],
                tolerance,
                kind="drift",
                details={"slope": drift.slopes[name], "kind": drift.kinds[name]},
            )
        )
    report.data["duration"] = drift.duration
    return report


EXPERIMENTS = {
    "verify": cmd_verify,
    "rank": cmd_rank,
    "coeffs": cmd_coeffs,
    "equivalence": cmd_equivalence,
    "simulate": cmd_simulate,
}


def run_experiment(config, out_dir):
    """Runs `config.experiment` and writes its JSON report into `out_dir`."""
    logger.info("Starting %s (seed %s)", config.experiment, config.seed)
    report = EXPERIMENTS[config.experiment](config, out_dir)
    if config.output["format"] == "csv":
        report.write_checks_csv(out_dir)
    path = report.write(out_dir)
    logger.info(
        "Finished %s: %s, report %s", config.experiment, "passed" if report.passed else "FAILED", path
    )
    for check in report.failed_checks:
        logger.info("Failed check %s: %s (tolerance %s)", check.name, check.value, check.tolerance)
    return report
