"""End-to-end experiment: critical point, continuation, spectra, fits and report."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import asymptotics as asy
from . import greens
from .ansatz import tau_values
from .config import ExperimentConfig
from .errors import OutOfDomain, SinhLabError, StageError
from .export import export_report, write_json
from .hamiltonian import SignedConfig, find_critical_point, scaled_hessian_spectrum
from .mesh import Refinement, assemble_laplacian, build_mesh
from .pde import continuation_solve
from .spectrum import ambiguity_band, assemble_weight, eigenpairs, rescale_eigenfunction

log = logging.getLogger(__name__)

STAGES = ("kernels", "critical", "solve", "spectrum", "fits", "report")
MODEL_OF_REGIME = {1: "constant", 2: "dipole", 3: "radial"}


@contextmanager
def stage(name: str, out: Path | None):
    t0 = time.perf_counter()
    log.info("stage %s", name)
    try:
        yield
    except StageError:
        raise
    except (SinhLabError, ArithmeticError, np.linalg.LinAlgError) as exc:
        err = StageError(name, exc)
        if out is not None:
            write_json({"stage": name, "error": type(exc).__name__, "message": str(exc)}, out / "failure.json")
        raise err from exc
    log.info("stage %s done in %.2fs", name, time.perf_counter() - t0)


@dataclass
class PipelineResult:
    report: asy.AsymptoticReport
    checks: dict
    critical: object
    runs: list = field(repr=False, default_factory=list)
    chains: list = field(repr=False, default_factory=list)
    completed: str = "report"

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def seed_config(cfg: ExperimentConfig) -> SignedConfig:
    return SignedConfig(cfg.domain, cfg.seeds, cfg.signs)


def meshes_for(cfg: ExperimentConfig, centers):
    """Base mesh at the configured resolution plus, optionally, its self-similar halving."""
    centers = [tuple(map(float, c)) for c in centers]
    base = build_mesh(cfg.domain, cfg.h, Refinement(centers, cfg.h_min, cfg.growth))
    if not cfg.fine_mesh:
        return base, None
    fine = build_mesh(cfg.domain, cfg.h / 2, Refinement(centers, cfg.h_min / 2, 1.0 + (cfg.growth - 1.0) / 2))
    return base, fine


def kernel_summary(config: SignedConfig) -> dict:
    rob = greens.robin_batch(config.domain, config.points)
    out = {"robin": rob[0].tolist(), "robin_grad": rob[1].tolist()}
    if config.m > 1:
        m = config.m
        out["green"] = [[None if i == k else greens.green_value(config.domain, config.points[i], config.points[k])
                         for k in range(m)] for i in range(m)]
    return out


def profile_radius(cfg: ExperimentConfig, config: SignedConfig, center, k: int, scale: float) -> float:
    room = float(config.domain.boundary_distance(np.asarray(center)[None, :])[0])
    others = [np.hypot(*(config.points[i] - center)) / 2 for i in range(config.m) if i != k]
    room = min([room, *others])
    return min(cfg.profile_radius, 0.9 * room / scale)


def fit_run(cfg, config, taus, rho, peaks, fields, count):
    """Profile fits for eigenfunctions ``1..count`` at every peak (None where the window does not fit)."""
    fits = {}
    for j in range(1, count + 1):
        per_peak = []
        for k in range(config.m):
            scale = taus[k] * rho / np.sqrt(8.0)
            radius = profile_radius(cfg, config, peaks[k], k, scale)
            if radius < cfg.fit_window:
                per_peak.append(None)
                continue
            try:
                prof = rescale_eigenfunction(fields[j - 1], config, taus, rho, k, peaks[k], radius=radius)
            except OutOfDomain:
                per_peak.append(None)
                continue
            per_peak.append(asy.fit_all_models(prof, cfg.fit_window))
        fits[j] = per_peak
    return fits


def far_fields(config, taus, rho, mus, fields, fits, m):
    out = {}
    for j in range(1, 4 * m + 1):
        reg = asy.regime_of(j, m)
        model = MODEL_OF_REGIME[reg]
        per_peak = fits.get(j)
        if per_peak is None or any(d is None for d in per_peak):
            out[j] = None
            continue
        out[j] = asy.far_field_check(fields[j - 1], mus[j - 1], rho, [d[model] for d in per_peak], config,
                                     taus, reg)
    return out


def run_pipeline(cfg: ExperimentConfig, out_dir=None, threads: int = 1, save_fields: bool = True,
                 until: str = "report") -> PipelineResult:
    """Run every stage and write artifacts under ``out_dir`` (default: ``cfg.output_dir``).

    Eigenvalues used for the asymptotic laws are Richardson-extrapolated in
    the mesh spacing when ``cfg.fine_mesh`` is set; fits and far-field
    comparisons use the base-mesh eigenfunctions. A failing stage raises
    :class:`StageError` after writing ``failure.json``; files from earlier
    stages are left in place. ``until`` stops after the named stage.
    """
    if until not in STAGES:
        raise ValueError(f"until must be one of {STAGES}")
    out = Path(cfg.output_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(cfg.to_dict(), out / "config.json")
    m = cfg.m
    K = cfg.eig_count
    tol = cfg.tolerances

    with stage("kernels", out):
        seed = seed_config(cfg)
        write_json(kernel_summary(seed), out / "kernels.json")
    if until == "kernels":
        return PipelineResult(None, {}, None, completed=until)

    with stage("critical", out):
        crit = find_critical_point(seed, tol["critical"], cfg.convention)
        config = crit.config
        taus = tau_values(config, cfg.convention)
        scaled = scaled_hessian_spectrum(config, None, cfg.convention)
        write_json({**crit.to_dict(), "taus": taus.tolist(), "etas": scaled.etas.tolist()}, out / "critical.json")
    if until == "critical":
        return PipelineResult(None, {}, crit, completed=until)

    with stage("solve", out):
        base, fine = meshes_for(cfg, config.points)
        meshes = [base] if fine is None else [base, fine]
        pool_size = max(1, min(int(threads), len(meshes)))
        with ThreadPoolExecutor(pool_size) as ex:
            chains = list(ex.map(lambda mh: continuation_solve(config, cfg.rho_schedule, mh, tol["newton"],
                                                               cfg.convention, cfg.scheme, taus), meshes))
        solve_info = []
        for label, mesh, chain in zip(("base", "fine"), meshes, chains):
            for rho, u, rep in chain:
                solve_info.append({"mesh": label, "rho": rho, "nodes": mesh.n, **rep.to_dict()})
                if save_fields and label == "base":
                    u.save(out / "fields" / f"u_rho{rho:g}")
        write_json(solve_info, out / "solve.json")
    if until == "solve":
        return PipelineResult(None, {}, crit, chains=chains, completed=until)

    with stage("spectrum", out):
        jobs = [(i, r) for i in range(len(meshes)) for r in range(len(cfg.rho_schedule))]

        def spec(job):
            i, r = job
            rho, u, _ = chains[i][r]
            lap = assemble_laplacian(meshes[i], cfg.scheme)
            return eigenpairs(lap, assemble_weight(u, rho), K, rho, tol["eigen"])

        for i, mesh in enumerate(meshes):
            assemble_laplacian(mesh, cfg.scheme)  # fill the cache before threads share it
        with ThreadPoolExecutor(max(1, int(threads))) as ex:
            spectra = dict(zip(jobs, ex.map(spec, jobs)))
        spec_info = []
        runs = []
        for r, rho in enumerate(cfg.rho_schedule):
            sb = spectra[(0, r)]
            mu_base = sb.eigenvalues
            if fine is not None:
                mu_fine = spectra[(1, r)].eigenvalues
                mu = (4.0 * mu_fine - mu_base) / 3.0
            else:
                mu_fine, mu = None, mu_base
            band = ambiguity_band(rho, tol["eigen"])
            spec_info.append({
                "rho": rho, "base": sb.to_dict(),
                "fine": None if fine is None else spectra[(1, r)].to_dict(),
                "extrapolated": mu.tolist(), "residuals": sb.residuals.tolist(),
            })
            runs.append({
                "rho": rho, "mu": mu, "mu_base": mu_base, "mu_fine": mu_fine,
                "morse": int(np.sum(mu < 1.0)),
                "ambiguous": [j + 1 for j in range(K) if abs(mu[j] - 1.0) < band],
                "residuals": sb.residuals, "fields": sb.eigenfields,
                "peaks": chains[0][r][2].peak_locations,
            })
        write_json(spec_info, out / "spectrum.json")
    if until == "spectrum":
        return PipelineResult(None, {}, crit, runs, chains, until)

    with stage("fits", out):
        for run in runs:
            run["fits"] = fit_run(cfg, config, taus, run["rho"], run["peaks"], run["fields"], 4 * m)
            run["far_field"] = far_fields(config, taus, run["rho"], run["mu_base"], run["fields"], run["fits"], m)
    if until == "fits":
        return PipelineResult(None, {}, crit, runs, chains, until)

    with stage("report", out):
        report = asy.build_report(runs, m, scaled.etas, crit.negative_count)
        report.extra = {
            "convention": cfg.convention,
            "critical_points": config.points.tolist(),
            "hess_classification": crit.classification,
            "taus": taus.tolist(),
            "mu_base": {repr(r["rho"]): r["mu_base"].tolist() for r in runs},
            "mu_fine": {repr(r["rho"]): None if r["mu_fine"] is None else r["mu_fine"].tolist() for r in runs},
            "residuals": {repr(r["rho"]): r["residuals"].tolist() for r in runs},
            "newton_residuals": {repr(rho): rep.final_residual for rho, _, rep in chains[0]},
        }
        checks = asserted_checks(report, crit, m)
        report.extra["checks"] = checks
        export_report(report, "json", out / "report.json")
        export_report(report, "csv", out / "report.csv")
    return PipelineResult(report, checks, crit, runs, chains)


def asserted_checks(report: asy.AsymptoticReport, crit, m: int) -> dict:
    """The checks that decide the exit status.

    The Morse formula is asserted only at a nondegenerate critical point.
    """
    checks = {
        "regime_inequalities": not report.mismatches,
        "morse_bounds": all(report.morse_within_bounds),
    }
    if crit.classification != "degenerate":
        checks["morse_formula"] = report.morse[-1] == 3 * m - crit.negative_count
    return checks
