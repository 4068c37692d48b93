"""Command-line driver.

Exit status: 0 when every asserted check passes, 1 when a check fails,
2 on configuration or stage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, greens
from .config import ExperimentConfig, bundled_config, load_config
from .domain import DomainSpec
from .errors import ConfigError, SinhLabError, StageError
from .export import csv_rows, export_report, load_report, write_json
from .pipeline import run_pipeline
from .verify import identity_checks, kernel_checks

log = logging.getLogger("sinhlab")

EXIT_OK, EXIT_CHECKS, EXIT_ERROR = 0, 1, 2


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else bundled_config()
    if args.out:
        cfg.output_dir = args.out
    return cfg


def _print_json(obj):
    from .export import dumps

    sys.stdout.write(dumps(obj))


def cmd_kernels(args) -> int:
    domain = _config(args).domain if args.config else DomainSpec.unit_disc()
    x = np.asarray(args.x, dtype=float)
    out = {"domain": domain.to_dict(), "x": x.tolist()}
    rob = greens.robin_eval(domain, x)
    out["robin"] = {"value": rob.value, "grad": rob.grad.tolist(), "hess": rob.hess.tolist()}
    if args.y is not None:
        y = np.asarray(args.y, dtype=float)
        k = greens.green_derivatives(domain, x, y)
        out["y"] = y.tolist()
        out["green"] = {"value": k.value, "grad_x": k.grad_x.tolist(), "grad_y": k.grad_y.tolist(),
                        "hess_xx": k.hess_xx.tolist(), "hess_xy": k.hess_xy.tolist()}
        out["regular_part"] = greens.green_regular_part(domain, x, y)
    _print_json(out)
    return EXIT_OK


def _stage_run(args, until: str) -> int:
    cfg = _config(args)
    res = run_pipeline(cfg, cfg.output_dir, threads=args.threads, until=until)
    if until == "critical":
        c = res.critical
        print(f"critical point {c.config.points.tolist()}  |grad F| = {c.grad_norm:.3e}  "
              f"{c.classification}, {c.negative_count} negative Hessian eigenvalues")
    elif until == "solve":
        for rho, _, rep in res.chains[0]:
            print(f"rho={rho:g}  iterations={rep.iterations}  residual={rep.final_residual:.3e}")
    elif until == "spectrum":
        for run in res.runs:
            mus = " ".join(f"{x:.6f}" for x in run["mu"])
            print(f"rho={run['rho']:g}  morse={run['morse']}  mu: {mus}")
    print(f"artifacts in {cfg.output_dir}")
    return EXIT_OK


def cmd_crit(args) -> int:
    return _stage_run(args, "critical")


def cmd_solve(args) -> int:
    return _stage_run(args, "solve")


def cmd_spectrum(args) -> int:
    return _stage_run(args, "spectrum")


def cmd_verify(args) -> int:
    checks = identity_checks() + kernel_checks()
    for c in checks:
        print(f"{'PASS' if c.ok else 'FAIL'}  {c.name:<34} value={c.value:.10g}  expected={c.expected:.10g}  "
              f"err={c.error:.2e}")
    if args.out:
        write_json([c.to_dict() for c in checks], Path(args.out) / "verify.json")
    return EXIT_OK if all(c.ok for c in checks) else EXIT_CHECKS


def cmd_run(args) -> int:
    cfg = _config(args)
    res = run_pipeline(cfg, cfg.output_dir, threads=args.threads)
    rep = res.report
    print(f"morse indices {rep.morse} (predicted {rep.predicted_morse})")
    for name, ok in res.checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    print(f"report written to {Path(cfg.output_dir) / 'report.json'}")
    return EXIT_OK if res.passed else EXIT_CHECKS


def cmd_report(args) -> int:
    out = Path(args.out or _config(args).output_dir)
    report = load_report(out / "report.json")
    export_report(report, "csv", out / "report.csv")
    for line in csv_rows(report):
        print(line)
    checks = report.extra.get("checks", {})
    for name, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(checks.values()) else EXIT_CHECKS


COMMANDS = {
    "kernels": (cmd_kernels, "evaluate G, H and R at points"),
    "crit": (cmd_crit, "find a critical point of the Hamiltonian"),
    "solve": (cmd_solve, "continuation solve along the rho schedule"),
    "spectrum": (cmd_spectrum, "linearized eigenvalues at every rho"),
    "verify": (cmd_verify, "kernel derivative and integral identity checks"),
    "run": (cmd_run, "full pipeline with report"),
    "report": (cmd_report, "print and re-export a saved report"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment JSON (default: bundled disc-m1.json)")
    common.add_argument("--out", help="output directory (overrides the config)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for independent solves")
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser = argparse.ArgumentParser(prog="sinhlab", description="sinh-Poisson blow-up laboratory")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "kernels":
            p.add_argument("--x", nargs=2, type=float, default=[0.0, 0.0], metavar=("X1", "X2"))
            p.add_argument("--y", nargs=2, type=float, metavar=("Y1", "Y2"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    handler = COMMANDS[args.command][0]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except StageError as exc:
        print(f"stage '{exc.stage}' failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (SinhLabError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
