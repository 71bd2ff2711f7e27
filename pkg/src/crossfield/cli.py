"""Command line front end.

Subcommands
-----------
bound   closed-form bound states of the free contact interaction (d = 1, 2, 3)
solve   one pole of the crossed-field denominator
scan    follow a branch over a field sweep and report stabilization events
verify  run the numerical self-checks

Settings are taken from flags, then from a JSON file given with ``--config``,
then from built-in defaults. The effective settings are echoed into every
output. Exit codes: 0 success, 2 usage, 3 domain error, 4 numerical failure.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import io
import json
import logging
import math
import os
from pathlib import Path
import sys
import time

from . import __version__
from .errors import BranchLost, CrossfieldError, DomainError, NumericalError
from .pole_finder import (
    detect_stabilization,
    newton_solve,
    seed_window,
    select_branch_seed,
    seed_ground,
    solve_zero_field,
    trace_branch,
)
from .renorm_free import (
    RenormParams2D,
    bound_energy_2d,
    bound_energy_3d,
    coupling_1d,
    denominator_1d_free,
    denominator_2d_free,
    denominator_3d_free,
)
from .resolvent_kernel import DEFAULT_CONTOUR, ContourSpec
from .scaling import PhysicalParams, ScaledParams, to_scaled

log = logging.getLogger("crossfield")

SCHEMA_VERSION = 1
CSV_COLUMNS = ["efield", "re_e", "im_e", "tau_scaled", "residual", "iters", "im_e_pow15"]
THREADS_ENV = "CROSSFIELD_THREADS"

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 2, 3, 4

DEFAULTS = {
    "precision": "double",
    "depth": DEFAULT_CONTOUR.depth,
    "format": "json",
    "output": None,
    "window": "L2",
    "efield": "0.01:3.1",
    "dim": 2,
    "m_star": 1.0,
    "t0": 1.0,
}


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------------
# parsing helpers


def parse_sweep(text):
    """``start:stop[:max_step]`` -> (start, stop, max_step or None)."""
    parts = str(text).split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"field sweep must be start:stop[:max_step], got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"bad number in sweep {text!r}") from exc
    start, stop = vals[0], vals[1]
    step = vals[2] if len(vals) == 3 else None
    if not 0 <= start < stop:
        raise UsageError("sweep needs 0 <= start < stop")
    if step is not None and not step > 0:
        raise UsageError("max_step must be positive")
    return start, stop, step


def parse_window(text):
    """``L<n>`` or ``ground`` -> Landau index (0 for the ground branch)."""
    t = str(text).strip().lower()
    if t == "ground":
        return 0
    if t.startswith("l") and t[1:].isdigit():
        return int(t[1:])
    raise UsageError(f"window must be L<n> or ground, got {text!r}")


def parse_complex(text):
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"not a complex number: {text!r}") from exc


def _fmt(x):
    """Shortest round-trip text of a float (stable across runs)."""
    return repr(float(x))


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def effective_config(args):
    """Merge flags over the config file over the defaults."""
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(args.config))
    for key, val in vars(args).items():
        if key in ("config", "func", "verbose") or val is None:
            continue
        cfg[key] = val
    return cfg


def _contour(cfg):
    changes = {"precision": cfg["precision"], "depth": float(cfg["depth"])}
    for key in ("quad_rel_tol", "envelope_tol", "max_condition_error"):
        if cfg.get(key) is not None:
            changes[key] = float(cfg[key])
    try:
        return ContourSpec(**changes)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _scaled_params(cfg):
    """Scaled field and binding energy from either unit system."""
    if cfg.get("b_field") is not None:
        need = ("charge", "binding_energy")
        missing = [k for k in need if cfg.get(k) is None]
        if missing:
            raise UsageError(f"physical units need --{' --'.join(m.replace('_', '-') for m in missing)}")
        phys = PhysicalParams(float(cfg["m_star"]), float(cfg["charge"]), float(cfg["b_field"]), float(cfg.get("e_field") or 0.0))
        eb, f = to_scaled(phys, float(cfg["binding_energy"]))
        return eb.real if isinstance(eb, complex) else eb, f
    if cfg.get("eb") is None:
        raise UsageError("--eb (scaled binding energy) is required")
    ebs = cfg["eb"] if isinstance(cfg["eb"], list) else [cfg["eb"]]
    return float(ebs[0]), float(cfg.get("efield_value") or 0.0)


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _meta(cfg, contour=None):
    out = {"tool": "crossfield", "version": __version__, "schema_version": SCHEMA_VERSION, "config": cfg}
    if contour is not None:
        out["contour"] = contour.summary()
    return out


def _root_dict(root):
    z = root.pole
    tau = -1.0 / root.im_resolved if root.im_resolved < 0 else math.inf
    return {
        "re_e": z.real,
        "im_e": z.imag,
        "tau_scaled": tau,
        "residual": root.residual,
        "iters": root.iterations,
        "uncertainty": root.uncertainty,
        "below_resolution": root.below_resolution,
        "precision": root.precision,
        "method": root.method,
    }


# ----------------------------------------------------------------------------
# bound


def cmd_bound(cfg):
    dim = int(cfg["dim"])
    m = float(cfg["m_star"])
    report = {"dim": dim, "m_star": m}
    if dim == 1:
        if cfg.get("eb_phys") is None:
            raise UsageError("bound --dim 1 needs --eb")
        eb = float(cfg["eb_phys"])
        lam = coupling_1d(eb, m)
        report.update(e_binding=eb, coupling=lam, residual=abs(denominator_1d_free(eb, lam, m)))
    elif dim == 2:
        if cfg.get("lambda_r") is None:
            raise UsageError("bound --dim 2 needs --lambda-r")
        p = RenormParams2D(float(cfg["lambda_r"]), m, float(cfg["t0"]))
        eb = bound_energy_2d(p)
        report.update(lambda_r=p.lambda_r, t0=p.t0, e_binding=eb, residual=abs(denominator_2d_free(eb, eb, m)))
    elif dim == 3:
        if cfg.get("lambda_r") is None:
            raise UsageError("bound --dim 3 needs --lambda-r")
        lam = float(cfg["lambda_r"])
        eb = bound_energy_3d(lam, m)
        report.update(lambda_r=lam, e_binding=eb, residual=abs(denominator_3d_free(eb, lam, m)))
    else:
        raise UsageError("--dim must be 1, 2 or 3")
    return report


# ----------------------------------------------------------------------------
# solve


def cmd_solve(cfg):
    contour = _contour(cfg)
    if cfg.get("efield_value") is None and cfg.get("b_field") is None:
        raise UsageError("solve needs --efield")
    eb, f = _scaled_params(cfg)
    params = ScaledParams(f, eb)
    n = parse_window(cfg["window"])
    t0 = time.perf_counter()
    if f == 0:
        root = solve_zero_field(eb)
    elif cfg.get("seed"):
        root = newton_solve(params, contour, parse_complex(cfg["seed"]))
    elif n == 0:
        root = seed_ground(params, contour)
    else:
        root = select_branch_seed(params, contour, landau_index=n)
    out = {"efield": f, "binding_tilde": eb, "pole": _root_dict(root), "contour_used": root.contour}
    if f > 0 and n > 0 and not cfg.get("seed"):
        out["window"] = list(seed_window(n, f, contour.depth))
    log.info("solve finished in %.2f s", time.perf_counter() - t0)
    return out, contour


# ----------------------------------------------------------------------------
# scan


def _pow15(x):
    return math.copysign(abs(x) ** 0.2, x)


def trajectory_rows(traj):
    rows = []
    for p in traj.points:
        r = p.root
        im = r.im_resolved
        tau = -1.0 / im if im < 0 else math.inf
        rows.append([p.efield, r.pole.real, r.pole.imag, tau, r.residual, r.iterations, _pow15(r.pole.imag)])
    return rows


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(v) if i != 5 else str(int(v)) for i, v in enumerate(row)])
    return buf.getvalue()


def _scan_one(eb, cfg):
    """Trace one branch; returns (record, trajectory rows)."""
    contour = _contour(cfg)
    start, stop, step = parse_sweep(cfg["efield"])
    n = parse_window(cfg["window"])
    seed = parse_complex(cfg["seed"]) if cfg.get("seed") else None
    error = None
    try:
        traj = trace_branch(eb, start, stop, n, contour, max_step=step, seed=seed)
    except BranchLost as exc:
        traj = exc.partial
        error = {"type": "BranchLost", "message": str(exc)}
    except CrossfieldError as exc:
        return {"binding_tilde": eb, "error": {"type": type(exc).__name__, "message": str(exc)}}, []
    rows = trajectory_rows(traj) if traj is not None else []
    events = []
    if traj is not None and error is None:
        for ev in detect_stabilization(traj, contour):
            events.append(
                {
                    "efield_star": ev.efield_star,
                    "re_e": ev.pole_star.real,
                    "im_e": ev.pole_star.imag,
                    "tau_scaled": ev.tau_scaled,
                    "dip_depth_decades": ev.dip_depth_decades,
                    "below_resolution": ev.below_resolution,
                }
            )
    record = {
        "binding_tilde": eb,
        "branch_label": traj.branch_label if traj is not None else f"L{n}",
        "trajectory": [dict(zip(CSV_COLUMNS, r)) for r in rows],
        "events": events,
    }
    if error:
        record["error"] = error
    return record, rows


def _workers():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer")


def cmd_scan(cfg):
    if cfg.get("eb") is None:
        raise UsageError("scan needs --eb")
    ebs = [float(v) for v in (cfg["eb"] if isinstance(cfg["eb"], list) else [cfg["eb"]])]
    parse_sweep(cfg["efield"])
    parse_window(cfg["window"])
    contour = _contour(cfg)
    workers = min(_workers(), len(ebs))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_scan_one, ebs, [cfg] * len(ebs)))
    else:
        results = [_scan_one(eb, cfg) for eb in ebs]
    return results, contour


def _scan_outputs(results, cfg, contour):
    """(path or None, text) pairs; one file per binding energy when several."""
    fmt = cfg["format"]
    out = cfg.get("output")
    files = []
    for record, rows in results:
        if fmt == "csv":
            text = rows_to_csv(rows)
        else:
            text = _dump({**_meta(cfg, contour), "result": record})
        path = out
        if out is not None and len(results) > 1:
            p = Path(out)
            path = str(p.with_name(f"{p.stem}_eb{record['binding_tilde']:g}{p.suffix}"))
        files.append((path, text))
    return files


# ----------------------------------------------------------------------------
# verify


def cmd_verify(cfg):
    from .verify import run_checks

    contour = _contour(cfg)
    return run_checks(contour, quick=bool(cfg.get("quick"))), contour


# ----------------------------------------------------------------------------
# entry point


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with settings (flags take precedence)")
    common.add_argument("--precision", choices=["double", "extended"], default=None)
    common.add_argument("--depth", type=float, default=None, help="contour depth h")
    common.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(prog="crossfield", description="Resonances of a contact impurity in crossed fields.")
    parser.add_argument("--version", action="version", version=f"crossfield {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)

    b = sub.add_parser("bound", parents=[common], help="closed-form bound states of the free problem")
    b.add_argument("--dim", type=int, choices=[1, 2, 3], default=None)
    b.add_argument("--lambda-r", type=float, default=None)
    b.add_argument("--t0", type=float, default=None)
    b.add_argument("--m-star", type=float, default=None)
    b.add_argument("--eb", dest="eb_phys", type=float, default=None, help="binding energy (d = 1)")
    b.set_defaults(func=cmd_bound)

    for name, helptext in (("solve", "one pole of the denominator"), ("scan", "branch sweep with stabilization report")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "scan":
            p.add_argument("--eb", type=float, nargs="+", default=None, help="scaled binding energies")
            p.add_argument("--efield", default=None, help="sweep start:stop[:max_step]")
        else:
            p.add_argument("--eb", type=float, default=None, help="scaled binding energy")
            p.add_argument("--efield", dest="efield_value", type=float, default=None, help="scaled field")
            p.add_argument("--m-star", type=float, default=None)
            p.add_argument("--charge", type=float, default=None, help="|e| (physical units)")
            p.add_argument("--b-field", type=float, default=None, help="magnetic field (physical units)")
            p.add_argument("--e-field", type=float, default=None, help="electric field (physical units)")
            p.add_argument("--binding-energy", type=float, default=None, help="binding energy (physical units)")
        p.add_argument("--window", default=None, help="L<n> near level 2n+1, or L0/ground")
        p.add_argument("--seed", default=None, help="explicit starting guess, e.g. 4.8-0.01j")
        p.add_argument("--quad-rel-tol", type=float, default=None)
        p.add_argument("--max-condition-error", type=float, default=None)
        p.set_defaults(func=cmd_solve if name == "solve" else cmd_scan)

    v = sub.add_parser("verify", parents=[common], help="numerical self-checks")
    v.add_argument("--quick", action="store_true", default=None)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = effective_config(args)
        if args.mode == "bound":
            report = cmd_bound(cfg)
            text = _dump({**_meta(cfg), "result": report}) if cfg["format"] == "json" else _kv_csv(report)
            _emit(text, cfg.get("output"))
            return EXIT_OK
        if args.mode == "solve":
            report, contour = cmd_solve(cfg)
            if cfg["format"] == "json":
                text = _dump({**_meta(cfg, contour), "result": report})
            else:
                p = report["pole"]
                row = [report["efield"], p["re_e"], p["im_e"], p["tau_scaled"], p["residual"], p["iters"], _pow15(p["im_e"])]
                text = rows_to_csv([row])
            _emit(text, cfg.get("output"))
            return EXIT_OK
        if args.mode == "scan":
            results, contour = cmd_scan(cfg)
            for path, text in _scan_outputs(results, cfg, contour):
                _emit(text, path)
            failed = [r for r, _ in results if "error" in r]
            for r in failed:
                sys.stderr.write(f"error for E_B={r['binding_tilde']}: {r['error']['type']}: {r['error']['message']}\n")
            if any(r["error"]["type"] in _DOMAIN_NAMES for r in failed):
                return EXIT_DOMAIN
            return EXIT_NUMERICAL if failed else EXIT_OK
        if args.mode == "verify":
            checks, contour = cmd_verify(cfg)
            text = _dump({**_meta(cfg, contour), "checks": checks})
            if cfg.get("output") is not None:
                _emit(text, cfg["output"])
            for c in checks:
                status = "PASS" if c["passed"] else "FAIL"
                sys.stdout.write(f"{status} {c['name']}: {c['detail']}\n")
            return EXIT_OK if all(c["passed"] for c in checks) else EXIT_NUMERICAL
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"domain error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERICAL
    return EXIT_USAGE


def _kv_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = sorted(report)
    w.writerow(keys)
    w.writerow([_fmt(report[k]) if isinstance(report[k], float) else report[k] for k in keys])
    return buf.getvalue()


_DOMAIN_NAMES = {cls.__name__ for cls in (DomainError, *DomainError.__subclasses__())}


if __name__ == "__main__":
    sys.exit(main())
