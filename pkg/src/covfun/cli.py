"""Command-line front end.

Every command prints one JSON report on stdout (unless ``--quiet``).  Exit
codes: 0 covered / success, 1 uncovered / inconsistent, 2 unknown, 3 usage
or input errors.
"""

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .banach_mazur import bm_distance_upper
from .batteries import battery_2d, battery_3d, load_battery
from .betanet import NetError, cap_cover, f_bound, net_cardinality_log_bound, net_params, snap_to_net
from .bodies import body_from_json
from .borsuk import (PointCloud, constant_width_radii_check, mu_n, part_diameters, phi_upper,
                     reuleaux_polygon)
from .budget import SearchBudget
from .covering import (COVERED, CoverConfig, base_slice_translates, beta_for_gap,
                       cone_cover_thm1, gamma_upper, known_config, lpball_cover_thm2, verify_cover)
from .geometry import diameter
from .john import NormalizationError, john_normalize

EXIT_USAGE = 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------

def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None


def _load_body(path):
    try:
        return body_from_json(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"invalid body in {path}: {exc}") from None


def _load_config(path):
    try:
        return CoverConfig.from_json(_load_json(path))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid config in {path}: {exc}") from None


def _digest(*parts):
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, dict):
            p = {k: v for k, v in p.items() if not callable(v)}
        h.update(json.dumps(p, sort_keys=True, default=str).encode())
    return h.hexdigest()[:16]


def _file_digest(paths):
    h = hashlib.sha256()
    for p in paths:
        with open(p, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()[:16]


def _budget(args):
    return SearchBudget(max_time=args.budget_seconds, seed=args.seed, starts=args.starts)


def _slice(text):
    if text is None:
        return None
    key, _, val = text.partition("=")
    if key.strip() != "z" or not val:
        raise UsageError("--slice expects z=<height>")
    try:
        return float(val)
    except ValueError:
        raise UsageError("--slice expects z=<height>") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _prepare_out(args):
    out = getattr(args, "out", None)
    if out:
        os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify(args):
    K = _load_body(args.body)
    cfg = _load_config(args.config)
    if cfg.centers.shape[1] != K.dim:
        raise UsageError("config dimension does not match the body")
    z = _slice(args.slice)
    cert = verify_cover(K, cfg, max_depth=args.depth, margin=args.margin,
                        time_limit=args.budget_seconds)
    if args.svg:
        _write_svg(args.svg, K, cfg, cert.witness, z)
    out = _prepare_out(args)
    if out:
        from .plotting import plot_cover, write_csv
        write_csv(os.path.join(out, "config.csv"),
                  [{"i": i, **{f"x{k}": v for k, v in enumerate(c)}} for i, c in enumerate(cfg.centers)])
        if K.dim == 2 or z is not None:
            plot_cover(K, cfg, os.path.join(out, "cover.png"), cert.witness, z)
    outcome = {"certificate": cert.to_json(), "config": cfg.to_json()}
    return cert.exit_code, outcome, _file_digest([args.body, args.config])


def _write_svg(path, K, cfg, witness, z):
    from .render import render_cover_svg
    if K.dim == 3 and z is None:
        raise UsageError("3-D bodies need --slice z=<height> for SVG output")
    try:
        svg = render_cover_svg(K, cfg, witness, z)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with open(path, "w") as fh:
        fh.write(svg)


def cmd_gamma(args):
    if args.m < 1:
        raise UsageError("-m must be >= 1")
    K = _load_body(args.body)
    seed_cfg = known_config(K, args.m) if args.seed_known else None
    res = gamma_upper(K, args.m, _budget(args), seed_config=seed_cfg, max_depth=args.depth)
    out = _prepare_out(args)
    if out:
        from .plotting import plot_cover, write_csv
        write_csv(os.path.join(out, "config.csv"),
                  [{"i": i, **{f"x{k}": v for k, v in enumerate(c)}} for i, c in enumerate(res.config.centers)])
        if K.dim == 2:
            plot_cover(K, res.config, os.path.join(out, "cover.png"))
    return 0, res.to_json(), _file_digest([args.body])


def cmd_bm(args):
    K1, K2 = _load_body(args.body), _load_body(args.other)
    if K1.dim != K2.dim:
        raise UsageError("bodies must have the same dimension")
    d, cert = bm_distance_upper(K1, K2, _budget(args), starts=args.starts)
    return 0, {"log_distance": d, "factor": math.exp(d), "certificate": cert.to_json()}, \
        _file_digest([args.body, args.other])


def cmd_net(args):
    if args.net_cmd == "params":
        try:
            p = net_params(args.n, args.beta)
        except NetError as exc:
            raise UsageError(str(exc)) from None
        f, asym, env = f_bound(p.n, p.m, p.theta)
        return 0, {**p.to_json(), "f": f, "asymptotic": asym, "envelope": env}, _digest(vars(args))
    if args.net_cmd == "caps":
        caps = cap_cover(args.n, args.theta, c=args.c)
        return 0, caps.to_json(), _digest(vars(args))
    if args.net_cmd == "cardinality":
        return 0, {"log10_bound": net_cardinality_log_bound(args.n, args.beta, args.c), "c": args.c,
                   "c_nominal": True}, _digest(vars(args))
    K = _load_body(args.body)
    try:
        params = net_params(K.dim, args.beta)
        cert, Kn = john_normalize(K)
        snap = snap_to_net(Kn, params)
    except (NetError, NormalizationError) as exc:
        raise UsageError(str(exc)) from None
    return 0, {**snap.to_json(), "john": cert.to_json()}, _file_digest([args.body])


def cmd_borsuk(args):
    if args.borsuk_cmd == "reuleaux":
        K = reuleaux_polygon(args.k)
        return 0, {"body": K.to_json(), "area": K.area(), "diameter": diameter(K)}, _digest(vars(args))
    if args.borsuk_cmd == "check":
        K = _load_body(args.body)
        try:
            ok, r, R, mu = constant_width_radii_check(K, args.n)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return (0 if ok else 1), {"ok": ok, "inradius": r, "circumradius": R, "mu_n": mu,
                                  "mu_n_closed_form": mu_n(args.n or K.dim)}, _file_digest([args.body])
    if args.points:
        X = PointCloud.from_json(_load_json(args.points))
        digest = _file_digest([args.points])
    elif args.body:
        K = _load_body(args.body)
        if hasattr(K, "boundary_samples"):
            pts = K.boundary_samples(args.samples)
        else:
            from .directions import direction_grid
            pts = K.boundary_points(direction_grid(K.dim, args.samples))
        X = PointCloud(pts)
        digest = _file_digest([args.body])
    else:
        raise UsageError("phi needs --points or --body")
    res = phi_upper(X, args.m, _budget(args))
    return 0, {**res.to_json(), "part_diameters": part_diameters(X, res.assignment)}, digest


def cmd_construct(args):
    if args.which == "thm2":
        cfg = lpball_cover_thm2(args.p)
    else:
        if not args.body:
            raise UsageError(f"{args.which} needs --body")
        K = _load_body(args.body)
        if not hasattr(K, "apex"):
            raise UsageError("the body must be a cone")
        cfg = cone_cover_thm1(K) if args.which == "thm1" else base_slice_translates(K)
    if args.ratio is not None:
        cfg = cfg.with_ratio(args.ratio)
    return 0, cfg.to_json(), _digest(vars(args))


def cmd_render(args):
    K = _load_body(args.body)
    cfg = _load_config(args.config)
    z = _slice(args.slice)
    if K.dim == 3 and z is None:
        raise UsageError("3-D bodies need --slice z=<height>")
    cert = verify_cover(K, cfg, max_depth=args.depth, time_limit=args.budget_seconds)
    _write_svg(args.svg, K, cfg, cert.witness, z)
    return 0, {"svg": args.svg, "verdict": cert.verdict,
               "witness": None if cert.witness is None else cert.witness.tolist()}, \
        _file_digest([args.body, args.config])


def _gamma_row(name, K, m, budget, depth, target=None, seed_cfg=None):
    t0 = time.monotonic()
    res = gamma_upper(K, m, budget, seed_config=seed_cfg, max_depth=depth)
    return {"body": name, "m": m, "r_upper": res.r_upper, "volume_floor": res.volume_floor,
            "verdict": res.certificate.verdict, "target": target,
            "seconds": round(time.monotonic() - t0, 3)}, res


def cmd_program(args):
    n = args.n
    if n not in (2, 3):
        raise UsageError("-n must be 2 or 3")
    if not 0 < args.cn < 1:
        raise UsageError("--cn must lie in (0, 1)")
    beta = beta_for_gap(args.cn)
    try:
        params = net_params(n, beta)
        params_json = params.to_json()
    except NetError as exc:
        params, params_json = None, {"error": str(exc)}
    if args.bodies:
        bodies = load_battery(args.bodies)
        digest = _file_digest([os.path.join(args.bodies, f) for f in sorted(os.listdir(args.bodies))
                               if f.endswith(".json")])
    else:
        bodies = battery_2d() if n == 2 else battery_3d()
        digest = _digest({k: v.to_json() for k, v in bodies.items()})
    m = 2 ** n
    rows, failures = [], []
    for name, K in bodies.items():
        if K.dim != n:
            failures.append({"body": name, "error": "dimension mismatch"})
            continue
        row = {"body": name}
        try:
            john_normalize(K)
            row["john"] = "ok"
        except NormalizationError as exc:
            failures.append({"body": name, "error": str(exc)})
            continue
        if args.snap and params is not None:
            try:
                _, Kn = john_normalize(K)
                snap = snap_to_net(Kn, params)
                row["bm_log_bound"] = snap.bm_log_bound
            except NetError as exc:
                row["bm_log_bound"] = None
                row["snap_error"] = str(exc)
        seed_cfg = known_config(K, m)
        g, _ = _gamma_row(name, K, m, _budget(args), args.depth, args.cn, seed_cfg)
        row.update(g)
        row["within_cn"] = bool(g["verdict"] == COVERED and g["r_upper"] <= args.cn)
        rows.append(row)
    worst = max((r["r_upper"] for r in rows), default=None)
    consistent = bool(rows) and all(r["within_cn"] for r in rows)
    report = {"n": n, "c_n": args.cn, "beta": beta, "net_params": params_json,
              "net_log10_cardinality": net_cardinality_log_bound(n, beta, 1.0), "c_nominal": True,
              "bodies": rows, "failures": failures, "max_gamma_upper": worst,
              "verdict": "consistent" if consistent else "inconsistent"}
    out = _prepare_out(args)
    if out and rows:
        from .plotting import plot_bounds, write_csv
        write_csv(os.path.join(out, "program.csv"), rows,
                  ["body", "m", "r_upper", "volume_floor", "verdict", "target", "within_cn", "seconds"])
        plot_bounds(rows, os.path.join(out, "program.png"), name="body")
    return (0 if consistent else 1), report, digest


TABLE3_TARGETS = {
    "T": {4: 0.75, 5: 9 / 13, 6: None, 7: None, 8: None},
    "K1": {4: 1.0, 5: 1.0, 6: 2 / 3, 7: 2 / 3, 8: 2 / 3},
    "K2": {4: 0.9428, 5: 0.8944, 6: 0.8164, 7: 0.7775, 8: None},
}
TABLE3_TOL = {"T": {4: 0.01, 5: 0.015}, "K2": {4: 0.01, 5: 0.01, 6: 0.01, 7: 0.015}}


def _table_rows(which, budget, depth):
    from .bodies import LpBall, regular_tetrahedron, square, triangle
    rows = []

    def add(table, name, K, m, target, tol, seed_cfg=None):
        row, _ = _gamma_row(name, K, m, budget, depth, target, seed_cfg)
        row["table"] = table
        row["tol"] = tol
        if target is None:
            row["status"] = "open"
        else:
            ok = row["verdict"] == COVERED and row["r_upper"] <= target + tol
            row["status"] = f"<= {target:.6g} + {tol:g}" if ok else "above target"
        rows.append(row)

    if which in ("1", "all"):
        add("1", "triangle", triangle(), 3, 2 / 3, 1e-3)
        add("1", "square", square(), 4, 0.5, 1e-3)
        add("1", "square", square(), 5, 0.5, 1e-3)
    if which in ("2", "all"):
        for name, K in battery_2d().items():
            add("2", name, K, 4, math.sqrt(2) / 2, 0.01)
            add("2", name, K, 7, 0.5, 0.01)
            add("2", name, K, 8, 0.5, 0.01)
    if which in ("3", "all"):
        bodies = {"T": regular_tetrahedron(), "K1": LpBall(1, 3), "K2": LpBall(2, 3)}
        for name, K in bodies.items():
            for m, target in TABLE3_TARGETS[name].items():
                tol = TABLE3_TOL.get(name, {}).get(m, 1e-6 if target is not None else 0.0)
                add("3", name, K, m, target, tol, known_config(K, m))
    return rows


def cmd_tables(args):
    rows = _table_rows(args.table, _budget(args), args.depth)
    out = _prepare_out(args)
    if out:
        from .plotting import plot_bounds, write_csv
        fields = ["table", "body", "m", "r_upper", "target", "tol", "status", "volume_floor", "verdict",
                  "seconds"]
        write_csv(os.path.join(out, "tables.csv"), rows, fields)
        for r in rows:
            r["label"] = f"T{r['table']} {r['body']} m={r['m']}"
        plot_bounds(rows, os.path.join(out, "tables.png"), name="label")
        for r in rows:
            del r["label"]
    ok = all(r["status"] != "above target" for r in rows)
    return (0 if ok else 1), {"rows": rows}, _digest(vars(args))


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_search_flags(p, seconds=60.0):
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--budget-seconds", type=float, default=seconds, dest="budget_seconds",
                   help=f"wall-clock budget per search (default {seconds:g})")
    p.add_argument("--starts", type=int, default=16, help="multi-start count (default 16)")
    p.add_argument("--depth", type=int, default=40, help="subdivision depth limit (default 40)")


def build_parser():
    ap = argparse.ArgumentParser(prog="covfun", description="Covering functionals of convex bodies.")
    ap.add_argument("--version", action="version", version=f"covfun {__version__}")
    ap.add_argument("--quiet", action="store_true", help="suppress the JSON report")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="certify a covering configuration")
    p.add_argument("--body", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--margin", type=float, default=1e-7)
    p.add_argument("--budget-seconds", type=float, default=None, dest="budget_seconds")
    p.add_argument("--svg")
    p.add_argument("--slice", help="z=<height> for 3-D renders")
    p.add_argument("--out", help="directory for CSV and PNG output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gamma", help="verified upper bound on gamma_m")
    p.add_argument("--body", required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--seed-known", action="store_true", dest="seed_known",
                   help="seed the search with a known explicit covering when one applies")
    p.add_argument("--out")
    _add_search_flags(p)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("bm", help="Banach-Mazur distance upper bound")
    p.add_argument("--body", required=True)
    p.add_argument("--other", required=True)
    _add_search_flags(p, 30.0)
    p.set_defaults(func=cmd_bm, starts=32)

    p = sub.add_parser("net", help="beta-net generator pieces")
    nsub = p.add_subparsers(dest="net_cmd", required=True)
    q = nsub.add_parser("params")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--beta", type=float, required=True)
    q = nsub.add_parser("caps")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--theta", type=float, required=True)
    q.add_argument("--c", type=float, default=1.0)
    q = nsub.add_parser("cardinality")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--beta", type=float, required=True)
    q.add_argument("--c", type=float, default=1.0)
    q = nsub.add_parser("snap")
    q.add_argument("--body", required=True)
    q.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_net)

    p = sub.add_parser("borsuk", help="diameter partitions and constant width")
    bsub = p.add_subparsers(dest="borsuk_cmd", required=True)
    q = bsub.add_parser("phi")
    q.add_argument("--points")
    q.add_argument("--body")
    q.add_argument("--samples", type=int, default=200)
    q.add_argument("-m", type=int, required=True)
    _add_search_flags(q)
    q = bsub.add_parser("reuleaux")
    q.add_argument("-k", type=int, required=True)
    q = bsub.add_parser("check")
    q.add_argument("--body", required=True)
    q.add_argument("-n", type=int, default=None)
    p.set_defaults(func=cmd_borsuk)

    p = sub.add_parser("construct", help="explicit covering configurations")
    p.add_argument("which", choices=["thm1", "thm2", "base-slice"])
    p.add_argument("--body")
    p.add_argument("-p", type=lambda s: math.inf if s in ("inf", "Infinity") else float(s), default=2.0)
    p.add_argument("--ratio", type=float)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("program", help="desk-scale run of the four-step program")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--cn", type=float, required=True)
    p.add_argument("--bodies", help="directory of body JSON files (default: built-in battery)")
    p.add_argument("--snap", action="store_true", help="also snap every body to the net grid")
    p.add_argument("--out")
    _add_search_flags(p)
    p.set_defaults(func=cmd_program)

    p = sub.add_parser("tables", help="reproduce the checkable table entries")
    p.add_argument("--table", choices=["1", "2", "3", "all"], default="all")
    p.add_argument("--out")
    _add_search_flags(p)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("render", help="SVG of a planar covering or a slice")
    p.add_argument("--body", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--svg", required=True)
    p.add_argument("--slice")
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--budget-seconds", type=float, default=60.0, dest="budget_seconds")
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    t0 = time.monotonic()
    try:
        code, outcome, digest = args.func(args)
    except UsageError as exc:
        print(f"covfun: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"command": args.command, "inputs_digest": digest, "outcome": _jsonable(outcome),
              "seed": getattr(args, "seed", None), "version": __version__,
              "wall_time": round(time.monotonic() - t0, 3)}
    if not args.quiet:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
