"""Command line interface.

Every command emits JSON records of the form

    {"p": ..., "N": ..., "value": {"re": ..., "im": ...},
     "meta": {"precision": ..., "tolerances": {...}, "paper_refs": [...]},
     "data": {...}}

CSV output is a flat projection of the same records. On any library error
the process prints ``{"error": {"type": ..., "message": ...}}`` and exits
with status 2. ``lemmas`` exits with status 1 when a check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .numerics import PRECISION_MODES, TwistJonesError, default_config

_REFS = {
    "jones": ["jones-double-sum"],
    "critical": ["critical-point-example", "critical-system"],
    "constants": ["critical-point-example", "asymptotic-constants"],
    "volume": ["gluing-equation", "complex-volume"],
    "verify-asymptotics": ["volume-limit", "asymptotic-expansion"],
    "fourier": ["fourier-coefficients", "poisson-summation"],
    "lemmas": ["region-certificates"],
}


def _cnum(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return _cnum(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _record(command, cfg, p, N, value, data=None, tolerances=None):
    tol = dict(cfg.tolerances())
    if tolerances:
        tol.update(tolerances)
    rec = {
        "p": p,
        "N": N,
        "value": _cnum(value),
        "meta": {
            "precision": cfg.precision_mode,
            "tolerances": tol,
            "paper_refs": _REFS[command],
        },
    }
    if data:
        rec["data"] = _clean(data)
    return rec


def parse_range(text):
    """``"5"``, ``"3,5,8"`` or ``"a:b[:step]"`` (inclusive) to a list of ints."""
    text = text.strip()
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        if len(parts) not in (2, 3):
            raise argparse.ArgumentTypeError(f"bad range {text!r}")
        step = parts[2] if len(parts) == 3 else 1
        if step <= 0:
            raise argparse.ArgumentTypeError("range step must be positive")
        out = list(range(parts[0], parts[1] + 1, step))
    else:
        out = [int(x) for x in text.split(",") if x.strip()]
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return out


# ---------------------------------------------------------------- commands

def _cmd_jones(args, cfg):
    from .jones import KnotSpec, jones_exact

    out = []
    for N in args.N:
        J = jones_exact(KnotSpec(args.p, N), precision=cfg.precision_mode, dps=cfg.extended_dps)
        value = J.value if math.isfinite(J.value.real) else complex(math.nan, math.nan)
        out.append(_record("jones", cfg, args.p, N, value,
                           {"log_abs": J.log_abs, "arg": J.arg, "terms": J.term_count}))
    return out


def _cmd_critical(args, cfg):
    from .critical import solve_critical

    c = solve_critical(args.p, newton_tol=cfg.newton_tol)
    data = {"t0": c.t0, "s0": c.s0, "x0": c.x0, "y0": c.y0,
            "residual": c.residual, "iterations": c.iterations}
    return [_record("critical", cfg, args.p, None, c.zeta, data)]


def _cmd_constants(args, cfg):
    from .critical import solve_critical

    c = solve_critical(args.p, newton_tol=cfg.newton_tol)
    data = {"zeta": c.zeta, "zeta_R": c.zeta_R, "two_pi_zeta_R": 2 * math.pi * c.zeta_R,
            "omega": c.omega, "omega_H_form": c.omega_H_form, "H": c.H}
    return [_record("constants", cfg, args.p, None, c.two_pi_zeta, data)]


def _cmd_volume(args, cfg):
    from .critical import solve_critical
    from .geometry import solve_gluing

    g = solve_gluing(args.p)
    data = {"w0": g.w0, "volume": g.volume, "cs": g.volcs.imag, "residual": g.residual}
    if args.p >= 6:
        data["two_pi_zeta_R"] = 2 * math.pi * solve_critical(args.p).zeta_R
    return [_record("volume", cfg, args.p, None, g.volcs, data)]


def _cmd_asymptotics(args, cfg):
    from .asympt import convergence_experiment, ratio

    out = []
    for N, scaled, target, gap in convergence_experiment(args.p, args.N):
        data = {"re_logJ_scaled": scaled, "target": target, "gap": gap}
        out.append(_record("verify-asymptotics", cfg, args.p, N, ratio(args.p, N), data))
    return out


def _cmd_fourier(args, cfg):
    from .fourier import hhat
    from .jones import KnotSpec
    from .potential import FourierIndex

    out = []
    for N in args.N:
        c = hhat(KnotSpec(args.p, N), FourierIndex(args.m, args.n), eps=args.eps)
        data = {"m": c.m, "n": c.n, "quad_error": c.quad_error, "eps": args.eps}
        out.append(_record("fourier", cfg, args.p, N, c.value, data,
                           {"fourier_rel_tol": 1e-8}))
    return out


def _region_suite(args):
    from .potential import RegionSpec, high_region_sweep, polygon_inside, u_vertex_lines

    checks = []
    n_in, n_high, bad = high_region_sweep(args.grid)
    checks.append(("high-region-in-Dprime0", bad == 0,
                   {"grid": args.grid, "points_in_D": n_in, "points_high": n_high,
                    "violations": bad}))
    for p in args.p_range:
        lines = u_vertex_lines(p, 0)
        checks.append((f"U0-vertex-lines p={p}", all(len(v) == 2 for v in lines),
                       {"top": lines[0], "bottom": lines[1]}))
        checks.append((f"U0-in-Ddoubleprime0 p={p}",
                       polygon_inside(RegionSpec("U", p=p), RegionSpec("Ddoubleprime0", p=p)), {}))
        checks.append((f"Ddoubleprime0-in-D_H p={p}",
                       polygon_inside(RegionSpec("Ddoubleprime0", p=p), RegionSpec("D_H")), {}))
    return checks


def _hessian_suite(args):
    from .potential import H_factor, hess_V

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(100):
        t = complex(rng.uniform(0.55, 0.9), rng.uniform(-0.2, 0.2))
        s = complex(rng.uniform(0.3, 0.7), rng.uniform(-0.2, 0.2))
        h = hess_V(args.p_range[0], t, s)
        det = h[0, 0] * h[1, 1] - h[0, 1] ** 2
        H = H_factor(args.p_range[0], np.exp(2j * np.pi * t), np.exp(2j * np.pi * s))
        worst = max(worst, abs(det - (2j * np.pi) ** 2 * H) / abs(det))
    return [("det-hessian-H", worst <= 1e-10, {"max_rel_dev": worst})]


_SUITES = {"region": _region_suite, "hessian": _hessian_suite}


def _cmd_lemmas(args, cfg):
    checks = _SUITES[args.suite](args)
    out = []
    for name, ok, detail in checks:
        rec = _record("lemmas", cfg, None, None, 0j, dict(detail, check=name, passed=bool(ok)))
        out.append(rec)
    return out


_COMMANDS = {
    "jones": _cmd_jones,
    "critical": _cmd_critical,
    "constants": _cmd_constants,
    "volume": _cmd_volume,
    "verify-asymptotics": _cmd_asymptotics,
    "fourier": _cmd_fourier,
    "lemmas": _cmd_lemmas,
}


# ---------------------------------------------------------------- output

def _flatten(prefix, obj, row):
    if isinstance(obj, dict):
        if set(obj) == {"re", "im"}:
            row[f"{prefix}_re"], row[f"{prefix}_im"] = obj["re"], obj["im"]
            return
        for k, v in obj.items():
            _flatten(f"{prefix}_{k}" if prefix else k, v, row)
    elif isinstance(obj, list):
        row[prefix] = json.dumps(obj)
    else:
        row[prefix] = obj


def to_csv(records, command):
    """Flat CSV projection of JSON records."""
    rows = []
    for rec in records:
        row = {}
        if command == "verify-asymptotics":
            d = rec["data"]
            row = {"N": rec["N"], "re_logJ_scaled": d["re_logJ_scaled"],
                   "target": d["target"], "gap": d["gap"]}
        else:
            _flatten("", {k: rec[k] for k in ("p", "N", "value")}, row)
            _flatten("", rec.get("data", {}), row)
            row["precision"] = rec["meta"]["precision"]
        rows.append(row)
    fields = []
    for row in rows:
        fields += [k for k in row if k not in fields]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def to_json(records):
    payload = records[0] if len(records) == 1 else records
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"


def build_parser():
    parser = argparse.ArgumentParser(
        prog="twistjones",
        description="Colored Jones polynomials of twist knots at exp(2 pi i/(N+1/2)).",
    )
    parser.add_argument("--version", action="version", version=__version__)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write to this path instead of stdout")
    common.add_argument("--precision", choices=PRECISION_MODES,
                        help="default from $TWISTJONES_PRECISION, else machine-double")
    common.add_argument("--quad-abs-tol", type=float)
    common.add_argument("--quad-rel-tol", type=float)
    common.add_argument("--newton-tol", type=float)
    common.add_argument("--newton-max-iter", type=int)
    common.add_argument("--extended-dps", type=int)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jones", parents=[common], help="exact J_N")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--N", type=parse_range, required=True, help="N, list a,b,c or range a:b[:step]")

    for name, text in (("critical", "critical point of the potential"),
                       ("constants", "zeta(p), omega(p) and H"),
                       ("volume", "gluing equation and complex volume")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--p", type=int, required=True)

    p = sub.add_parser("verify-asymptotics", parents=[common],
                       help="scaled log|J_N| against 2 pi zeta_R and the ratio J_N / A_N")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--N", type=parse_range, default=parse_range("50,100,200"))

    p = sub.add_parser("fourier", parents=[common], help="Fourier coefficient hhat_N(m, n)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--N", type=parse_range, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--eps", type=float, default=None)

    p = sub.add_parser("lemmas", parents=[common], help="verification suites")
    p.add_argument("--suite", choices=sorted(_SUITES), required=True)
    p.add_argument("--p-range", type=parse_range, default=parse_range("6:20"))
    p.add_argument("--grid", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args):
    overrides = {
        key: getattr(args, key)
        for key in ("quad_abs_tol", "quad_rel_tol", "newton_tol", "newton_max_iter", "extended_dps")
        if getattr(args, key) is not None
    }
    if args.precision:
        overrides["precision_mode"] = args.precision
    return default_config(**overrides)


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "eps", "unset") is None:
        from .fourier import DEFAULT_EPS

        args.eps = DEFAULT_EPS
    try:
        cfg = _config(args)
        records = _COMMANDS[args.command](args, cfg)
    except (TwistJonesError, ValueError, ArithmeticError) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc),
                         "command": args.command}}
        sys.stdout.write(json.dumps(err, sort_keys=True) + "\n")
        return 2
    text = to_csv(records, args.command) if args.format == "csv" else to_json(records)
    _emit(text, args.output)
    if args.command == "lemmas" and not all(r["data"]["passed"] for r in records):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
