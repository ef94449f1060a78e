"""Command-line interface: ``jetgeom {eval,validate,scan,extremal,diag}``.

Exit codes: 0 ok, 1 validation breach, 2 configuration error, 3 domain error.
JSON tensors are nested objects keyed by 1-based index strings, so the
component N^(1)_(1)2 is ``report["N"]["1"]["2"]``.
"""

import argparse
import csv
import io
import itertools
import json
import os
import sys
import tempfile

import numpy as np

from . import generic as ge
from .errors import DomainError, JetGeomError, SingularMatrix
from .field import einstein_blocks, em_2form_jcm, stress_energy
from .inputs import DIM, FIELD_KEYS, fields_from_pairs, read_pairs
from .jcm import MINKOWSKI_SIGNATURE, JetPoint, geometry_bundle, jcm_F, minkowski_transform
from .jcm import check_domain, ricci, scalar_curvature
from .tolerances import DEFAULT
from .validation import cross_validate

EXIT_OK, EXIT_BREACH, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3

# command keys accepted in a config file next to the field keys
RUN_KEYS = ("K", "tolerance", "seed", "samples", "t", "x", "y", "t-end", "steps", "grid")
_Q = 0.5 * (1.0 - np.eye(DIM))


class ConfigError(JetGeomError):
    pass


# ---------------------------------------------------------------- output

def indexed(a):
    """Nested dict with 1-based string keys; scalars become floats."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return float(a)
    return {str(i + 1): indexed(a[i]) for i in range(a.shape[0])}


def dumps(obj):
    # json writes floats with repr, the shortest string that round-trips
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".jetgeom-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(text, path):
    if path and path != "-":
        write_atomic(path, text)
        print(path)
    else:
        sys.stdout.write(text)


def csv_text(header, rows, footer=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.12g}" for v in row])
    if footer:
        buf.write(footer + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------- config

def _vector(raw, key):
    try:
        v = tuple(float(s) for s in raw.split(","))
    except ValueError:
        raise ConfigError(f"--{key}: expected {DIM} comma-separated reals, got {raw!r}") from None
    if len(v) != DIM:
        raise ConfigError(f"--{key}: expected {DIM} values, got {len(v)}")
    return v


def _number(raw, key, kind=float):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"--{key}: invalid value {raw!r}") from None


def parse_grid(specs):
    """``x2=0:1:5`` -> {1: linspace(0, 1, 5)}; unlisted coordinates stay fixed."""
    axes = {}
    for spec in specs:
        try:
            name, rng = spec.split("=")
            start, stop, count = rng.split(":")
            idx = int(name.strip().lstrip("x")) - 1
            start, stop, count = float(start), float(stop), int(count)
        except ValueError:
            raise ConfigError(f"malformed grid spec {spec!r}, expected xI=start:stop:count") from None
        if not 0 <= idx < DIM:
            raise ConfigError(f"grid coordinate out of range in {spec!r}")
        if count < 1:
            raise ConfigError(f"grid count must be >= 1 in {spec!r}")
        if idx in axes:
            raise ConfigError(f"coordinate x{idx + 1} gridded twice")
        axes[idx] = np.linspace(start, stop, count)
    return axes


def resolve(args):
    """Merge the config file with the flags (flags win) into a settings dict."""
    pairs = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc.strerror}") from None
        pairs = read_pairs(text, FIELD_KEYS + RUN_KEYS)
    for key in FIELD_KEYS + RUN_KEYS:
        value = getattr(args, key.replace(".", "_").replace("-", "_"), None)
        if value is not None:
            if key == "grid":
                value = ";".join(value)
            pairs[key] = (value, None)
    run = {k: pairs.pop(k)[0] for k in RUN_KEYS if k in pairs}
    return pairs, run


def settings(run):
    s = {
        "K": _number(run.get("K", "1"), "K"),
        "tolerance": _number(run.get("tolerance", repr(DEFAULT.xval)), "tolerance"),
        "seed": _number(run.get("seed", "0"), "seed", int),
        "samples": _number(run.get("samples", "100"), "samples", int),
        "t": _number(run.get("t", "1"), "t"),
        "x": _vector(run.get("x", "0,0,0,0"), "x"),
        "y": _vector(run.get("y", "1,1,1,1"), "y"),
        "t_end": _number(run["t-end"], "t-end") if "t-end" in run else None,
        "steps": _number(run.get("steps", "100"), "steps", int),
        "grid": [g for g in run.get("grid", "").split(";") if g.strip()],
    }
    if not s["tolerance"] > 0:
        raise ConfigError("tolerance must be > 0")
    if s["samples"] < 1:
        raise ConfigError("samples must be >= 1")
    return s


# ---------------------------------------------------------------- commands

def cmd_eval(args):
    pairs, run = resolve(args)
    sigma, h = fields_from_pairs(pairs)
    s = settings(run)
    p = JetPoint(s["t"], s["x"], s["y"])
    b = geometry_bundle(p, sigma, h)
    eb = einstein_blocks(p.x, p.t, sigma, h)
    se = stress_energy(p.x, p.t, sigma, h, s["K"])
    report = {
        "point": p.as_dict(),
        "F": jcm_F(p, sigma, h),
        "g": indexed(b.g),
        "ginv": indexed(b.ginv),
        "M": indexed(b.M),
        "N": indexed(b.N),
        "L": indexed(b.L),
        "frakR": indexed(b.frakR),
        "torsion": indexed(b.torsion),
        "ricci": indexed(b.ricci),
        "scalarR": float(b.scalarR),
        "einstein": {
            "G_ij": indexed(eb.G_ij),
            "block_tt": eb.block_tt,
            "block_yy": indexed(eb.block_yy),
            "zero_blocks": {k: indexed(v) for k, v in eb.zero_blocks.items()},
        },
        "stress_energy": {
            "K": se.K,
            "T11_up": float(se.T11_up),
            "T_mixed": indexed(se.T_mixed),
            "Tyy_mixed": indexed(se.Tyy_mixed),
            "T_ij": indexed(se.T_ij),
            "zero_components": {k: indexed(v) for k, v in se.zero_components.items()},
        },
        "em2form": indexed(em_2form_jcm(p, sigma, h)),
    }
    emit(dumps(report), args.json)
    return EXIT_OK


def cmd_validate(args):
    pairs, run = resolve(args)
    sigma, h = fields_from_pairs(pairs)
    s = settings(run)
    report = cross_validate(sigma, h, s["samples"], s["seed"], s["tolerance"])
    emit(dumps(report.as_dict()), args.json)
    return EXIT_OK if report.passed else EXIT_BREACH


def cmd_scan(args):
    pairs, run = resolve(args)
    sigma, _ = fields_from_pairs(pairs)
    s = settings(run)
    axes = parse_grid(s["grid"])
    values = [axes.get(i, np.array([s["x"][i]])) for i in range(DIM)]
    rows = []
    for x in itertools.product(*values):
        ric = ricci(x, sigma)
        eig = np.linalg.eigvalsh(ric)
        rows.append(list(x) + [scalar_curvature(x, sigma), float(np.trace(ric)),
                               float(eig[0]), float(eig[-1])])
    header = [f"x{i + 1}" for i in range(DIM)] + [
        "scalarR", "ricci_trace", "ricci_eig_min", "ricci_eig_max"]
    emit(csv_text(header, rows), args.csv)
    return EXIT_OK


def cmd_extremal(args):
    pairs, run = resolve(args)
    sigma, h = fields_from_pairs(pairs)
    s = settings(run)
    if s["steps"] < 4:
        raise ConfigError("steps must be >= 4")
    t0 = _number(run.get("t", "0"), "t")
    t_end = s["t_end"] if s["t_end"] is not None else t0 + 1.0
    start = JetPoint(t0, s["x"], s["y"])
    check_domain(start.y)
    lag = ge.jcm_lagrangian(sigma, h)
    traj = ge.integrate_extremal(lag, h, start, t_end, s["steps"])
    res = ge.el_residual(lag, h, traj)
    header = ["t"] + [f"x{i + 1}" for i in range(DIM)] + [f"y{i + 1}" for i in range(DIM)]
    rows = [[traj.t[k], *traj.x[k], *traj.y[k]] for k in range(len(traj))]
    footer = (f"# el_residual_max={float(res.max()):.12g},"
              f"velocity_defect={ge.velocity_defect(traj):.12g}")
    emit(csv_text(header, rows, footer), args.csv)
    return EXIT_OK


def cmd_diag(args):
    _, run = resolve(args)
    tol = _number(run.get("tolerance", "1e-12"), "tolerance")
    if not tol > 0:
        raise ConfigError("tolerance must be > 0")
    A, _ = minkowski_transform(tol=np.inf)
    AtQA = A.T @ _Q @ A
    deviation = float(np.max(np.abs(AtQA - np.diag(MINKOWSKI_SIGNATURE))))
    report = {
        "A": indexed(A),
        "AtQA": indexed(AtQA),
        "deviation": deviation,
        "signature": [float(v) for v in MINKOWSKI_SIGNATURE],
        "tolerance": tol,
        "passed": deviation <= tol,
    }
    emit(dumps(report), args.json)
    return EXIT_OK if deviation <= tol else EXIT_BREACH


# ---------------------------------------------------------------- parser

def _shared():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--sigma.kind", dest="sigma_kind",
                   help="constant | linear | quadratic | polynomial")
    p.add_argument("--sigma.coeffs", dest="sigma_coeffs", help="comma-separated reals")
    p.add_argument("--sigma.terms", dest="sigma_terms",
                   help="polynomial terms e1.e2.e3.e4:coeff,...")
    p.add_argument("--h.kind", dest="h_kind", help="constant | power | exponential")
    p.add_argument("--h.params", dest="h_params", help="comma-separated reals")
    p.add_argument("--K", dest="K", help="Einstein constant (default 1)")
    p.add_argument("--tolerance", help="acceptance tolerance")
    p.add_argument("--seed", help="sampling seed (default 0)")
    p.add_argument("--samples", help="number of sample points (default 100)")
    p.add_argument("--json", help="write the JSON report to this path")
    p.add_argument("--csv", help="write the CSV output to this path")
    return p


def build_parser():
    shared = _shared()
    parser = argparse.ArgumentParser(prog="jetgeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def point_flags(p):
        p.add_argument("--t", help="time coordinate")
        p.add_argument("--x", help="x^1..x^4, comma-separated")
        p.add_argument("--y", help="y^1..y^4, comma-separated")

    p = sub.add_parser("eval", parents=[shared], help="all closed-form objects at one point")
    point_flags(p)
    p.set_defaults(func=cmd_eval)
    p = sub.add_parser("validate", parents=[shared],
                       help="closed forms against the generic engine")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("scan", parents=[shared], help="scalar and Ricci curvature on an x-grid")
    p.add_argument("--x", help="fixed coordinates for axes without a grid")
    p.add_argument("--grid", action="append", help="xI=start:stop:count (repeatable)")
    p.set_defaults(func=cmd_scan)
    p = sub.add_parser("extremal", parents=[shared], help="integrate an extremal curve")
    point_flags(p)
    p.add_argument("--t-end", dest="t_end", help="final time (default t + 1)")
    p.add_argument("--steps", help="RK4 steps (default 100)")
    p.set_defaults(func=cmd_extremal)
    p = sub.add_parser("diag", parents=[shared], help="Minkowski diagonalization check")
    p.set_defaults(func=cmd_diag)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, SingularMatrix) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (JetGeomError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
