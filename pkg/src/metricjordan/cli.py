"""Command-line front end: JSON in, JSON out.

Exit codes: 0 ok, 1 malformed input, 2 not self-adjoint, 3 numerical
failure, 4 verification failed, 5 inequivalent.
"""
import argparse
import json
import math
import sys

import numpy as np

from .canonicalize import CanonicalForm, Decomposition, decompose
from .errors import DegenerateMetricError, DomainError, NotSelfAdjointError, NumericalFailure
from .instancegen import generate
from .invariants import equivalent, verify_decomposition
from .linalg_core import Tolerances
from .minkowski import classify, properties
from .operators import make_operator
from .scalar_product import make_space

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_NOT_SELF_ADJOINT = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY_FAILED = 4
EXIT_INEQUIVALENT = 5


class InputError(ValueError):
    pass


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        # JSON has no inf/nan
        return "null"
    return format(x, ".17g")


def dumps(obj):
    """JSON text with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _matrix(rows):
    return [[float(v) for v in row] for row in np.asarray(rows, dtype=float)]


def _read(path):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        return json.loads(text)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _field(doc, key, path):
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"{path}: missing field {key!r}")
    return doc[key]


def _operator(doc, path, tol):
    G = np.array(_field(doc, "metric", path), dtype=float)
    T = np.array(_field(doc, "operator", path), dtype=float)
    return make_operator(make_space(G, tol), T, tol)


def _form(items, path):
    try:
        return CanonicalForm.from_json(items)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad tuple list ({exc})") from exc


def _emit(doc, tol):
    doc = dict(doc)
    doc["tolerances"] = tol.as_dict()
    sys.stdout.write(dumps(doc) + "\n")


def cmd_canonicalize(args, tol):
    doc = _read(args.input)
    op = _operator(doc, args.input, tol)
    dec = decompose(op, tol, args.seed)
    diag = dec.diagnostics
    _emit({
        "tuples": dec.form.to_json(),
        "basis": _matrix(dec.P),
        "canonical_metric": _matrix(dec.canonical_metric),
        "canonical_operator": _matrix(dec.canonical_operator),
        "residual_metric": dec.residual_metric,
        "residual_operator": dec.residual_operator,
        "diagnostics": {
            "leading_products": [float(v) for v in diag.get("leading_products", [])],
            "cond_basis": diag.get("cond_P", 1.0),
        },
        "metric": _matrix(op.G),
        "operator": _matrix(op.T),
    }, tol)
    return EXIT_OK


def cmd_verify(args, tol):
    doc = _read(args.input)
    op = _operator(doc, args.input, tol)
    dpath = args.decomposition or args.input
    ddoc = _read(dpath) if args.decomposition else doc
    form = _form(_field(ddoc, "tuples", dpath), dpath)
    P = np.array(_field(ddoc, "basis", dpath), dtype=float)
    if P.ndim != 2:
        raise InputError(f"{dpath}: basis must be a matrix")
    report = verify_decomposition(op, Decomposition(form, P, math.nan, math.nan), tol)
    _emit(report, tol)
    return EXIT_OK if report["pass"] else EXIT_VERIFY_FAILED


def cmd_equiv(args, tol):
    op_a = _operator(_read(args.first), args.first, tol)
    op_b = _operator(_read(args.second), args.second, tol)
    flag, pairing = equivalent(op_a, op_b, tol, args.seed)
    _emit({"equivalent": flag, "pairing": [[a.to_json(), b.to_json()] for a, b in pairing]}, tol)
    return EXIT_OK if flag else EXIT_INEQUIVALENT


def cmd_classify(args, tol):
    op = _operator(_read(args.input), args.input, tol)
    cls = classify(op, tol, args.seed)
    props = properties(op, tol, args.seed)
    _emit({
        "class": cls.label,
        "witness": cls.witness.to_json(),
        "tuples": cls.form.to_json(),
        "properties": props.as_dict(),
    }, tol)
    return EXIT_OK


def cmd_generate(args, tol):
    doc = _read(args.input)
    items = doc if isinstance(doc, list) else _field(doc, "tuples", args.input)
    form = _form(items, args.input)
    inst = generate(form, args.seed, args.cond, tol)
    _emit({
        "metric": _matrix(inst.space.G),
        "operator": _matrix(inst.op.T),
        "scrambler": _matrix(inst.Q),
        "tuples": form.to_json(),
        "seed": args.seed,
        "cond": args.cond,
    }, tol)
    return EXIT_OK


def _seed(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be a non-negative integer")
    return value


def _cond(text):
    value = float(text)
    if not value >= 1:
        raise argparse.ArgumentTypeError("cond must be >= 1")
    return value


def _positive(text):
    value = float(text)
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="metricjordan",
                                     description="Metric-Jordan canonical forms of self-adjoint operators.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank-tol", type=_positive, default=Tolerances.rank_tol)
    common.add_argument("--eig-tol", type=_positive, default=Tolerances.eig_cluster_tol)
    common.add_argument("--residual-tol", type=_positive, default=Tolerances.residual_tol)
    common.add_argument("--seed", type=_seed, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonicalize", parents=[common], help="canonical form and adapted basis")
    p.add_argument("input", help="JSON with metric and operator, or - for stdin")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("verify", parents=[common], help="recheck a decomposition")
    p.add_argument("input", help="JSON with metric and operator (and tuples/basis if no second file)")
    p.add_argument("decomposition", nargs="?", help="JSON with tuples and basis")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("equiv", parents=[common], help="test isometric equivalence")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("classify", parents=[common], help="index-1 variant and properties")
    p.add_argument("input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("generate", parents=[common], help="instance with a prescribed form")
    p.add_argument("input", help="JSON list of tuples or {\"tuples\": [...]}")
    p.add_argument("--cond", type=_cond, default=100.0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        tol = Tolerances(args.rank_tol, args.eig_tol, args.residual_tol)
        return args.func(args, tol)
    except NotSelfAdjointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_SELF_ADJOINT
    except (NumericalFailure, DegenerateMetricError) as exc:
        # a metric that is singular at rank_tol is a tolerance outcome, not bad input
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, DomainError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
