"""Batch command-line interface.

Subcommands map one-to-one onto library operations:

    starcycle graphs enumerate --n N --m M --edges E
    starcycle weights compute --n N --m M --alpha a1,a2,a3 --samples S --seed K [--out T.json]
    starcycle star apply --pi PI --f "<poly>" --g "<poly>" [--order N] [--table T.json]
    starcycle check {jacobi,divergence,cyclic,closed,assoc,alpha} --pi PI ...

Exit codes: 0 all checks passed, 1 a check failed (report emitted), 2
usage or input error.  Reports embed sha256 hashes of every file input
plus the weight-table provenance, contain no timestamps, and are dumped
canonically, so identical invocations produce byte-identical JSON.
Thread count comes from the STARCYCLE_THREADS environment variable only.
"""

import argparse
import hashlib
import json
import os
import sys
from importlib import resources

from .angles import AngleContext
from .graphs import enumerate_graphs, star_graphs
from .poly import Polynomial
from .polyvector import PolyVector, VolumeForm
from .star import (
    assemble_star,
    check_alpha_independence,
    check_associative,
    check_closed,
    check_cyclic,
    star_apply,
)
from .weights import WeightTable, compute_weight

BUNDLED_PI = ("moyal", "so3", "nondiv")


class InputError(Exception):
    pass


# ---------------------------------------------------------------- inputs

def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _load_pi(spec: str):
    """Bivector from a JSON path or a bundled name (moyal, so3, nondiv)."""
    name = spec[:-5] if spec.endswith(".json") else spec
    try:
        if name in BUNDLED_PI:
            blob = (resources.files("starcycle") / ("data/pi/%s.json" % name)).read_bytes()
            label = "bundled:%s" % name
        else:
            with open(spec, "rb") as fh:
                blob = fh.read()
            label = spec
    except OSError as e:
        raise InputError("cannot read bivector %r: %s" % (spec, e))
    try:
        pi = PolyVector.from_json(json.loads(blob))
    except (ValueError, KeyError, json.JSONDecodeError) as e:
        raise InputError("bad bivector file %r: %s" % (spec, e))
    if pi.degree != 1:
        raise InputError("%r is not a bivector (degree %d)" % (spec, pi.degree))
    return pi, {"path": label, "sha256": _sha256(blob)}


def _load_vol(spec, dim: int):
    """Volume form from a JSON path; default is the constant density."""
    if spec is None:
        return VolumeForm.constant(dim), {"path": "constant", "sha256": None}
    try:
        with open(spec, "rb") as fh:
            blob = fh.read()
        vol = VolumeForm.from_json(json.loads(blob))
    except OSError as e:
        raise InputError("cannot read volume form %r: %s" % (spec, e))
    except (ValueError, KeyError, json.JSONDecodeError) as e:
        raise InputError("bad volume form file %r: %s" % (spec, e))
    if vol.dim != dim:
        raise InputError("volume form dim %d does not match bivector dim %d" % (vol.dim, dim))
    return vol, {"path": spec, "sha256": _sha256(blob)}


def _load_table(spec):
    if spec is None:
        table = WeightTable.builtin()
        label = "builtin"
    else:
        try:
            table = WeightTable.load(spec)
        except OSError as e:
            raise InputError("cannot read weight table %r: %s" % (spec, e))
        except (ValueError, KeyError, json.JSONDecodeError) as e:
            raise InputError("bad weight table file %r: %s" % (spec, e))
        label = spec
    return table, {"path": label, "sha256": table.fingerprint(),
                   "provenance": table.provenance()}


def _parse_alpha(text: str, m: int):
    try:
        alphas = tuple(float(a) for a in text.split(","))
    except ValueError:
        raise InputError("bad alpha list %r" % text)
    if len(alphas) != m:
        raise InputError("alpha list %r has %d entries, expected %d" % (text, len(alphas), m))
    return alphas


def _parse_poly(text: str, dim: int) -> Polynomial:
    try:
        return Polynomial.parse(text, dim)
    except ValueError as e:
        raise InputError(str(e))


# ---------------------------------------------------------------- output

def _emit(report: dict, args) -> int:
    blob = json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(blob)
    if args.format == "json":
        sys.stdout.write(blob)
    else:
        for line in _text_summary(report):
            print(line)
    return 0 if report.get("passed", True) else 1


def _text_summary(report: dict):
    cmd = report["command"]
    yield "%s: %s" % (cmd, "PASS" if report.get("passed", True) else "FAIL")
    result = report.get("result", {})
    if cmd == "graphs enumerate":
        yield "count: %d" % result["count"]
        for key in result["graphs"]:
            yield "  " + key
    elif cmd == "weights compute":
        for e in result["entries"]:
            yield "  %-24s %+11.6f +- %.6f  (samples %d, seed %d)" % (
                e["graph"], e["value"], e["std_error"], e["samples"], e["seed"])
    elif cmd == "star apply":
        for n, level in enumerate(result["levels"]):
            yield "  hbar^%d: %s" % (n, level)
    elif cmd == "check jacobi":
        if not result["components"]:
            yield "  [pi,pi] = 0"
        for key, text in result["components"].items():
            yield "  [pi,pi]_{%s} = %s" % (key, text)
    elif cmd == "check divergence":
        yield "  div(pi) = %s" % (result["divergence"] or "0")
    elif cmd in ("check cyclic", "check closed"):
        field = "cyclic" if cmd == "check cyclic" else "closed"
        for row in result["orders"]:
            status = "ok" if row[field] else "residual: %s" % row["residual"]
            yield "  order %d: %s" % (row["order"], status)
    elif cmd == "check assoc":
        yield "  trials: %d, failures: %d" % (result["trials"], len(result["failures"]))
        for f in result["failures"][:5]:
            yield "    trial %d order %d: %s" % (f["trial"], f["order"], f["residual"])
    elif cmd == "check alpha":
        yield "  divergence-free: %s" % result["divergence_free"]
        for row in result["coefficients"]:
            if not row["ok"]:
                yield "    slots %s monomial %s: |delta| %.3g > tol %.3g" % (
                    "|".join(row["slots"]), row["monomial"], row["delta"], row["tolerance"])


# ---------------------------------------------------------------- handlers

def _cmd_graphs_enumerate(args):
    try:
        graphs = enumerate_graphs(args.n, args.m, args.edges)
    except ValueError as e:
        raise InputError(str(e))
    return {
        "command": "graphs enumerate",
        "options": {"n": args.n, "m": args.m, "edges": args.edges},
        "result": {"count": len(graphs), "graphs": [g.canonical_key() for g in graphs]},
        "passed": True,
    }


def _cmd_weights_compute(args):
    if args.samples > 0 and args.seed is None:
        raise InputError("--seed is required when --samples > 0")
    if args.out_table and os.path.exists(args.out_table):
        try:
            table = WeightTable.load(args.out_table)
        except (OSError, ValueError, KeyError) as e:
            raise InputError("cannot merge into %r: %s" % (args.out_table, e))
    else:
        table = WeightTable()
    entries = []
    if args.m == 2:
        if args.alpha is not None:
            raise InputError("the 2-boundary route has no alpha weights; drop --alpha")
        graphs = [(g, None) for g in star_graphs(args.n, 2)]
    else:
        if args.alpha is None:
            raise InputError("--alpha is required for m >= 3")
        alphas = _parse_alpha(args.alpha, args.m)
        ctx = AngleContext.standard(alphas)
        graphs = [(g, ctx) for g in star_graphs(args.n, args.m)]
    from .weights import halfplane_weight
    for k, (g, ctx) in enumerate(graphs):
        if ctx is None:
            entry = halfplane_weight(g, samples=args.samples, seed=args.seed + k)
        else:
            entry = compute_weight(g, ctx, samples=args.samples, seed=args.seed + k)
        table.add(entry)
        entries.append(entry.to_json())
    if args.out_table:
        table.save(args.out_table)
    return {
        "command": "weights compute",
        "options": {"n": args.n, "m": args.m, "alpha": args.alpha,
                    "samples": args.samples, "seed": args.seed},
        "result": {"entries": entries, "table_sha256": table.fingerprint()},
        "passed": True,
    }


def _cmd_star_apply(args):
    pi, pi_meta = _load_pi(args.pi)
    table, table_meta = _load_table(args.table)
    f = _parse_poly(args.f, pi.dim)
    g = _parse_poly(args.g, pi.dim)
    try:
        s = assemble_star(pi, table, args.order)
    except ValueError as e:
        raise InputError(str(e))
    levels = star_apply(s, f, g)
    return {
        "command": "star apply",
        "inputs": {"pi": pi_meta, "table": table_meta},
        "options": {"order": args.order, "f": args.f, "g": args.g},
        "result": {"levels": [p.render() for p in levels]},
        "passed": True,
    }


def _cmd_check(args):
    pi, pi_meta = _load_pi(args.pi)
    inputs = {"pi": pi_meta}
    options = {}
    if args.which == "jacobi":
        jac = pi.schouten(pi)
        result = {"components": {",".join(map(str, k)): p.render()
                                 for k, p in sorted(jac.components.items())}}
        passed = jac.is_zero()
    elif args.which == "divergence":
        vol, vol_meta = _load_vol(args.vol, pi.dim)
        inputs["vol"] = vol_meta
        div = pi.divergence(vol)
        result = {"divergence": div.render() if not div.is_zero() else None}
        passed = div.is_zero()
    elif args.which in ("cyclic", "closed"):
        vol, vol_meta = _load_vol(args.vol, pi.dim)
        table, table_meta = _load_table(args.table)
        inputs["vol"] = vol_meta
        inputs["table"] = table_meta
        options["order"] = args.order
        try:
            s = assemble_star(pi, table, args.order)
            check = check_cyclic if args.which == "cyclic" else check_closed
            result = check(s, vol)
        except ValueError as e:
            raise InputError(str(e))
        passed = result["passed"]
    elif args.which == "assoc":
        table, table_meta = _load_table(args.table)
        inputs["table"] = table_meta
        options.update({"order": args.order, "trials": args.trials, "seed": args.seed})
        try:
            s = assemble_star(pi, table, args.order)
            result = check_associative(s, trials=args.trials, seed=args.seed)
        except ValueError as e:
            raise InputError(str(e))
        passed = result["passed"]
    else:  # alpha
        vol, vol_meta = _load_vol(args.vol, pi.dim)
        inputs["vol"] = vol_meta
        if args.seed is None:
            raise InputError("--seed is required when --samples > 0")
        a1 = _parse_alpha(args.alpha, 3)
        a2 = _parse_alpha(args.alpha2, 3)
        options.update({"order": args.order, "alpha": args.alpha, "alpha2": args.alpha2,
                        "samples": args.samples, "seed": args.seed,
                        "tolerance": args.tolerance})
        table = WeightTable()
        for side, alphas in enumerate((a1, a2)):
            ctx = AngleContext.standard(alphas)
            for k, g in enumerate(star_graphs(args.order, 3)):
                table.add(compute_weight(g, ctx, samples=args.samples,
                                         seed=args.seed + 1000 * side + k))
        try:
            result = check_alpha_independence(pi, a1, a2, table, args.order, vol,
                                              floor=args.tolerance)
        except ValueError as e:
            raise InputError(str(e))
        passed = result["passed"]
    return {
        "command": "check " + args.which,
        "inputs": inputs,
        "options": options,
        "result": result,
        "passed": passed,
    }


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="starcycle",
                                 description="Kontsevich star products: graphs, weights, checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="write the canonical JSON report to this path")

    graphs = sub.add_parser("graphs", help="graph enumeration").add_subparsers(
        dest="subcommand", required=True)
    p = graphs.add_parser("enumerate", help="list admissible graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    common(p)
    p.set_defaults(handler=_cmd_graphs_enumerate)

    weights = sub.add_parser("weights", help="Monte Carlo weights").add_subparsers(
        dest="subcommand", required=True)
    p = weights.add_parser("compute", help="compute weights for all star graphs at (n, m)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha", help="comma-separated boundary weights, length m (m >= 3)")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-table", metavar="PATH",
                   help="save the table JSON here; merges into an existing file")
    common(p)
    p.set_defaults(handler=_cmd_weights_compute)

    star = sub.add_parser("star", help="star product").add_subparsers(
        dest="subcommand", required=True)
    p = star.add_parser("apply", help="apply f * g level by level")
    p.add_argument("--pi", required=True, help="bivector JSON path or bundled name")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--table", help="weight table JSON (default: bundled exact table)")
    common(p)
    p.set_defaults(handler=_cmd_star_apply)

    check = sub.add_parser("check", help="theorem-level checks").add_subparsers(
        dest="which", required=True)
    for which in ("jacobi", "divergence", "cyclic", "closed", "assoc", "alpha"):
        p = check.add_parser(which)
        p.add_argument("--pi", required=True, help="bivector JSON path or bundled name")
        if which in ("divergence", "cyclic", "closed", "alpha"):
            p.add_argument("--vol", help="volume form JSON (default: constant)")
        if which in ("cyclic", "closed", "assoc"):
            p.add_argument("--order", type=int, default=2)
            p.add_argument("--table", help="weight table JSON (default: bundled exact table)")
        if which == "assoc":
            p.add_argument("--trials", type=int, default=20)
            p.add_argument("--seed", type=int, default=0)
        if which == "alpha":
            p.add_argument("--order", type=int, default=1)
            p.add_argument("--alpha", required=True)
            p.add_argument("--alpha2", required=True)
            p.add_argument("--samples", type=int, default=1 << 20)
            p.add_argument("--seed", type=int)
            p.add_argument("--tolerance", type=float, default=1e-3)
        common(p)
        p.set_defaults(handler=_cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.handler(args)
    except InputError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    return _emit(report, args)


if __name__ == "__main__":
    sys.exit(main())
