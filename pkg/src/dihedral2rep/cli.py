"""Command-line interface.

Exit status: 0 when every check passes, 1 when a check fails, 2 on invalid
input (unreadable graph files, bad expressions, inconsistent options).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import bigraph, bimod, calculus, classify, hecke
from .bigraph import GraphError
from .bimod import BoundaryError
from .calculus import DiagramSyntaxError, UndefinedJWError, WeightingError
from .scalars import embed_complex


class InputError(Exception):
    pass


def _read_graph(path: str) -> bigraph.BipartiteGraph:
    try:
        with open(path, "rb") as fh:
            return bigraph.load(fh.read())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except (GraphError, ValueError, KeyError, TypeError) as e:
        raise InputError(f"{path}: {e}") from None


def _parse_n(text: Optional[str]):
    if text is None:
        return None
    if text == hecke.INFINITY:
        return hecke.INFINITY
    try:
        n = int(text)
    except ValueError:
        raise InputError(f"--n must be a positive integer or 'inf', got {text!r}") from None
    if n < 1:
        raise InputError("--n must be positive")
    return n


def _num(x):
    if isinstance(x, complex):
        return x.real if abs(x.imag) < 1e-15 else [x.real, x.imag]
    return x


def choose_weighting(g: bigraph.BipartiteGraph, n, force_float: bool, tol: float) -> tuple[calculus.Weighting, str]:
    """Exact table weighting for ADE graphs at finite n unless float mode is requested; PF weighting otherwise.

    The table weighting always lives over the graph's own Coxeter number, so
    running it against a different n makes the n-dependent checks fail.
    """
    layout = bigraph.ade_layout(g)
    if layout is not None and not force_float and isinstance(n, int):
        return calculus.weighting_table_ade(g), f"table weighting over Q(q), q primitive {2 * layout.ade.coxeter}th root"
    alpha, q, w = calculus.weighting_pf(g, tol)
    return w, f"Perron-Frobenius weighting, alpha = {alpha:.12g}, q = {q:.12g}"


class Output:
    def __init__(self, command: str, as_json: bool):
        self.command = command
        self.as_json = as_json
        self.items: list[dict] = []
        self.data: dict = {}
        self.lines: list[str] = []

    def check(self, name: str, passed: bool, detail=None) -> None:
        self.items.append({"name": name, "passed": bool(passed), "detail": None if detail is None else str(detail)})
        mark = "PASS" if passed else "FAIL"
        self.lines.append(f"  [{mark}] {name}" + (f": {detail}" if detail is not None and not passed else ""))

    def info(self, key: str, value, text: Optional[str] = None) -> None:
        self.data[key] = value
        self.lines.append(text if text is not None else f"{key}: {value}")

    @property
    def passed(self) -> bool:
        return all(it["passed"] for it in self.items)

    def emit(self) -> int:
        status = "pass" if self.passed else "fail"
        if self.as_json:
            print(json.dumps({"command": self.command, "status": status, "items": self.items, **self.data},
                             indent=2, default=str))
        else:
            for line in self.lines:
                print(line)
            print(f"status: {status}")
        return 0 if self.passed else 1


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_graph_analyze(args, out: Output) -> None:
    g = _read_graph(args.file)
    cp = bigraph.char_poly(g)
    spectrum = bigraph.spectrum_float(g)
    ade = bigraph.recognize_ade(g)
    out.info("vertices", len(g))
    out.info("color_class_sizes", {"s": len(g.s_vertices), "t": len(g.t_vertices)})
    out.info("char_poly", cp, f"char_poly (lowest degree first): {cp}")
    out.info("spectrum", [round(x, 12) for x in spectrum])
    out.info("spectral_radius", bigraph.spectral_radius(g))
    out.info("ade", None if ade is None else {"family": ade.family, "rank": ade.rank},
             f"ADE type: {ade if ade else 'none'}")
    out.info("coxeter_number", None if ade is None else ade.coxeter)


def cmd_graph_iso(args, out: Output) -> None:
    g1, g2 = _read_graph(args.file1), _read_graph(args.file2)
    iso = bigraph.is_isomorphic_bipartite(g1, g2)
    out.info("isomorphic", iso is not None)
    out.info("mapping", None if iso is None else {str(k): v for k, v in iso.items()})
    out.info("spectrum_color_equivalent", bigraph.spectrum_color_equivalent(g1, g2))


def cmd_weighting(args, out: Output) -> None:
    g = _read_graph(args.file)
    if args.pf:
        alpha, q, w = calculus.weighting_pf(g, args.tol)
        out.info("alpha", alpha)
        out.info("q", _num(q), f"q: {q}")
        out.info("weights", {str(v): _num(x) for v, x in w.weights.items()})
    else:
        n = _parse_n(args.n)
        if not isinstance(n, int):
            raise InputError("table weightings need a finite --n")
        layout = bigraph.ade_layout(g)
        if layout is None:
            raise InputError("graph is not of ADE type; use --pf")
        from .scalars import CyclotomicField
        try:
            w = calculus.weighting_table_ade(g, CyclotomicField(n))
        except WeightingError as e:
            raise InputError(str(e)) from None
        out.info("n", n)
        out.info("weights", {str(v): str(x) for v, x in w.weights.items()})
        out.info("weights_numeric", {str(v): _num(embed_complex(x)) for v, x in w.weights.items()})
    out.check("BF2 condition", calculus.check_bf2(g, w))


def cmd_verify(args, out: Output) -> None:
    g = _read_graph(args.file)
    n = _parse_n(args.n)
    relations = None
    if args.relations:
        relations = [r.strip() for r in args.relations.split(",") if r.strip()]
        unknown = set(relations) - set(calculus.RELATION_GROUPS)
        if unknown:
            raise InputError(f"unknown relations {sorted(unknown)}; choose from {', '.join(calculus.RELATION_GROUPS)}")
    w, how = choose_weighting(g, n, args.float, args.tol)
    out.info("weighting", how)
    out.check("BF2 condition on weights", calculus.check_bf2(g, w))
    n_run = None if n == hecke.INFINITY else n
    report = calculus.relation_suite(g, w, n_run, relations)
    for c in report.checks:
        out.check(c.name, c.passed, c.detail)
    if n_run is not None and (relations is None or "2nv2" in relations):
        try:
            prev = calculus.Realization(g, w, n_run).jw(n_run - 1, "s")
            out.check(f"JW_{n_run - 1}[s] != 0", not prev.is_zero())
        except UndefinedJWError as e:
            out.check(f"JW_{n_run - 1}[s] != 0", False, e)


def _max_abs(m: bimod.BimoduleMorphism) -> float:
    vals = [abs(complex(x)) if not isinstance(x, complex) else abs(x)
            for v in m.images.values() for x in v.values()]
    return max(vals, default=0.0)


def cmd_jw(args, out: Output) -> None:
    g = _read_graph(args.file)
    n = _parse_n(args.n)
    if not isinstance(n, int):
        raise InputError("jw needs a finite --n")
    k = args.k if args.k is not None else n
    if k < 0:
        raise InputError("--k must be non-negative")
    w, how = choose_weighting(g, n, args.float, args.tol)
    out.info("weighting", how)
    R = calculus.Realization(g, w, n)
    for c in ("s", "t"):
        try:
            m = R.jw(k, c)
        except UndefinedJWError as e:
            out.check(f"JW_{k}[{c}] defined", False, e)
            continue
        zero = m.is_zero()
        out.info(f"JW_{k}[{c}]", {"zero": zero, "generator_entries": m.nnz(), "max_abs": _max_abs(m)},
                 f"JW_{k}[{c}]: {'zero' if zero else 'nonzero'}, {m.nnz()} generator entries, "
                 f"max |coefficient| = {_max_abs(m):.6g}")
        if k == n:
            out.check(f"JW_{n}[{c}] = 0", zero)


def cmd_theta(args, out: Output) -> None:
    g = _read_graph(args.file)
    ms, mt = bimod.theta_matrix(g, "s"), bimod.theta_matrix(g, "t")
    out.info("basis", g.order, f"basis [P_v], v in {g.order}")
    out.info("theta_s", hecke.laurent_matrix_to_strings(ms), "theta_s: " + json.dumps(hecke.laurent_matrix_to_strings(ms)))
    out.info("theta_t", hecke.laurent_matrix_to_strings(mt), "theta_t: " + json.dumps(hecke.laurent_matrix_to_strings(mt)))
    n = _parse_n(args.n)
    if n is not None:
        rep = hecke.verify_bs_relations(ms, mt, n)
        for c in rep.checks:
            out.check(c.name, c.passed, c.detail)


def cmd_eval(args, out: Output) -> None:
    g = _read_graph(args.file)
    n = _parse_n(args.n)
    n_fin = n if isinstance(n, int) else None
    try:
        d = calculus.parse(args.expr, n_fin)
    except (DiagramSyntaxError, BoundaryError) as e:
        raise InputError(str(e)) from None
    w, how = choose_weighting(g, n, args.float, args.tol)
    try:
        m = calculus.Realization(g, w, n_fin).evaluate(d)
    except (UndefinedJWError, ZeroDivisionError) as e:
        raise InputError(str(e)) from None
    out.info("expression", calculus.to_text(d))
    out.info("weighting", how)
    out.info("source", "".join(d.source) or "∅")
    out.info("target", "".join(d.target) or "∅")
    out.info("degree", m.degree)
    entries = []
    for b in m.source.basis():
        for t, c in sorted(m.apply(b).items()):
            if not w.ring.is_zero(c):
                entries.append({"source": m.source.label(b), "target": m.target.label(t), "coefficient": str(c)})
    out.info("entries", entries, f"nonzero entries: {len(entries)}")
    for e in entries[: args.limit]:
        out.lines.append(f"  {e['source']}  ->  {e['coefficient']} * {e['target']}")
    if len(entries) > args.limit:
        out.lines.append(f"  ... {len(entries) - args.limit} more")


def cmd_classify(args, out: Output) -> None:
    n = _parse_n(args.n)
    if not isinstance(n, int) or n < 2:
        raise InputError("classify needs a finite --n >= 2")
    rep = classify.equivalence_classes(n)
    out.data.update(rep.to_dict())
    out.lines.append(f"n = {n}: {len(rep.classes)} classes, {len(rep.decat_classes)} decategorification classes")
    for k, c in enumerate(rep.classes):
        out.lines.append(f"  [{k}] {c.ade} ({c.coloring}), decat class {c.decat_class_id}")
    out.lines.append("rank 1: the one-vertex graphs (colored s or t)")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dihedral2rep", description="Dihedral 2-representations from bipartite graphs")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=True):
        sp.add_argument("--json", action="store_true", help="machine-readable report")
        if tol:
            sp.add_argument("--tol", type=float, default=1e-9, help="float-mode tolerance")

    g = sub.add_parser("graph", help="graph analysis")
    gsub = g.add_subparsers(dest="graph_command", required=True)
    ga = gsub.add_parser("analyze")
    ga.add_argument("file")
    common(ga, tol=False)
    ga.set_defaults(func=cmd_graph_analyze)
    gi = gsub.add_parser("iso")
    gi.add_argument("file1")
    gi.add_argument("file2")
    common(gi, tol=False)
    gi.set_defaults(func=cmd_graph_iso)

    w = sub.add_parser("weighting", help="table or Perron-Frobenius weighting")
    w.add_argument("file")
    grp = w.add_mutually_exclusive_group(required=True)
    grp.add_argument("--n")
    grp.add_argument("--pf", action="store_true")
    common(w)
    w.set_defaults(func=cmd_weighting)

    v = sub.add_parser("verify", help="relation suite")
    v.add_argument("file")
    v.add_argument("--n", required=True)
    v.add_argument("--relations", help="comma-separated subset of " + ",".join(calculus.RELATION_GROUPS))
    v.add_argument("--float", action="store_true", help="use the Perron-Frobenius weighting in floating point")
    common(v)
    v.set_defaults(func=cmd_verify)

    j = sub.add_parser("jw", help="evaluate a Jones-Wenzl projector")
    j.add_argument("file")
    j.add_argument("--n", required=True)
    j.add_argument("--k", type=int)
    j.add_argument("--float", action="store_true")
    common(j)
    j.set_defaults(func=cmd_jw)

    t = sub.add_parser("theta", help="Grothendieck group matrices")
    t.add_argument("file")
    t.add_argument("--n")
    common(t, tol=False)
    t.set_defaults(func=cmd_theta)

    e = sub.add_parser("eval", help="evaluate a diagram expression")
    e.add_argument("file")
    e.add_argument("--n", required=True)
    e.add_argument("--expr", required=True)
    e.add_argument("--float", action="store_true")
    e.add_argument("--limit", type=int, default=50, help="entries printed in text mode")
    common(e)
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("classify", help="classification for a Coxeter number")
    c.add_argument("--n", required=True)
    common(c, tol=False)
    c.set_defaults(func=cmd_classify)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    name = args.command + (f" {args.graph_command}" if args.command == "graph" else "")
    out = Output(name, args.json)
    try:
        args.func(args, out)
    except (InputError, GraphError, WeightingError, DiagramSyntaxError, BoundaryError) as e:
        if args.json:
            print(json.dumps({"command": name, "status": "error", "items": [], "error": str(e)}, indent=2))
        print(f"error: {e}", file=sys.stderr)
        return 2
    return out.emit()


if __name__ == "__main__":
    sys.exit(main())
