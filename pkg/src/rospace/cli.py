"""Command line interface: ``rospace <command> [flags]``.

Exit codes: 0 ok, 1 a mathematical property failed, 2 usage, I/O or
precondition error.  Output is deterministic for fixed inputs and flags.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import io
from .acceptance import CRITERIA, run_acceptance
from .boundary import boundary_simplex, convergence_table
from .enumeration import enumerate_maximal_agraphs
from .errors import AuditError, InvariantFailure, RospaceError, SchemaError
from .fixtures import FIXTURE_DIR, build
from .gog import ball_oracle_length, tree_from_point
from .graphs import dimension_report, validate_point
from .invariants import (lattice_L, lattice_Lambda, q_rank_report, total_index,
                         validate_very_small, verify_prop41)
from .systems import (ball_matches_tree, build_tk_ball, orbit_index_table, resolve_point,
                      system_from_tree)
from .words import FreeFactorSystem, Word, canonical_words, word_ball

EXIT = {"ok": 0, "fail": 1, "error": 2}


@dataclass
class CommandResult:
    status: str
    payload: dict
    human_summary: str = ""
    extra: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]


def _status(ok: bool) -> str:
    return "ok" if ok else "fail"


def _table(rows, header) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header).rstrip(), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*r).rstrip() for r in rows]
    return "\n".join(lines)


# -- inputs ----------------------------------------------------------------------


def resolve_path(path: str) -> Path:
    """A file path, falling back to the shipped ``fixtures/`` directory."""
    p = Path(path)
    if p.exists():
        return p
    if p.parts and p.parts[0] == "fixtures":
        q = FIXTURE_DIR.joinpath(*p.parts[1:])
        if q.exists():
            return q
    raise SchemaError(f"no such file: {path}", ())


def _system(args) -> FreeFactorSystem:
    if args.system:
        doc = io.read_json(resolve_path(args.system))
        return io.system_from_json(doc.get("system", doc) if isinstance(doc, dict) else doc, ())
    if args.n is None:
        raise SchemaError("give --system PATH or --n N [--factors R,R,...]", ())
    ranks = [int(r) for r in args.factors.split(",") if r.strip()] if args.factors else []
    try:
        return FreeFactorSystem.standard(args.n, ranks)
    except (RospaceError, ValueError) as exc:
        raise SchemaError(str(exc), ("system",)) from None


def _tree(args):
    if not args.tree:
        raise SchemaError("--tree PATH is required", ())
    kind, obj = io.load(resolve_path(args.tree))
    if kind == "point":
        return tree_from_point(obj), obj
    if kind == "tree":
        return obj, None
    raise SchemaError(f"expected a tree or point document, got {kind}", ("kind",))


def _label(lbl) -> str:
    if lbl.kind == "special":
        return f"A{lbl.factor + 1}"
    return f"<{lbl.word}>" if lbl.kind == "cyclic" else "1"


def _words(args, system) -> list:
    if args.word:
        return [Word.parse(w, system) for w in args.word]
    return canonical_words(word_ball(system, args.ball if args.ball is not None else 2))


# -- commands --------------------------------------------------------------------


def cmd_dims(args) -> CommandResult:
    rep = dimension_report(_system(args))
    doc = rep.to_json()
    return CommandResult("ok", doc, _table([[doc[k] for k in ("V", "E", "dim_cv", "dim_spine")]],
                                           ["V", "E", "dim_cv", "dim_spine"]))


def cmd_validate(args) -> CommandResult:
    path = args.path or args.tree or args.system
    if not path:
        raise SchemaError("give a file to validate", ())
    doc = io.read_json(resolve_path(path))
    kind = io.detect_kind(doc)
    if kind == "system":
        S = io.system_from_json(doc, ())
        return CommandResult("ok", {"kind": kind, "ok": True, "system": S.to_json()},
                             f"system: n={S.n}, k={S.k}, ok")
    if kind == "point":
        rep = validate_point(io.point_from_json(doc))
        out = {"kind": kind, **rep.to_json()}
    elif kind == "tree":
        rep = validate_very_small(io.tree_from_json(doc))
        out = {"kind": kind, **rep.to_json()}
    else:
        problems = io.check_systemK_json(doc)
        out = {"kind": kind, "ok": not problems, "problems": problems}
    ok = out["ok"]
    text = f"{kind}: " + ("ok" if ok else f"fails {out.get('clause') or ''} {out.get('detail') or ''}"
                          + "; ".join(out.get("problems", [])))
    return CommandResult(_status(ok), out, text.strip())


def cmd_enumerate(args) -> CommandResult:
    res = enumerate_maximal_agraphs(_system(args), count_all=args.all)
    doc = res.to_json()
    rows = [[i + 1, len(c.graph.vertices), len(c.graph.edges),
             " ".join(f"{a}-{b}" for a, b in c.graph.edges.values())]
            for i, c in enumerate(res.maximal)]
    text = f"V={res.V} E={res.E} classes={len(res.maximal)}\n" + _table(rows, ["#", "V", "E", "edges"])
    return CommandResult("ok", doc, text)


def cmd_length(args) -> CommandResult:
    T, _ = _tree(args)
    rows, out, ok = [], [], True
    for w in _words(args, T.system):
        l = T.translation_length(w)
        item = {"word": str(w), "length": l.to_json()}
        if args.oracle:
            agree = ball_oracle_length(T, w) == l
            item["oracle_agrees"] = agree
            ok &= agree
        out.append(item)
        rows.append([w, l] + ([item["oracle_agrees"]] if args.oracle else []))
    header = ["word", "length"] + (["oracle"] if args.oracle else [])
    return CommandResult(_status(ok), {"lengths": out}, _table(rows, header))


def cmd_index(args) -> CommandResult:
    T, _ = _tree(args)
    rep = total_index(T)
    doc = rep.to_json()
    rows = [[o.vertex, _label(o.label), o.v1, o.rk_st, o.index] for o in rep.orbits]
    text = _table(rows, ["vertex", "stabilizer", "v1", "rk", "index"])
    text += f"\ntotal {rep.total} (expected {rep.expected}), equality {str(rep.equality).lower()}"
    if args.orbit_graph:
        table = orbit_index_table(system_from_tree(T))
        doc["orbit_graph"] = [r.to_json() for r in table]
        return CommandResult(_status(all(r.agrees for r in table)), doc, text)
    return CommandResult("ok", doc, text)


def _lattices(args, T):
    L = lattice_L(T, radius=args.l_radius, audit_margin=args.l_margin)
    Lam = lattice_Lambda(T, radius=args.lambda_radius, audit_margin=args.lambda_margin)
    return L, Lam


def cmd_qrank(args) -> CommandResult:
    T, _ = _tree(args)
    rep = q_rank_report(T, *_lattices(args, T))
    doc = rep.to_json()
    text = _table([[rep.r_q, rep.b, rep.cor43, rep.theorem, rep.equals_theorem]],
                  ["r_Q", "b", "n-Σs+b-1", "3n+2k-3-3Σs", "equality"])
    text += f"\nL = {rep.L}\nΛ = {rep.Lambda}"
    return CommandResult("ok", doc, text)


def cmd_prop41(args) -> CommandResult:
    T, _ = _tree(args)
    rep = verify_prop41(T, *_lattices(args, T))
    doc = rep.to_json()
    rows = [["(i)", "free-generator lengths generate L mod 2Λ", rep.L_mod_2Lambda],
            ["(ii)", "base-orbit distances generate Λ mod L", rep.Lambda_mod_L],
            ["(iii)", f"2-rank of Λ is {rep.two_rank} <= {rep.bound}", rep.Lambda_two_rank]]
    return CommandResult(_status(rep.ok), doc, _table(rows, ["item", "statement", "holds"]))


def cmd_boundary(args) -> CommandResult:
    fam = boundary_simplex(_system(args), lengths=args.lengths, all_classes=args.all)
    doc = fam.to_json()
    rows = [[i + 1, len(m.tree.graph.edges), m.very_small, m.factors_elliptic,
             ",".join(str(w) for w in m.extra_elliptic), m.in_cv]
            for i, m in enumerate(fam.members)]
    text = (f"dimension {fam.dimension} (dim CV = {doc['dim_cv']})\n"
            + _table(rows, ["#", "edges", "very small", "A_i elliptic", "extra elliptic", "in CV"]))
    return CommandResult(_status(fam.valid), doc, text)


def cmd_converge(args) -> CommandResult:
    Ns = [N for N in range(-args.n_max, args.n_max + 1) if N] if args.negative \
        else list(range(1, args.n_max + 1))
    rows = convergence_table(build("x2-middle"), build("t1"), Ns, ball_radius=args.ball or 4)
    doc = {"ball": args.ball or 4, "deviations": [{"N": N, "deviation": str(d)} for N, d in rows]}
    return CommandResult("ok", doc, _table([[N, d] for N, d in rows], ["N", "deviation"]))


def cmd_resolve(args) -> CommandResult:
    T, X = _tree(args)
    sysK = resolve_point(X) if X is not None else system_from_tree(T)
    depth = args.depth if args.depth is not None else 3
    ball = build_tk_ball(sysK, depth)
    matches = ball_matches_tree(ball, sysK)
    doc = {"system": io.systemK_to_json(sysK), "ball": {**ball.to_json(), "matches_tree": matches}}
    text = (f"K: {len(sysK.points)} points, {len(sysK.moves)} partial isometries\n"
            f"T_K ball depth {depth}: {len(ball.classes)} vertices, {len(ball.edges)} edges, "
            f"branch points {ball.branch_points()}, isometric {str(ball.ok and matches).lower()}")
    return CommandResult(_status(ball.ok and matches), doc, text)


def cmd_verify(args) -> CommandResult:
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_acceptance(seed=args.seed, only=only)
    doc = {"seed": args.seed, "criteria": [r.to_json() for r in results]}
    text = "\n".join(r.line() for r in results)
    return CommandResult(_status(all(r.passed for r in results)), doc, text)


COMMANDS = {
    "dims": (cmd_dims, "dimension formulas for a free factor system"),
    "validate": (cmd_validate, "check a system, point, tree or systemK file"),
    "enumerate": (cmd_enumerate, "maximal collapsed shapes up to isomorphism"),
    "length": (cmd_length, "translation lengths of words on a tree"),
    "index": (cmd_index, "branch orbits and the total index"),
    "qrank": (cmd_qrank, "lattices L, Λ and the Q-rank bounds"),
    "prop41": (cmd_prop41, "the three generation statements for L and Λ"),
    "boundary": (cmd_boundary, "very small trees with an extra cyclic vertex group"),
    "converge": (cmd_converge, "deviation of the twisted middle point from X1"),
    "resolve": (cmd_resolve, "system of partial isometries and its T_K ball"),
    "verify": (cmd_verify, "run the acceptance suite"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", "-s", metavar="PATH")
    common.add_argument("--tree", metavar="PATH")
    common.add_argument("--word", action="append", metavar="STR")
    common.add_argument("--ball", type=int, metavar="INT")
    common.add_argument("--depth", type=int, metavar="INT")
    common.add_argument("--seed", type=int, default=0, metavar="INT")
    common.add_argument("--json", action="store_true", help="print only the JSON document")
    common.add_argument("--n", type=int)
    common.add_argument("--factors", default="", help="comma-separated factor ranks, e.g. 1,1")

    parser = argparse.ArgumentParser(prog="rospace", description="Exact computations in relative outer space.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    subs = {name: sub.add_parser(name, parents=[common], help=text)
            for name, (_, text) in COMMANDS.items()}
    subs["validate"].add_argument("path", nargs="?")
    for name in ("enumerate", "boundary"):
        subs[name].add_argument("--all", action="store_true")
    subs["boundary"].add_argument("--lengths", choices=("symbolic", "barycenter"), default="symbolic")
    subs["length"].add_argument("--oracle", action="store_true", help="cross-check with the ball oracle")
    subs["index"].add_argument("--orbit-graph", action="store_true",
                               help="also compute the index through orbit graphs")
    for name in ("qrank", "prop41"):
        subs[name].add_argument("--l-radius", type=int, default=3)
        subs[name].add_argument("--l-margin", type=int, default=2)
        subs[name].add_argument("--lambda-radius", type=int, default=None)
        subs[name].add_argument("--lambda-margin", type=int, default=1)
    subs["converge"].add_argument("--n-max", type=int, default=8)
    subs["converge"].add_argument("--negative", action="store_true", help="include N < 0")
    subs["verify"].add_argument("--only", help="comma-separated criterion numbers, e.g. 1,7")
    return parser


def run(argv) -> CommandResult:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command][0](args)
    except (InvariantFailure, AuditError) as exc:
        return CommandResult("fail", {"error": type(exc).__name__, "message": str(exc)}, str(exc))
    except RospaceError as exc:
        return CommandResult("error", {"error": type(exc).__name__, "message": str(exc)}, str(exc))


def main(argv: Optional[list] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        result = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    as_json = "--json" in argv
    doc = {"command": argv[0] if argv else "", "status": result.status, "payload": result.payload}
    if not as_json and result.human_summary and result.status != "error":
        print(result.human_summary)
        print()
    if result.status == "error" and not as_json:
        print(f"error: {result.payload.get('message', '')}", file=sys.stderr)
    print(io.dumps(doc), end="")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
