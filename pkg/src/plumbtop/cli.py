"""Command-line front end: ``plumbtop <command> ...``.

Every command prints one JSON document (sorted keys, so output is
byte-stable) or, with ``--format text``, a short human summary.  Exit
status: 0 on success, 1 when a verification fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .admissible import (
    AdmissibleSeries,
    InvalidSeries,
    NotConvolvable,
    kostant_series,
    line_certificate,
    solve_puzzle_a1,
    translate_family_member,
    verify_admissible,
)
from .brieskorn import InvalidBrieskorn, brieskorn_plumbing, brieskorn_Y
from .corpus import CorpusConfig, admissible_moves, tree_corpus
from .parallel import pmap
from .plumbing import (
    DegenerateFraming,
    InapplicableMove,
    InvalidTree,
    MoveKind,
    MoveSpec,
    PlumbingTree,
    apply_move,
    branches,
    forcing_bridges,
    framing,
    framing_matrix,
    is_reduced,
    is_weakly_negative_definite,
    reduce,
    reducible_vertices,
)
from .linalg import det
from .root_lattice import UnsupportedLattice, build_root_lattice
from .series import (
    ComputationPlan,
    PlanError,
    compute_Y_detailed,
    exponent_ring_ok,
    lower_bound,
    verify_move_invariance,
    verify_twist_independence,
    verify_weyl_invariance,
)
from .spinc import class_key, enumerate_spinc


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- input helpers


def _read_json(path: str, what: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {what} file {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc


def _tree(path: str) -> PlumbingTree:
    data = _read_json(path, "tree")
    try:
        return PlumbingTree.from_json(data)
    except InvalidTree as exc:
        raise InvalidTree(f"{path}: {exc}") from exc


def _series(spec: str, L) -> AdmissibleSeries:
    """``W``, ``translate:g1,g2,...:i`` or a JSON file with a term list."""
    if spec == "W":
        return kostant_series(L)
    if spec.startswith("translate"):
        parts = spec.split(":")
        gamma = [int(x) for x in parts[1].split(",")] if len(parts) > 1 and parts[1] else [0] * L.rank
        root = int(parts[2]) if len(parts) > 2 else 0
        if len(gamma) != L.rank:
            raise UsageError(f"translate gamma needs {L.rank} coordinates")
        return translate_family_member(L, gamma, root)
    data = _read_json(spec, "series")
    P = AdmissibleSeries.from_json(data)
    if P.lattice != L:
        raise UsageError(f"series file is for {P.lattice.name}, not {L.name}")
    return P


def _classes(T, L, which: str):
    reps = enumerate_spinc(T, L)
    if which == "all":
        return list(enumerate(reps))
    k = int(which)
    if not 0 <= k < len(reps):
        raise UsageError(f"spinc index {k} out of range (0..{len(reps) - 1})")
    return [(k, reps[k])]


def _move(args) -> MoveSpec:
    kind = MoveKind(args.kind)
    split = tuple(args.split) if args.split else None
    return MoveSpec(kind, tuple(args.site), split, tuple(args.right or ()))


def _frac(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- commands


def cmd_tree_check(args):
    T = _tree(args.tree)
    d = det(framing_matrix(T))
    if d == 0:
        raise DegenerateFraming("degenerate framing: det B = 0")
    f = framing(T)
    wnd = is_weakly_negative_definite(T)
    out = {
        "vertices": T.size,
        "determinant": f.determinant,
        "sigma": f.sigma,
        "pi": f.pi,
        "trace": f.trace,
        "weakly_negative_definite": wnd,
        "reduced": is_reduced(T),
        "reducible_vertices": reducible_vertices(T),
        "contractible_branches": [
            {"center": b.center, "vertices": list(b.vertices)} for b in branches(T) if b.contractible
        ],
        "forcing_bridges": [
            {"v": b.v, "w": b.w, "interior": list(b.interior), "delta_pi": b.delta_pi} for b in forcing_bridges(T)
        ],
    }
    return out, not (args.wnd and not wnd)


def cmd_tree_reduce(args):
    T = _tree(args.tree)
    res = reduce(T)
    return {"tree": res.tree.to_json(), "trace": [m.to_json() for m in res.trace], "complete": res.complete}, res.complete


def cmd_tree_move(args):
    T = _tree(args.tree)
    U = apply_move(T, _move(args))
    return {"tree": U.to_json(), "reduced": is_reduced(U)}, True


def cmd_spinc_list(args):
    T = _tree(args.tree)
    L = build_root_lattice(args.lattice)
    reps = enumerate_spinc(T, L)
    expected = abs(framing(T).determinant) ** L.rank
    out = {
        "lattice": L.name,
        "count": len(reps),
        "expected": expected,
        "classes": [{"index": i, "representative": a.to_json(), "key": [list(k) for k in class_key(T, L, a)]}
                    for i, a in enumerate(reps)],
    }
    return out, len(reps) == expected


def _report_json(rep):
    return {
        "p1_ok": rep.p1_ok,
        "p2_ok": rep.p2_ok,
        "p1_product_ok": rep.p1_product_ok,
        "checked_sites": rep.checked_sites,
        "skipped_sites": rep.skipped_sites,
        "violations": [[kind, [str(x) for x in site], str(val)] for kind, site, val in rep.violations],
        "caveats": rep.caveats,
    }


def cmd_puzzle_verify(args):
    L = build_root_lattice(args.lattice)
    P = _series(args.series, L)
    rep = verify_admissible(P, Fraction(args.radius))
    return {"series": P.to_json(), "radius": _frac(args.radius), **_report_json(rep), "ok": rep.ok}, rep.ok


def cmd_puzzle_solve_a1(args):
    win = solve_puzzle_a1(args.side, Fraction(args.radius))
    L = win.lattice
    W = kostant_series(L)
    sign = 1 if args.side == "vanish_positive" else -1
    # The mirror solution is W^iota(z) = -W(1/z) for A1.
    matches = all(win.coefficient(k) == sign * W.coefficient((sign * k[0],)) for k in win.table)
    nonzero = sorted((k[0], v) for k, v in win.table.items() if v)
    out = {
        "side": args.side,
        "radius": _frac(args.radius),
        "free_variables": win.free_variables,
        "matches": ("W" if sign == 1 else "W^iota") if matches else None,
        "nonzero": [[j, _frac(v)] for j, v in nonzero],
    }
    return out, matches and win.free_variables == 0


def cmd_puzzle_family(args):
    L = build_root_lattice(args.lattice)
    P = translate_family_member(L, args.gamma, args.root)
    rep = verify_admissible(P, Fraction(args.radius))
    cert = line_certificate(P)
    return {"series": P.to_json(), "line_certificate": cert.ok, **_report_json(rep), "ok": rep.ok}, True


def _y_json(res):
    return {
        "series": res.series.to_json(),
        "lower_bound": None if res.lower_bound is None else _frac(res.lower_bound),
        "lattice_points": res.lattice_points,
        "exponent_ring_ok": res.ring_ok,
        "warnings": res.warnings,
    }


def cmd_y_series(args):
    T = _tree(args.tree)
    L = build_root_lattice(args.lattice)
    P = _series(args.series, L)
    out = []
    ok = True
    for k, a in _classes(T, L, args.spinc):
        n = Fraction(args.max_exponent) if args.max_exponent is not None else None
        if n is None:
            bound = lower_bound(T, L, a)
            n = None if bound is None or not T.high_vertices else bound + Fraction(args.trunc)
        res = compute_Y_detailed(ComputationPlan(T, L, P, a, n, window=Fraction(args.trunc), want_bound=True))
        ring = res.ring_ok and exponent_ring_ok(res.series, T, L, a)
        ok &= ring
        out.append({"spinc": k, **_y_json(res), "exponent_ring_ok": ring})
    return {"lattice": L.name, "results": out}, ok


def _inv_json(k, rep, **extra):
    d = {"spinc": k, **extra, **rep.to_json()}
    return d


def cmd_verify_move(args):
    T = _tree(args.tree)
    L = build_root_lattice(args.lattice)
    P = _series(args.series, L)
    m = _move(args)
    out = []
    for k, a in _classes(T, L, args.spinc):
        rep = verify_move_invariance(T, m, L, P, a, window=Fraction(args.window))
        out.append(_inv_json(k, rep))
    ok = all(r["status"] == "equal" for r in out)
    return {"move": m.to_json(), "results": out, "ok": ok}, ok


def cmd_verify_weyl(args):
    T = _tree(args.tree)
    L = build_root_lattice(args.lattice)
    P = _series(args.series, L)
    out = []
    for k, a in _classes(T, L, args.spinc):
        for w in L.weyl_group:
            rep = verify_weyl_invariance(T, L, P, a, w, window=Fraction(args.window))
            out.append(_inv_json(k, rep, w=list(L.reduced_word(w))))
    ok = all(r["status"] == "equal" for r in out)
    return {"results": out, "ok": ok}, ok


def cmd_verify_twist(args):
    T = _tree(args.tree)
    L = build_root_lattice(args.lattice)
    P = _series(args.series, L)
    out = []
    for k, a in _classes(T, L, args.spinc):
        for w in L.weyl_group:
            rep = verify_twist_independence(T, L, P, a, w, window=Fraction(args.window))
            out.append(_inv_json(k, rep, w=list(L.reduced_word(w))))
    ok = all(r["status"] == "equal" for r in out)
    return {"results": out, "ok": ok}, ok


def _corpus_job(job):
    T, lattice, series, window = job
    L = build_root_lattice(lattice)
    P = _series(series, L)
    counts: dict = {}
    failures = []
    for m in admissible_moves(T):
        for k, a in enumerate(enumerate_spinc(T, L)):
            rep = verify_move_invariance(T, m, L, P, a, window=window)
            counts[rep.status] = counts.get(rep.status, 0) + 1
            if rep.status == "differ":
                failures.append({"move": m.to_json(), "spinc": k, "diffs": rep.to_json()["diffs"][:5]})
    return {"tree": T.to_json(), "lattice": lattice, "series": series, "counts": counts, "failures": failures}


def cmd_verify_corpus(args):
    cfg = CorpusConfig(seed=args.seed, count=args.count, max_vertices=args.max_vertices, max_det=args.max_det)
    trees = tree_corpus(cfg)
    jobs = [(T, lat, ser, Fraction(args.window)) for T in trees for lat in args.lattice for ser in args.series]
    results = pmap(_corpus_job, jobs)
    ok = all(not r["failures"] for r in results)
    return {"seed": args.seed, "count": args.count, "results": results, "ok": ok}, ok


def cmd_brieskorn(args):
    b1, b2, b3 = args.b
    data, T = brieskorn_plumbing(b1, b2, b3)
    L = build_root_lattice(args.lattice)
    P = _series(args.series, L)
    (a,) = enumerate_spinc(T, L)
    n = lower_bound(T, L, a) + Fraction(args.window)
    out = {"data": data.to_json(), "tree": T.to_json(), "truncation": _frac(n)}
    ok = True
    y_plumb = y_closed = None
    if args.via in ("plumbing", "both"):
        res = compute_Y_detailed(ComputationPlan(T, L, P, a, n, want_bound=True))
        y_plumb = res.series
        out["plumbing"] = _y_json(res)
        ok &= res.ring_ok
    if args.via in ("closed", "both"):
        y_closed = brieskorn_Y(data, L, P, n)
        out["closed"] = y_closed.to_json()
    if args.via == "both":
        diff = y_plumb.diff(y_closed)
        out["diff"] = [[_frac(e), _frac(x), _frac(y)] for e, x, y in diff]
        ok &= not diff
    return out, ok


# ---------------------------------------------------------------- parser


def _add_move_args(p):
    p.add_argument("--kind", required=True, choices=[k.value for k in MoveKind])
    p.add_argument("--site", required=True, type=int, nargs="+")
    p.add_argument("--split", type=int, nargs=2)
    p.add_argument("--right", type=int, nargs="*")


_COMMON = argparse.ArgumentParser(add_help=False)
_COMMON.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
_COMMON.add_argument("--out", default=argparse.SUPPRESS, help="write the result here instead of stdout")


def _leaf(sub, name: str) -> argparse.ArgumentParser:
    return sub.add_parser(name, parents=[_COMMON])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plumbtop", description="q-series invariants of plumbing trees")
    ap.add_argument("--version", action="version", version=f"plumbtop {__version__}")
    ap.add_argument("--format", choices=["json", "text"], default="json")
    ap.add_argument("--out", help="write the JSON result here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    tree = sub.add_parser("tree").add_subparsers(dest="action", required=True)
    p = _leaf(tree, "check")
    p.add_argument("--tree", required=True)
    p.add_argument("--wnd", action="store_true", help="fail unless weakly negative definite")
    p.set_defaults(func=cmd_tree_check)
    p = _leaf(tree, "reduce")
    p.add_argument("--tree", required=True)
    p.set_defaults(func=cmd_tree_reduce)
    p = _leaf(tree, "move")
    p.add_argument("--tree", required=True)
    _add_move_args(p)
    p.set_defaults(func=cmd_tree_move)

    spinc = sub.add_parser("spinc").add_subparsers(dest="action", required=True)
    p = _leaf(spinc, "list")
    p.add_argument("--tree", required=True)
    p.add_argument("--lattice", required=True)
    p.set_defaults(func=cmd_spinc_list)

    puzzle = sub.add_parser("puzzle").add_subparsers(dest="action", required=True)
    p = _leaf(puzzle, "verify")
    p.add_argument("--lattice", required=True)
    p.add_argument("--radius", default="60")
    p.add_argument("--series", default="W")
    p.set_defaults(func=cmd_puzzle_verify)
    p = _leaf(puzzle, "solve-a1")
    p.add_argument("--side", choices=["vanish_positive", "vanish_negative"], default="vanish_positive")
    p.add_argument("--radius", default="200")
    p.set_defaults(func=cmd_puzzle_solve_a1)
    p = _leaf(puzzle, "family")
    p.add_argument("--lattice", required=True)
    p.add_argument("--gamma", type=int, nargs="+", required=True)
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--radius", default="40")
    p.set_defaults(func=cmd_puzzle_family)

    p = _leaf(sub, "y-series")
    p.add_argument("--tree", required=True)
    p.add_argument("--lattice", required=True)
    p.add_argument("--series", default="W")
    p.add_argument("--spinc", default="0", help="class index or 'all'")
    p.add_argument("--trunc", default="24", help="exponent window above the minimal exponent")
    p.add_argument("--max-exponent", help="absolute truncation (overrides --trunc)")
    p.set_defaults(func=cmd_y_series)

    verify = sub.add_parser("verify").add_subparsers(dest="action", required=True)
    p = _leaf(verify, "move")
    p.add_argument("--tree", required=True)
    p.add_argument("--lattice", required=True)
    p.add_argument("--series", default="W")
    p.add_argument("--spinc", default="all")
    p.add_argument("--window", default="16")
    _add_move_args(p)
    p.set_defaults(func=cmd_verify_move)
    for name, fn in (("weyl", cmd_verify_weyl), ("twist", cmd_verify_twist)):
        p = _leaf(verify, name)
        p.add_argument("--tree", required=True)
        p.add_argument("--lattice", required=True)
        p.add_argument("--series", default="W")
        p.add_argument("--spinc", default="all")
        p.add_argument("--window", default="16")
        p.set_defaults(func=fn)
    p = _leaf(verify, "corpus")
    p.add_argument("--seed", type=int, default=CorpusConfig.seed)
    p.add_argument("--count", type=int, default=CorpusConfig.count)
    p.add_argument("--max-vertices", type=int, default=CorpusConfig.max_vertices)
    p.add_argument("--max-det", type=int, default=CorpusConfig.max_det)
    p.add_argument("--lattice", nargs="+", default=["A1", "A2"])
    p.add_argument("--series", nargs="+", default=["W", "translate"])
    p.add_argument("--window", default="16")
    p.set_defaults(func=cmd_verify_corpus)

    p = _leaf(sub, "brieskorn")
    p.add_argument("--b", type=int, nargs=3, required=True)
    p.add_argument("--lattice", default="A1")
    p.add_argument("--series", default="W")
    p.add_argument("--via", choices=["plumbing", "closed", "both"], default="both")
    p.add_argument("--window", default="20")
    p.set_defaults(func=cmd_brieskorn)
    return ap


def _text(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if "text" in obj and "terms" in obj:
            return pad + obj["text"]
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            return pad + ", ".join(map(str, obj))
        return "\n".join(_text(x, indent) if isinstance(x, dict) else pad + json.dumps(x) for x in obj)
    return pad + str(obj)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result, ok = args.func(args)
    except DegenerateFraming as exc:
        print(json.dumps({"error": "degenerate-framing", "detail": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2
    except (InvalidTree, InapplicableMove, InvalidSeries, InvalidBrieskorn, UnsupportedLattice, PlanError,
            NotConvolvable, UsageError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2
    result = {"ok": ok, **result}
    if args.format == "text":
        text = _text(result) + "\n"
    else:
        text = json.dumps(result, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
