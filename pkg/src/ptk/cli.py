"""``ptk``: command-line front end.  Every invocation prints one JSON document."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .errors import PtkError, ToleranceUnreachable
from .families import (
    F_OMEGA,
    KSubsets,
    Schreier,
    closure,
    family_from_json,
    is_very_large,
    members,
    order_with_note,
    predicates,
    transform,
)
from .norms import brute_force_norm, norm, property_p_witness, space_from_json, vector_from_json
from .plegma import (
    bfs_distance,
    enumerate_plm,
    is_plegma,
    plegma_path,
    skipped_restriction,
    three_plegma_path,
)
from .ramsey import (
    coloring_by_name,
    find_homogeneous_partition,
    find_monochromatic,
    find_plegma_in_dense,
    find_shift_embedding,
    validate_monochromatic,
    validate_partition,
    validate_shift_embedding,
)
from .setcore import parse_finset, parse_ordinal, parse_window
from .spreading import boost_l1, cesaro_norm, f_cesaro_sum, lp_constants, seq_from_json, sm_profile


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument parsing helpers

def load_json(text: str, *envelopes: str):
    """Inline JSON, or a path to a JSON file (optionally prefixed with @).

    A document emitted by another ptk command is unwrapped at the first of
    ``envelopes`` it carries.
    """
    doc = _read_json(text)
    if isinstance(doc, dict) and "ptk_version" in doc:
        for key in envelopes:
            if key in doc:
                return doc[key]
    return doc


def _read_json(text: str):
    if text.startswith("@"):
        text = text[1:]
    if text.lstrip().startswith(("{", "[")):
        return json.loads(text)
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    raise UsageError(f"expected JSON or a JSON file, got {text!r}")


def parse_family(text: str):
    """JSON, a file, or a shorthand: ``k:3``, ``fomega``, ``schreier:2``."""
    t = text.strip()
    if t in ("fomega", "f_omega"):
        return F_OMEGA
    if t.startswith("k:"):
        return KSubsets(int(t[2:]))
    if t.startswith("schreier:"):
        return Schreier(parse_ordinal(t.split(":", 1)[1]))
    return family_from_json(load_json(t, "family"))


def parse_sets(text: str):
    """``"1,3;2,4"`` → ((1,3), (2,4))."""
    return tuple(parse_finset(p) for p in text.split(";") if p.strip() != "" or text.strip() == "")


def parse_coeffs(text: str) -> List[Fraction]:
    return [Fraction(c.strip()) for c in text.split(",") if c.strip()]


def _budget(a) -> dict:
    return {} if a.budget is None else {"budget": a.budget}


def _sets_json(sets):
    return [list(s) for s in sets]


# ---------------------------------------------------------------- commands

def cmd_family(a):
    F = parse_family(a.family)
    if a.verb == "order":
        o, note = order_with_note(F)
        out = {"order": str(o)}
        if note:
            out["note"] = note
        return out
    if a.verb == "members":
        return {"members": _sets_json(members(F, a.max_n))}
    if a.verb == "closure":
        return {"closure": _sets_json(closure(F, a.max_n))}
    if a.verb == "check":
        out = {"predicates": predicates(F, a.max_n)}
        if a.window:
            out["very_large"] = is_very_large(F, parse_window(a.window), **_budget(a))
        return out
    if a.verb == "transform":
        args = {}
        if a.window:
            args["window"] = a.window
        if a.n is not None:
            args["n"] = a.n
        if a.t is not None:
            args["t"] = parse_finset(a.t)
        if a.right:
            args["right"] = parse_family(a.right)
        try:
            G = transform(F, a.op, **args)
        except KeyError as exc:
            raise UsageError(f"transform {a.op} needs --{exc.args[0]}") from None
        return {"family": G.to_json()}
    raise UsageError(a.verb)


def cmd_plegma(a):
    if a.verb == "check":
        return {"plegma": is_plegma(parse_sets(a.sets))}
    F = parse_family(a.family)
    if a.verb == "enum":
        tuples = list(enumerate_plm(F, a.l, a.max_n))
        return {"count": len(tuples), "tuples": [_sets_json(t) for t in tuples]}
    if a.verb == "path":
        L = parse_window(a.window or f"identity:{a.max_n}")
        s0, s = parse_finset(a.s0), parse_finset(a.s)
        path = (three_plegma_path if a.three else plegma_path)(F, L, s0, s)
        return {"path": _sets_json(path), "length": len(path) - 1}
    if a.verb == "distance":
        return {"distance": bfs_distance(F, a.max_n, parse_finset(a.s0), parse_finset(a.s))}
    if a.verb == "skipped":
        L = parse_window(a.window or f"identity:{a.max_n}")
        return {"members": _sets_json(skipped_restriction(F, L, a.max_n))}
    raise UsageError(a.verb)


def cmd_ramsey(a):
    if a.verb == "dense":
        tup = find_plegma_in_dense(parse_sets(a.sets), a.l)
        return {"tuple": _sets_json(tup) if tup is not None else None}
    F = parse_family(a.family)
    M = parse_window(a.window or f"identity:{a.max_n}")
    if a.verb == "mono":
        c = coloring_by_name(a.coloring, a.l)
        out = find_monochromatic(F, a.l, c, M, a.target, threads=a.threads, **_budget(a))
        doc = out.to_json()
        if out.witness is not None:
            doc["valid"] = validate_monochromatic(F, a.l, c, out.witness)
        return doc
    if a.verb == "partition":
        c = coloring_by_name(a.coloring, 1)
        out = find_homogeneous_partition(F, c, M, a.target, threads=a.threads, **_budget(a))
        doc = out.to_json()
        if out.witness is not None:
            doc["valid"] = validate_partition(F, c, out.witness)
        return doc
    if a.verb == "embed":
        G = parse_family(a.into)
        out = find_shift_embedding(F, G, M, a.max_n, size=a.size, **_budget(a))
        doc = out.to_json()
        if out.witness is not None:
            doc["valid"] = validate_shift_embedding(F, G, out.witness)
        return doc
    raise UsageError(a.verb)


def cmd_norm(a):
    if a.verb == "property-p":
        space = space_from_json(load_json(a.space, "space"))
        out = property_p_witness(space, Fraction(a.delta), a.k, max_n=a.max_n_opt, **_budget(a))
        if out["status"] == "found":
            out["vector"] = {"space": space.to_json(), "entries": out["blocks"]}
        return out
    x = vector_from_json(load_json(a.vector, "vector"))
    if a.verb == "brute":
        return brute_force_norm(x).to_json()
    return norm(x, method=a.method, tol=a.tol, strict=a.strict, **_budget(a)).to_json()


def cmd_sm(a):
    if a.verb == "cesaro":
        M = parse_window(a.window or f"identity:{(a.k + 2) * a.n}")
        res = cesaro_norm(a.k, M, a.n, **_budget(a))
        out = res.to_json()
        if not a.show_vector:
            out.pop("vector")
        out.update({"k": a.k, "n": a.n})
        return out
    seq = seq_from_json(load_json(a.seq, "seq", "sequence"))
    M = parse_window(a.window or f"identity:{a.max_n}")
    if a.verb == "profile":
        return sm_profile(seq, parse_coeffs(a.coeffs), M, a.steps, **_budget(a)).to_json()
    if a.verb == "constants":
        return lp_constants(seq, Fraction(a.p), a.n, M, samples=a.samples, seed=a.seed, **_budget(a)).to_json()
    if a.verb == "f-cesaro":
        F = parse_family(a.family) if a.family else seq.family
        res = f_cesaro_sum(F, seq, M, a.n)
        return res.to_json()
    if a.verb == "boost":
        F = parse_family(a.family) if a.family else seq.family
        return boost_l1(seq, F, M, Fraction(a.c), Fraction(a.eps), seed=a.seed,
                        table_n=a.max_n, **_budget(a)).to_json()
    raise UsageError(a.verb)


# ---------------------------------------------------------------- parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="search budget (library default when omitted)")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--strict", action="store_true", help="fail when --tol cannot be met")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = argparse.ArgumentParser(prog="ptk", description="Plegma families, Ramsey searches and example-space norms.")
    top.add_argument("--version", action="version", version=f"ptk {__version__}")
    groups = top.add_subparsers(dest="group", required=True)

    def leaf(sub, name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    fam = groups.add_parser("family", help="families of finite sets").add_subparsers(dest="verb", required=True)
    for name in ("order", "members", "closure", "check", "transform"):
        p = leaf(fam, name)
        p.add_argument("--family", required=True, help="JSON, file, or k:K / fomega / schreier:XI")
        p.set_defaults(func=cmd_family)
        if name == "check":
            p.add_argument("--window", help="also test very-largeness in this window")
        if name == "transform":
            p.add_argument("--op", required=True,
                           choices=["restrict", "shift", "preimage", "quotient", "derived_at",
                                    "section", "direct_sum", "closure"])
            p.add_argument("--window")
            p.add_argument("--n", type=int)
            p.add_argument("--t")
            p.add_argument("--right")

    pl = groups.add_parser("plegma", help="plegma tuples and paths").add_subparsers(dest="verb", required=True)
    p = leaf(pl, "check")
    p.add_argument("--sets", required=True, help='e.g. "1,3;2,4"')
    p.set_defaults(func=cmd_plegma)
    for name in ("enum", "path", "distance", "skipped"):
        p = leaf(pl, name)
        p.add_argument("--family", required=True)
        p.set_defaults(func=cmd_plegma)
        if name == "enum":
            p.add_argument("--l", type=int, required=True)
        if name in ("path", "skipped"):
            p.add_argument("--window")
        if name in ("path", "distance"):
            p.add_argument("--s0", required=True)
            p.add_argument("--s", required=True)
        if name == "path":
            p.add_argument("--three", action="store_true", help="3-plegma path")

    ra = groups.add_parser("ramsey", help="bounded Ramsey-type searches").add_subparsers(dest="verb", required=True)
    for name in ("mono", "partition", "dense", "embed"):
        p = leaf(ra, name)
        p.set_defaults(func=cmd_ramsey)
        if name == "dense":
            p.add_argument("--sets", required=True)
            p.add_argument("--l", type=int, required=True)
            continue
        p.add_argument("--family", required=True)
        p.add_argument("--window")
        if name in ("mono", "partition"):
            p.add_argument("--coloring", required=True, help="const, parity-min, parity-max, parity-size, hash-mod:P")
            p.add_argument("--target", type=int, required=True)
        if name == "mono":
            p.add_argument("--l", type=int, required=True)
        if name == "embed":
            p.add_argument("--into", required=True)
            p.add_argument("--size", type=int, default=6)

    nm = groups.add_parser("norm", help="norms of the example spaces").add_subparsers(dest="verb", required=True)
    for name in ("eval", "brute"):
        p = leaf(nm, name)
        p.add_argument("--vector", required=True, help="vector JSON or file")
        p.add_argument("--method", default="exact", choices=["exact", "branch_bound", "brute"])
        p.set_defaults(func=cmd_norm)
    p = leaf(nm, "property-p")
    p.add_argument("--space", required=True)
    p.add_argument("--delta", default="1")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--horizon", dest="max_n_opt", type=int, default=None, help="largest coordinate searched")
    p.set_defaults(func=cmd_norm)

    sm = groups.add_parser("sm", help="spreading-model estimators").add_subparsers(dest="verb", required=True)
    for name in ("profile", "constants", "cesaro", "f-cesaro", "boost"):
        p = leaf(sm, name)
        p.set_defaults(func=cmd_sm)
        p.add_argument("--window")
        if name == "cesaro":
            _cesaro_args(p)
            continue
        p.add_argument("--seq", required=True, help="sequence JSON or file")
        if name == "profile":
            p.add_argument("--coeffs", required=True)
            p.add_argument("--steps", type=int, required=True)
        if name == "constants":
            p.add_argument("--p", default="1")
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--samples", type=int, default=64)
        if name == "f-cesaro":
            p.add_argument("--family")
            p.add_argument("--n", type=int, required=True)
        if name == "boost":
            p.add_argument("--family")
            p.add_argument("--c", required=True)
            p.add_argument("--eps", required=True)

    p = groups.add_parser("cesaro", parents=[common], help="alias of 'sm cesaro'")
    p.add_argument("--window")
    _cesaro_args(p)
    p.set_defaults(func=cmd_sm, verb="cesaro")
    return top


def _cesaro_args(p):
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--show-vector", action="store_true")


def emit(doc: dict, stream=None) -> None:
    stream = stream or sys.stdout
    doc = dict(doc)
    doc["ptk_version"] = __version__
    stream.write(json.dumps(doc, sort_keys=True, ensure_ascii=False) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc = args.func(args)
    except (UsageError, json.JSONDecodeError) as exc:
        print(f"ptk: usage error: {exc}", file=sys.stderr)
        return 2
    except ToleranceUnreachable as exc:
        emit({"error": {"type": "ToleranceUnreachable", "message": str(exc)},
              "result": exc.result.to_json() if exc.result is not None else None})
        return 1
    except PtkError as exc:
        emit({"error": {"type": type(exc).__name__, "message": str(exc)}})
        return 1
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        print(f"ptk: bad input: {exc}", file=sys.stderr)
        return 2
    emit(doc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
