"""Command-line entry point: ``algcapset <command> ...``.

Exit codes: 0 pass, 1 verdict failed (witness printed), 2 usage or runtime
error (error JSON printed).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import construct, parabolas, search, verify
from .field import field
from .trivec import CapsetFileError, DimensionError, read_capset, write_capset

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=1, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _write_outputs(S, out: str | None, meta: dict) -> None:
    if not out:
        return
    write_capset(out, S)
    with open(out + ".json", "w") as fh:
        json.dump(meta, fh, indent=1, default=_jsonable)
        fh.write("\n")


# -- commands ----------------------------------------------------------------


def cmd_construct(args) -> int:
    certified = not args.uncertified
    if args.kind == "complete":
        if args.n is None:
            raise CliError("--kind complete needs --n")
        S = construct.complete_capset(args.n, certified=certified, budget_bits=args.budget_bits)
        meta = dict(S.meta)
        ok = meta["verified"] or not certified
    else:
        if args.m is None:
            raise CliError(f"--kind {args.kind} needs --m")
        S = construct.two_parabolas(args.m) if args.kind == "two-parabolas" else construct.elliptic_quadric(args.m)
        meta = dict(S.meta)
        meta["size"] = len(S)
        if certified:
            cap = verify.is_capset(S).verdict
            meta["capset"] = cap
            try:
                meta["complete"] = verify.is_complete(S, args.threads, args.budget_bits).verdict if cap else False
            except verify.BudgetError:
                meta["complete"] = None
            ok = cap and (args.kind != "quadric" or meta["complete"] is True)
        else:
            ok = True
        meta["verified"] = certified and ok
    meta = {"format": 1, **meta}
    _write_outputs(S, args.out, meta)
    _emit(meta)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    S = read_capset(args.inp)
    if args.complete:
        try:
            rep = verify.is_complete(S, args.threads, args.budget_bits)
        except verify.NotACapsetError as exc:
            rep = exc.report
    else:
        rep = verify.is_capset(S)
    out = rep.to_json()
    out["size"] = len(S)
    _emit(out)
    return EXIT_PASS if rep.verdict else EXIT_FAIL


def cmd_bound(args) -> int:
    ok = verify.lower_bound_check(args.size, args.n)
    _emit({"format": 1, "size": args.size, "n": args.n, "pairs_plus_points": args.size * (args.size + 1) // 2,
           "space": 3**args.n, "verdict": ok})
    return EXIT_PASS if ok else EXIT_FAIL


def _parse_coeffs(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.replace(",", " ").split())
    except ValueError as exc:
        raise CliError(f"bad coefficient list {text!r}") from exc


def cmd_family(args) -> int:
    fam = parabolas.CoeffFamily(args.m, _parse_coeffs(args.coeffs))
    res = parabolas.family_is_capset(fam, args.mode)
    out = {**fam.to_json(), "mode": args.mode, "verdict": res.verdict, "coeff_witness": res.coeff_witness,
           "point_witness": None}
    if res.point_witness is not None:
        from .trivec import format_point
        out["point_witness"] = [format_point(p, res.n) for p in res.point_witness]
    if args.out and res.verdict:
        S = parabolas.family_points(fam)
        _write_outputs(S, args.out, out)
    _emit(out)
    return EXIT_PASS if res.verdict else EXIT_FAIL


def cmd_conditions(args) -> int:
    m = args.m
    if m % 2:
        raise CliError("conditions are defined for even m")
    out = {"format": 1, "m": m, "class_count": parabolas.class_count(m),
           "formula": parabolas.class_count_formula(m),
           "classes": [list(t) for t in parabolas.triple_classes(m)]}
    if args.rank:
        F = field(m)
        pool = parabolas.full_orbit_elements(F)
        if args.samples and args.samples < pool.size:
            rng = np.random.default_rng(args.seed)
            sample = np.sort(rng.choice(pool, size=args.samples, replace=False))
        else:
            sample = pool
        classes, mat = parabolas.condition_matrix(m, sample)
        out["rank"] = parabolas.gf2_rank(mat)
        out["samples"] = int(sample.size)
        out["tight"] = out["rank"] == out["class_count"]
        if args.csv:
            chis = [F.chi_arr(parabolas.condition_value(F, sample, t)) for t in classes]
            with open(args.csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["class"] + [str(a) for a in sample.tolist()])
                for t, row in zip(classes, chis):
                    w.writerow(["%d-%d-%d" % t] + row.tolist())
    _emit(out)
    return EXIT_PASS


def cmd_search(args) -> int:
    if args.mode == "exhaustive":
        resume = None
        if args.resume and os.path.exists(args.resume):
            with open(args.resume) as fh:
                resume = search.SearchState.from_json(json.load(fh))
        res = search.exhaustive_search(args.m, max_K=args.max_k, node_ceiling=args.node_ceiling,
                                       checkpoint=args.checkpoint or args.resume, resume=resume,
                                       progress_every=args.progress)
    elif args.mode == "random":
        res = search.random_search(args.m, seed=args.seed, budget=args.budget, progress_every=args.progress)
    else:
        res = search.orbit_search(args.m, k=args.k, budget=args.budget)
        if res is None:
            _emit({"format": 1, "m": args.m, "k": args.k, "found": False})
            return EXIT_FAIL
    out = res.to_json()
    if args.out:
        with open(args.out + ".family.json", "w") as fh:
            json.dump(out, fh, indent=1)
        if 2 * args.m <= 16:
            write_capset(args.out, parabolas.family_points(res.family))
    _emit(out)
    return EXIT_PASS


TABLE1 = [  # m, k, coefficients, size
    (2, 1, 2, 16, "fast"),
    (4, 1, 4, 320, "fast"),
    (6, 1, 6, 4368, "fast"),
    (8, 2, 16, 104960, "long"),
]

TABLE2 = [  # m, K, size, source
    (2, 2, 16, "exhaustive", "fast"),
    (4, 4, 320, "exhaustive", "fast"),
    (6, 8, 5824, "exhaustive", "long"),
    (8, 20, 131200, "random", "long"),
]


def reproduce_table(which: int, tier: str, seed: int = 0, budget: int = 3000) -> list[dict]:
    tiers = {"fast": ("fast",), "long": ("fast", "long")}[tier]
    rows = []
    if which == 1:
        for m, k, ncoef, size, t in TABLE1:
            if t not in tiers:
                continue
            res = search.orbit_search(m, k)
            got = (res.K, res.size) if res else (0, 0)
            rows.append({"m": m, "k": k, "expected_coeffs": ncoef, "expected_size": size,
                         "found_coeffs": got[0], "found_size": got[1],
                         "match": got == (ncoef, size), "asserted": True,
                         "family": list(res.family.coeffs) if res else None})
    else:
        for m, K, size, src, t in TABLE2:
            if t not in tiers:
                continue
            if src == "exhaustive":
                res = search.exhaustive_search(m)
                row = {"match": (res.K, res.size) == (K, size), "asserted": True}
            else:
                floor = search.orbit_search(m, 2)
                res = search.random_search(m, seed=seed, budget=budget,
                                           floor=floor.family if floor else None)
                # K=20 is an expected value, not a certified optimum;
                # passing only requires beating the two-orbit floor
                row = {"match": res.K >= 16, "asserted": False, "source": res.stats["source"],
                       "random_K": res.stats["random_K"]}
            rows.append({"m": m, "expected_K": K, "expected_size": size, "search": src,
                         "found_K": res.K, "found_size": res.size, **row,
                         "family": list(res.family.coeffs)})
    return rows


def cmd_tables(args) -> int:
    rows = reproduce_table(args.which, args.tier, seed=args.seed, budget=args.budget)
    _emit({"format": 1, "table": args.which, "tier": args.tier, "rows": rows})
    return EXIT_PASS if all(r["match"] for r in rows) else EXIT_FAIL


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="algcapset", description="Algebraic capset constructions and checks")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads for coverage scans (output does not depend on it)")
    p.add_argument("--budget-bits", type=int, default=verify.DEFAULT_BUDGET_BITS,
                   help="largest 3^n coverage bitmap allowed")
    p.add_argument("-v", "--verbose", action="store_true", help="progress lines on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a capset and certify it")
    c.add_argument("--kind", choices=["two-parabolas", "complete", "quadric"], required=True)
    c.add_argument("--m", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--out", help="capset file; metadata goes to OUT.json")
    c.add_argument("--uncertified", action="store_true", help="skip verification")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check a capset file")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--complete", action="store_true")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bound", help="size condition N(N+1)/2 >= 3^n for complete capsets")
    b.add_argument("--size", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.set_defaults(func=cmd_bound)

    f = sub.add_parser("family", help="capset test for a parabola family")
    f.add_argument("--coeffs", required=True, help="comma separated element encodings")
    f.add_argument("--m", type=int, required=True)
    f.add_argument("--mode", choices=["brute", "fast"], default="fast")
    f.add_argument("--out")
    f.set_defaults(func=cmd_family)

    co = sub.add_parser("conditions", help="condition classes and their rank")
    co.add_argument("--m", type=int, required=True)
    co.add_argument("--count", action="store_true")
    co.add_argument("--rank", action="store_true")
    co.add_argument("--samples", type=int)
    co.add_argument("--seed", type=int, default=0)
    co.add_argument("--csv")
    co.set_defaults(func=cmd_conditions)

    s = sub.add_parser("search", help="search for large parabola families")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--mode", choices=["exhaustive", "random", "orbit"], required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=1000)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--max-k", type=int)
    s.add_argument("--node-ceiling", type=int, default=search.DEFAULT_NODE_CEILING)
    s.add_argument("--resume", help="checkpoint to resume from (and keep updating)")
    s.add_argument("--checkpoint")
    s.add_argument("--progress", type=int, default=0, help="log every N nodes/restarts")
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    t = sub.add_parser("tables", help="reproduce the computational tables")
    t.add_argument("--which", type=int, choices=[1, 2], required=True)
    t.add_argument("--tier", choices=["fast", "long"], default="fast")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--budget", type=int, default=3000)
    t.set_defaults(func=cmd_tables)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (CliError, CapsetFileError, DimensionError, parabolas.FamilyError, verify.BudgetError,
            search.SearchBudgetError, ValueError, OSError, ArithmeticError) as exc:
        _emit({"format": 1, "error": type(exc).__name__, "message": str(exc)})
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
