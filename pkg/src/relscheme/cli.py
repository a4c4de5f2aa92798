"""Command-line front end.

Subcommands: diameter, scheme, verify, search-hr, girthex.
Exit codes: 0 success / all bounds hold, 1 a checked inequality failed
(a genuine bug witness), 2 input or connectivity error, 3 construction
infeasible.

Human-readable output goes to stdout; machine formats (json, csv) go to
--out when given, else stdout.  A fixed seed makes machine output
byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from . import bounds as bounds_mod
from . import construct as con
from . import metrics
from . import relation as rel_mod
from . import scheme as scheme_mod

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

CSV_COLUMNS = ["suite", "instance", "name", "lhs", "rhs", "holds", "witness"]


def _emit(payload: dict, rows: list[dict], args) -> None:
    """Write machine output (stable bytes) or a human summary."""
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: r.get(c, "") for c in CSV_COLUMNS})
        text = buf.getvalue()
    else:
        lines = []
        for r in rows:
            mark = "ok " if r["holds"] else "FAIL"
            lines.append(
                f"[{mark}] {r['suite']}/{r['instance']} {r['name']}: "
                f"{r['lhs']} <= {r['rhs']}"
            )
        text = "\n".join(lines) + ("\n" if lines else "")
    if args.out and args.format != "human":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_row(suite: str, instance: str, rep) -> dict:
    return {
        "suite": suite,
        "instance": instance,
        "name": rep.name,
        "lhs": str(rep.lhs),
        "rhs": str(rep.rhs),
        "holds": rep.holds,
        "witness": rep.witness or "",
    }


def _read_relation(path: str, fmt: str) -> rel_mod.Relation:
    with open(path) as fh:
        text = fh.read()
    if fmt == "dense":
        return rel_mod.parse_dense(text)
    return rel_mod.parse_edge_list(text)


# -- diameter ----------------------------------------------------------------


def cmd_diameter(args) -> int:
    try:
        rel = _read_relation(args.input, args.input_format)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    strong = metrics.is_strongly_connected(rel)
    sym = rel.union(rel.transpose())
    weak = metrics.is_strongly_connected(sym)
    girth = metrics.directed_girth(rel)
    out = {
        "n": rel.n,
        "pairs": rel.pair_count(),
        "strongly_connected": strong,
        "connected": weak,
        "directed_diameter": metrics.directed_diameter(rel) if strong else None,
        "undirected_diameter": metrics.undirected_diameter(rel) if weak else None,
        "directed_girth": girth if girth is not None else "acyclic",
    }
    if args.format == "json":
        text = json.dumps(out, sort_keys=True, separators=(",", ":")) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        for k, v in out.items():
            print(f"{k}: {v}")
    if not strong or not weak:
        print("error: input is disconnected", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


# -- scheme -------------------------------------------------------------------


def cmd_scheme(args) -> int:
    try:
        with open(args.input) as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.mode == "orbit":
        try:
            n, gens = scheme_mod.parse_generators(text)
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
        try:
            scheme = scheme_mod.pair_orbit_scheme(n, gens)
        except scheme_mod.IntransitiveGroupError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INFEASIBLE
        certified = True
    else:
        try:
            seed_rel = rel_mod.parse_edge_list(text)
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_INPUT
        res = scheme_mod.wl_closure([seed_rel])
        if not res.homogeneous:
            print("error: stable coloring is inhomogeneous", file=sys.stderr)
            return EXIT_INFEASIBLE
        scheme = res.scheme
        certified = True
    payload = scheme.to_json_dict()
    payload["certified"] = certified
    text_out = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text_out)
    if args.format == "human" or not args.out:
        print(f"n={scheme.n} rank={scheme.rank} certified={certified}")
    return EXIT_OK


# -- verify suites ---------------------------------------------------------------


def _primes_upto(limit: int) -> list[int]:
    return [p for p in range(2, limit + 1) if con.is_prime(p)]


def _suite_ruzsa(args) -> list[dict]:
    rng = random.Random(args.seed)
    rows = []
    sizes = [int(x) for x in args.n.split(",")] if args.n else [8, 16, 32, 64]
    per = max(1, args.trials // len(sizes))
    for n in sizes:
        for t in range(per):
            a = rel_mod.Relation(n, (rng.getrandbits(n) for _ in range(n)))
            c = rel_mod.Relation(n, (rng.getrandbits(n) for _ in range(n)))
            d = rng.randrange(1, n + 1)
            b = rel_mod.Relation(
                n,
                (sum(1 << v for v in rng.sample(range(n), d)) for _ in range(n)),
            )
            rep = bounds_mod.check_ruzsa(a, b, c)
            rows.append(_report_row("ruzsa", f"n{n}-t{t}", rep))
    return rows


def _expansion_subsets(n: int, max_size: int, cap: int, rng, extra: int):
    """Exhaustive subsets up to max_size while the count fits the cap,
    then random ones; deterministic for a fixed rng."""
    from itertools import combinations

    out = []
    total = 0
    for size in range(1, max_size + 1):
        from math import comb

        if total + comb(n, size) > cap:
            break
        for T in combinations(range(n), size):
            out.append(set(T))
        total += comb(n, size)
    for _ in range(extra):
        size = rng.randrange(1, n + 1)
        out.append(set(rng.sample(range(n), size)))
    return out


def _suite_expand(args) -> list[dict]:
    rng = random.Random(args.seed)
    rows = []
    qs = [q for q in _primes_upto(args.q or 13) if q >= 3]
    for q in qs:
        scheme = scheme_mod.pair_orbit_scheme(
            q, [tuple((i + 1) % q for i in range(q))], certify=False
        )
        # symmetrized connected union of basis classes
        a = scheme_mod.random_s_union(scheme, rng)
        b = a.union(a.transpose())
        if not metrics.is_strongly_connected(b):
            b = b.union(scheme.basis_relation(1 % scheme.rank)).union(
                b.transpose()
            )
        subs = _expansion_subsets(q, 8, args.cap, rng, args.trials)
        for i, T in enumerate(subs):
            rep = bounds_mod.check_expansion(scheme, b, T)
            rows.append(_report_row("expand", f"q{q}-T{i}", rep))
    return rows


def _suite_commbound(args) -> list[dict]:
    rng = random.Random(args.seed)
    rows = []
    primes = [p for p in _primes_upto(args.q or 97) if p >= 3]
    for t in range(args.trials):
        q = primes[rng.randrange(len(primes))]
        size = rng.randrange(1, min(q, 8))
        conn = rng.sample(range(1, q), size)
        scheme = scheme_mod.pair_orbit_scheme(
            q, [tuple((i + 1) % q for i in range(q))], certify=False
        )
        a = con.build_cayley(con.CayleySpec(("cyclic", q), tuple(conn)))
        rep = bounds_mod.comm_bound(scheme, a)
        rows.append(_report_row("commbound", f"t{t}-q{q}-S{sorted(conn)}", rep))
    return rows


def _suite_mains(args) -> list[dict]:
    rng = random.Random(args.seed)
    rows = []
    primes = [p for p in _primes_upto(args.q or 61) if p >= 3]
    for t in range(args.trials):
        q = primes[rng.randrange(len(primes))]
        scheme = scheme_mod.pair_orbit_scheme(
            q, [tuple((i + 1) % q for i in range(q))], certify=False
        )
        a = scheme_mod.random_s_union(scheme, rng)
        if not metrics.is_strongly_connected(a.union(a.transpose())):
            continue
        rep = bounds_mod.mains_check(scheme, a)
        rows.append(_report_row("mains", f"t{t}-q{q}", rep))
        aa = a.with_loops()
        tt = scheme_mod.random_s_union(scheme, rng)
        if 2 * tt.norm() <= q:
            rep2 = bounds_mod.check_star_ratio(scheme, aa, tt)
            rows.append(_report_row("mains", f"t{t}-q{q}-star", rep2))
    return rows


def _suite_girthex(args) -> tuple[list[dict], bool]:
    qlist = (
        [args.q]
        if args.q
        else con.default_girthex_primes(args.k)
    )
    res, attempts = con.girthex_scan(
        args.k, qlist, seed=args.seed, budget=args.budget
    )
    rows = []
    for att in attempts:
        inst = f"k{att.k}-q{att.q}"
        if not att.feasible:
            rows.append(
                {
                    "suite": "girthex",
                    "instance": inst,
                    "name": "construction",
                    "lhs": "infeasible",
                    "rhs": att.reason or "",
                    "holds": False,
                    "witness": "; ".join(att.log),
                }
            )
            continue
        for rep in att.reports:
            rows.append(_report_row("girthex", inst, rep))
    return rows, res is not None


def cmd_verify(args) -> int:
    if args.suite == "ruzsa":
        rows = _suite_ruzsa(args)
    elif args.suite == "expand":
        rows = _suite_expand(args)
    elif args.suite == "commbound":
        rows = _suite_commbound(args)
    elif args.suite == "mains":
        rows = _suite_mains(args)
    elif args.suite == "girthex":
        rows, found = _suite_girthex(args)
        rows.sort(key=lambda r: (r["instance"], r["name"]))
        payload = {
            "suite": "girthex",
            "seed": args.seed,
            "rows": rows,
            "all_hold": found,
        }
        _emit(payload, rows, args)
        return EXIT_OK if found else EXIT_INFEASIBLE
    else:
        print(f"unknown suite {args.suite}", file=sys.stderr)
        return EXIT_INPUT
    rows.sort(key=lambda r: (r["instance"], r["name"]))
    all_hold = all(r["holds"] for r in rows)
    payload = {
        "suite": args.suite,
        "seed": args.seed,
        "rows": rows,
        "all_hold": all_hold,
    }
    _emit(payload, rows, args)
    if not all_hold:
        bad = next(r for r in rows if not r["holds"])
        print(f"violation witness: {bad}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


# -- search-hr and girthex ----------------------------------------------------------


def cmd_search_hr(args) -> int:
    try:
        wit = con.search_hr_set(
            args.q, args.k, budget=args.budget, seed=args.seed, gap_aware=args.gap_aware
        )
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if wit is None:
        print(f"no witness found at q={args.q} within budget", file=sys.stderr)
        return EXIT_INFEASIBLE
    text = json.dumps(wit.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_girthex(args) -> int:
    qlist = [args.q] if args.q else con.default_girthex_primes(args.k)
    res, attempts = con.girthex_scan(args.k, qlist, seed=args.seed, budget=args.budget)
    if res is None:
        for att in attempts:
            print(f"q={att.q}: {att.reason or 'bounds failed'}", file=sys.stderr)
        print(f"construction infeasible at tested q for k={args.k}", file=sys.stderr)
        return EXIT_INFEASIBLE
    payload = {
        "k": res.k,
        "q": res.q,
        "n": res.n,
        "witness": res.witness.to_json_dict(),
        "gap_x": res.gap_x,
        "connection_size": len(res.connection),
        "doubled_size": len(res.doubled),
        "certification": res.certification,
        "reports": [r.to_json_dict() for r in res.reports],
        "log": res.log,
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.graph_out and res.graph is not None:
        with open(args.graph_out, "w") as fh:
            fh.write(res.graph.to_edge_list())
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relscheme",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("diameter", help="diameters and girth of a relation file")
    d.add_argument("input")
    d.add_argument("--input-format", choices=["edge", "dense"], default="edge")
    d.add_argument("--format", choices=["human", "json"], default="human")
    d.add_argument("--out")
    d.set_defaults(func=cmd_diameter)

    s = sub.add_parser("scheme", help="build and certify a scheme")
    s.add_argument("input", help="generators file (orbit) or edge list (wl)")
    s.add_argument("--mode", choices=["orbit", "wl"], default="orbit")
    s.add_argument("--format", choices=["human", "json"], default="human")
    s.add_argument("--out")
    s.set_defaults(func=cmd_scheme)

    v = sub.add_parser(
        "verify",
        help="run a checker suite; csv columns: " + ",".join(CSV_COLUMNS),
    )
    v.add_argument("--suite", required=True,
                   choices=["ruzsa", "expand", "commbound", "mains", "girthex"])
    v.add_argument("--n", help="comma-separated sizes (ruzsa)")
    v.add_argument("--q", type=int, help="modulus / prime ceiling")
    v.add_argument("--k", type=int, default=2)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--cap", type=int, default=20000,
                   help="cap on exhaustively enumerated subsets (expand)")
    v.add_argument("--budget", type=int, default=60000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--format", choices=["human", "json", "csv"], default="human")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("search-hr", help="search for a difference cover with small k-fold sumset")
    h.add_argument("--q", type=int, required=True)
    h.add_argument("--k", type=int, required=True)
    h.add_argument("--budget", type=int, default=60000)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--gap-aware", action="store_true",
                   help="prefer sumsets with a progression gap")
    h.add_argument("--out")
    h.set_defaults(func=cmd_search_hr)

    g = sub.add_parser("girthex", help="build the small-diameter / large-girth Cayley graph")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--q", type=int, help="single prime to try (default: calibrated scan list)")
    g.add_argument("--budget", type=int, default=60000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--graph-out", help="write the final graph as an edge list")
    g.set_defaults(func=cmd_girthex)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
