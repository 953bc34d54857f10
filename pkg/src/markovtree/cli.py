"""Command-line front end.

Exit status: 0 on success, 1 when a checked property fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Sequence

from . import bounds, constructions, dynamics, io, markov, spectral, tree as tree_mod
from .markov import MarkovError, MarkovMap


class InputError(Exception):
    pass


SWEEP_HEADER = ["N", "arcs", "lambda", "entropy", "theta", "primitive", "lower_root"]


def parse_base(text: str) -> tuple[MarkovMap, tuple[str, ...]]:
    kind, _, arg = text.partition(":")
    try:
        value = int(arg)
    except ValueError:
        raise InputError(f"bad base {text!r}: expected star:n or comb:r") from None
    if kind == "star":
        return constructions.star_map(value)
    if kind == "comb":
        return constructions.comb_map(value)
    raise InputError(f"unknown base kind {kind!r}")


def parse_n_range(text: str) -> list[int]:
    """``10,20,40``, ``10:50:10`` (additive step) or ``10:160:x2`` (factor)."""
    try:
        if "," in text or ":" not in text:
            return [int(x) for x in text.split(",")]
        parts = text.split(":")
        start, stop = int(parts[0]), int(parts[1])
        step = parts[2] if len(parts) > 2 else "1"
    except ValueError:
        raise InputError(f"bad N range {text!r}") from None
    out = []
    if step.startswith("x"):
        factor = int(step[1:])
        if factor < 2:
            raise InputError("factor must be at least 2")
        n = start
        while n <= stop:
            out.append(n)
            n *= factor
    else:
        inc = int(step)
        if inc < 1:
            raise InputError("step must be positive")
        out = list(range(start, stop + 1, inc))
    return out


def sweep_row(base: str, N: int) -> list[str]:
    f, S = parse_base(base)
    ext = constructions.extend_exact(f, S, N)
    m = ext.map.transition.matrix
    lam = spectral.perron(m)
    theta, _ = bounds.theta_defect(ext)
    prim = spectral.matrix_profile(m).primitive
    return [str(N), str(len(ext.map.tree)), f"{lam:.12f}", f"{math.log(lam):.9f}",
            str(theta), "true" if prim else "false",
            f"{constructions.lower_bound_root(ext.n, N):.12f}"]


def _load_map(path: str):
    try:
        return io.map_from_dict(io.read_json(path))
    except OSError as exc:
        raise InputError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_make(args) -> int:
    kind = args.kind
    if kind == "star":
        f, S = constructions.star_map(args.n, args.variant)
        data = io.map_to_dict(f, S)
    elif kind == "comb":
        f, S = constructions.comb_map(args.r)
        data = io.map_to_dict(f, S)
    elif kind == "tent":
        f = MarkovMap(tree_mod.make_star(2), {"s1": "s1", "b": "s2", "s2": "s1"})
        data = io.map_to_dict(f)
    elif kind == "ye":
        sig = [int(x) for x in args.signature.split(",")]
        data = io.tree_to_dict(tree_mod.make_ye_tree(sig, args.i))
    elif kind == "binary":
        data = io.tree_to_dict(tree_mod.complete_binary_tree(args.leaves))
    elif kind == "random":
        data = io.tree_to_dict(tree_mod.random_tree(args.vertices, random.Random(args.seed)))
    else:
        raise InputError(f"unknown kind {kind!r}")
    _emit(io.dumps(data), args.out)
    return 0


def cmd_entropy(args) -> int:
    f, _ = _load_map(args.map)
    h = markov.entropy(f, args.method, args.tol)
    print(f"{h:.9f}")
    return 0


def cmd_check(args) -> int:
    f, S = _load_map(args.map)
    props = [p.strip() for p in args.props.split(",") if p.strip()]
    dyn = markov.dynamical_properties(f)
    ok = True
    for prop in props:
        if prop in ("transitive", "exact"):
            value = dyn[prop]
        elif prop == "ps-linear":
            if S is None:
                raise InputError("map file carries no S tuple")
            rep = markov.check_ps_linear(f, S)
            value = rep.ok
            for fail in rep.failures:
                print(f"  {fail}")
        elif prop == "zero-entropy":
            value = spectral.matrix_profile(f.transition.matrix).structurally_zero_entropy
        else:
            raise InputError(f"unknown property {prop!r}")
        print(f"{prop}: {'true' if value else 'false'}")
        ok = ok and value
    return 0 if ok else 1


def cmd_extend(args) -> int:
    f, S = parse_base(args.base)
    ext = constructions.extend_exact(f, S, args.N)
    if args.out:
        io.write_json(io.extension_to_dict(ext), args.out)
    lam = spectral.perron(ext.map.transition.matrix)
    print(f"arcs={len(ext.map.tree)} lambda={lam:.12f} entropy={math.log(lam):.9f}")
    return 0


def cmd_sweep(args) -> int:
    Ns = parse_n_range(args.N)
    if any(N <= 6 for N in Ns):
        raise InputError("every N must exceed 6")
    parse_base(args.base)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(sweep_row, [args.base] * len(Ns), Ns))
    else:
        rows = [sweep_row(args.base, N) for N in Ns]
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    writer.writerows(rows)
    _emit(buf.getvalue(), args.csv)
    bad = [r for r in rows
           if r[5] != "true" or Fraction(r[4]) > Fraction(2, int(r[0]) - 5)]
    return 1 if bad else 0


def cmd_bound(args) -> int:
    if args.tree:
        try:
            t = io.tree_from_dict(io.read_json(args.tree))
        except OSError as exc:
            raise InputError(str(exc)) from None
        rep = bounds.extract_and_bound(t, args.k)
        _emit(io.dumps(io.report_to_dict(rep)), args.out)
        return 0
    if args.base and args.N:
        f, S = parse_base(args.base)
        ext = constructions.extend_exact(f, S, args.N)
        theta, ok = bounds.theta_defect(ext)
        bound = bounds.p_lipschitz_bound(bounds.g_n_profile(ext, args.L2))
        print(f"theta={theta} limit={Fraction(2, args.N - 5)} ok={'true' if ok else 'false'}")
        print(f"p_lipschitz_bound={bound:.9f}")
        return 0 if ok else 1
    raise InputError("bound needs --tree, or --base with --N")


def cmd_witness(args) -> int:
    if args.map:
        f, _ = _load_map(args.map)
    elif args.base and args.N:
        b, S = parse_base(args.base)
        f = constructions.extend_exact(b, S, args.N).map
    else:
        raise InputError("witness needs --map, or --base with --N")
    n = len(f.tree)
    if args.arc is not None:
        arc, lo, hi = args.arc, tree_mod.as_length(args.lo), tree_mod.as_length(args.hi)
    else:
        rng = random.Random(args.seed)
        arc = rng.randrange(n)
        a = rng.randrange(0, 1000)
        lo, hi = Fraction(a, 1000), Fraction(rng.randrange(a + 1, 1001), 1000)
    if not 0 <= arc < n or not 0 <= lo < hi <= 1:
        raise InputError("seed segment must satisfy 0 <= lo < hi <= 1 on an existing arc")
    seed = dynamics.SegmentSet.of({arc: [(lo, hi)]})
    buf = _stdio.StringIO()
    buf.write("step,arcs_full,total_measure\n")
    covered = False
    for step, full, measure in dynamics.witness_trace(f, seed, args.cap):
        buf.write(f"{step},{full},{float(measure):.12g}\n")
        covered = full == n
    _emit(buf.getvalue(), args.csv)
    return 0 if covered else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10, help="numeric tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")

    parser = argparse.ArgumentParser(
        prog="markovtree", description="Markov maps on trees: entropy, checks, constructions")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("make", parents=[common], help="write a map or tree as JSON")
    p.add_argument("kind", choices=["star", "comb", "tent", "ye", "binary", "random"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--variant", choices=["fixed_hub", "literal"], default="fixed_hub")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--signature", default="2,2")
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--leaves", type=int, default=8)
    p.add_argument("--vertices", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("entropy", parents=[common], help="entropy of a map file")
    p.add_argument("--map", required=True)
    p.add_argument("--method", choices=["rome", "power", "both"], default="rome")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("check", parents=[common], help="check dynamical properties")
    p.add_argument("--map", required=True)
    p.add_argument("--props", default="transitive,exact",
                   help="comma list of transitive, exact, ps-linear, zero-entropy")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extend", parents=[common], help="build the exact extension g_N")
    p.add_argument("--base", required=True, help="star:n or comb:r")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("sweep", parents=[common], help="entropy of g_N over a range of N")
    p.add_argument("--base", required=True)
    p.add_argument("--N", required=True, help="e.g. 10:160:x2, 10:50:10 or 10,20")
    p.add_argument("--csv")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bound", parents=[common], help="entropy bounds")
    p.add_argument("--tree")
    p.add_argument("--k", type=int)
    p.add_argument("--base")
    p.add_argument("--N", type=int)
    p.add_argument("--L2", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("witness", parents=[common], help="segment covering trace")
    p.add_argument("--map")
    p.add_argument("--base")
    p.add_argument("--N", type=int)
    p.add_argument("--arc", type=int)
    p.add_argument("--lo", default="1/3")
    p.add_argument("--hi", default="1/2")
    p.add_argument("--cap", type=int)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, tree_mod.TreeError, MarkovError, spectral.SpectralError,
            dynamics.DynamicsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
