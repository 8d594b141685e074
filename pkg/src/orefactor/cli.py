"""Command-line entry point.

Exit status: 0 on success, 2 on usage errors, 1 on computational errors (the
error class name is printed on stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from . import fixtures as fx
from .diffop import (
    DiffOperator,
    classify_singularity,
    formal_log_solutions,
    local_exponents,
    p_curvature,
    symmetric_power,
)
from .elliptic import AnsatzSolution, ansatz_solve, verify_membership
from .errors import OrefactorError, SweepBudgetExceeded
from .factor import Budget, alpha_sweep, factorize, frobenius_family, infer_scheme, multi_param_sweep
from .guess import fit_ode_formula, guess_ode, infer_minimal_order, locate_minimal, minimal_operator
from .modarith import default_primes
from .multiprime import align_operators, load_task_operators, reconstruct_operator, save_task
from .series import TruncSeries, apply_operator


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _load_op(spec: str) -> DiffOperator:
    """A path, or ``fixture:<name>`` for a shipped operator."""
    if spec.startswith("fixture:"):
        return fx.load(spec.split(":", 1)[1])
    if not os.path.exists(spec) and spec in fx.REGISTRY:
        return fx.load(spec)
    return DiffOperator.from_text(_read(spec))


def _load_series(path: str) -> TruncSeries:
    return TruncSeries.from_text(_read(path))


def _pair(text: str):
    a, b = text.split(",")
    return int(a), int(b)


def _pcurv_job(args):
    text, p, method = args
    return str(p_curvature(DiffOperator.from_text(text), p, method))


# subcommands -----------------------------------------------------------------

def cmd_guess(a) -> List[str]:
    S = _load_series(a.series)
    out = []
    if a.Q is not None and a.D is not None:
        res = guess_ode(S, a.Q, a.D)
        out.append(res.line())
        if res.found and a.show_operator:
            out.append(str(minimal_operator(res)))
    if a.fit:
        probes = [_pair(t) for t in a.fit]
        samples = []
        for Q, D in probes:
            r = guess_ode(S, Q, D)
            out.append(r.line())
            samples.append((Q, D, r.N))
        out.append(f"formula: {fit_ode_formula(samples)}")
    if a.infer:
        formula, rep = infer_minimal_order(S)
        out.append(rep.text())
        if rep.witness is not None and a.show_operator:
            out.append(str(rep.witness))
    if not out:
        q, D, res = locate_minimal(S)
        out.append(res.line())
        out.append(str(minimal_operator(res)))
    return out


def cmd_exponents(a) -> List[str]:
    L = _load_op(a.op)
    if a.prime:
        L = L.reduce_mod(a.prime)
    return [str(local_exponents(L, a.point))]


def cmd_logscheme(a) -> List[str]:
    L = _load_op(a.op)
    if a.prime:
        L = L.reduce_mod(a.prime)
    if len(a.point) == 1:
        ls = formal_log_solutions(L, a.point[0])
        return [str(ls), f"blocks: {{{', '.join(map(str, ls.block_sizes))}}}",
                f"class: {classify_singularity(L, a.point[0])}"]
    return infer_scheme(L, a.point).text().splitlines()


def cmd_factor(a) -> List[str]:
    if a.series:
        S = _load_series(a.series)
        if not S.modulus:
            S = S.reduce_mod(a.prime)
        L = minimal_operator(locate_minimal(S)[2])
    else:
        L = _load_op(a.op)
    try:
        tree = factorize(L, a.prime, a.budget_alpha, a.multi_param, a.engine)
    except SweepBudgetExceeded as exc:
        if exc.partial is not None:
            print(str(exc.partial), file=sys.stderr)
        raise
    return tree.lines()


def cmd_sweep(a) -> List[str]:
    L = _load_op(a.op).reduce_mod(a.prime)
    fam = frobenius_family(L, a.point, a.exponent, a.terms)
    bud = Budget(a.budget_alpha)
    if len(fam.parameters) == 1:
        hits = alpha_sweep(fam, L.order, _pair(a.probe), a.prime, a.engine, bud, infer=not a.no_infer)
    else:
        if len(fam.parameters) > a.multi_param:
            raise OrefactorError(f"family has {len(fam.parameters)} parameters; raise --multi-param")
        hits = multi_param_sweep(fam, _pair(a.probe), bud)
    lines = [f"parameters: {' '.join(fam.parameters)}"]
    lines += [h.line() for h in hits]
    lines.append(f"iterations: {bud.used}")
    return lines


def cmd_pcurv(a) -> List[str]:
    L = _load_op(a.op)
    primes = a.prime or list(default_primes())
    text = L.to_text()
    jobs = [(text, p, a.method) for p in primes]
    if a.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            return list(ex.map(_pcurv_job, jobs))
    return [_pcurv_job(j) for j in jobs]


def cmd_sympow(a) -> List[str]:
    L = _load_op(a.op)
    R = symmetric_power(L, a.k).primitive()
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(R.to_text())
        return [f"order={R.order} degree={R.degree} written={a.out}"]
    return [R.to_text().rstrip("\n")]


def _prefactor(text: Optional[str]):
    if not text:
        return []
    out = []
    for tok in text.split():
        poly, _, e = tok.rpartition(":")
        out.append((tuple(Fraction(c) for c in poly.split(",")), Fraction(e)))
    return out


def cmd_ansatz(a) -> List[str]:
    head = _read(a.target).lstrip().split("\n", 1)[0].strip()
    target = DiffOperator.from_text(_read(a.target)) if head == "lode-v1" else _load_series(a.target)
    sols = ansatz_solve(target, a.g, _prefactor(a.prefactor), a.degree, a.max_degree, a.var)
    out = []
    for s in sols:
        out.append(s.text().rstrip("\n"))
    return out


def cmd_reconstruct(a) -> List[str]:
    stem, ops = load_task_operators(a.task)
    task = align_operators(ops)
    op, rep = reconstruct_operator(task, a.hint or ())
    save_task(task, a.task, stem, op, rep)
    lines = rep.text().splitlines()
    if op is not None:
        lines.append(f"written: {os.path.join(a.task, stem + '.recon.lode')}")
    return lines


def cmd_verify(a) -> List[str]:
    L = _load_op(a.op)
    if a.ansatz:
        sol = fx.load(a.ansatz.split(":", 1)[1]) if a.ansatz.startswith("fixture:") else AnsatzSolution.from_text(_read(a.ansatz))
        ok = verify_membership(L, sol, a.guard)
    elif a.series:
        S = _load_series(a.series)
        if L.ctx.modulus != S.modulus:
            L = L.reduce_mod(S.modulus) if S.modulus else L
        ok = apply_operator(L, S).is_zero()
    else:
        raise OrefactorError("verify needs --series or --ansatz")
    return [f"verified={str(ok).lower()}"]


def cmd_fixtures(a) -> List[str]:
    if a.verify:
        res = fx.verify_all()
    elif a.selftest_f3:
        res = fx.selftest_f3()
    elif a.export:
        data = fx.raw(a.export).decode()
        if a.out:
            with open(a.out, "w") as fh:
                fh.write(data)
            return [f"written={a.out}"]
        return [data.rstrip("\n")]
    else:
        return [f"{n} {fx.REGISTRY[n][0]} {fx.REGISTRY[n][1]}" for n in fx.names()]
    lines = [f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in res]
    if not all(ok for _, ok in res):
        raise FixtureCheckFailed("; ".join(n for n, ok in res if not ok))
    return lines


class FixtureCheckFailed(OrefactorError):
    pass


# parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orefactor", description="Operator guessing and factorization modulo primes.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--manifest", help="write a JSON run manifest to this path")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("guess", help="guess operators annihilating a series")
    g.add_argument("--series", required=True)
    g.add_argument("--Q", type=int)
    g.add_argument("--D", type=int)
    g.add_argument("--fit", nargs="+", metavar="Q,D", help="fit the ODE formula from these probes")
    g.add_argument("--infer", action="store_true", help="infer the minimal order")
    g.add_argument("--show-operator", action="store_true")
    g.set_defaults(func=cmd_guess)

    e = sub.add_parser("exponents", help="local exponents at a point")
    e.add_argument("--op", required=True)
    e.add_argument("--point", required=True)
    e.add_argument("--prime", type=int)
    e.set_defaults(func=cmd_exponents)

    s = sub.add_parser("logscheme", help="log structure at a point, or factor-order scheme over several")
    s.add_argument("--op", required=True)
    s.add_argument("--point", required=True, nargs="+")
    s.add_argument("--prime", type=int)
    s.set_defaults(func=cmd_logscheme)

    f = sub.add_parser("factor", help="factorize modulo a prime")
    src = f.add_mutually_exclusive_group(required=True)
    src.add_argument("--op")
    src.add_argument("--series")
    f.add_argument("--prime", type=int, default=32749)
    f.add_argument("--budget-alpha", type=int, default=10**6)
    f.add_argument("--multi-param", type=int, default=1)
    f.add_argument("--engine", choices=["pencil", "enumerate"], default="pencil")
    f.set_defaults(func=cmd_factor)

    w = sub.add_parser("sweep", help="sweep the free coefficient of a Frobenius family")
    w.add_argument("--op", required=True)
    w.add_argument("--prime", type=int, default=32749)
    w.add_argument("--point", default="0")
    w.add_argument("--exponent", type=int, required=True)
    w.add_argument("--terms", type=int, default=400)
    w.add_argument("--probe", required=True, metavar="Q,D")
    w.add_argument("--engine", choices=["pencil", "enumerate"], default="pencil")
    w.add_argument("--budget-alpha", type=int, default=10**6)
    w.add_argument("--multi-param", type=int, default=1)
    w.add_argument("--no-infer", action="store_true")
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("pcurv", help="p-curvature nilpotence")
    c.add_argument("--op", required=True)
    c.add_argument("--prime", type=int, action="append")
    c.add_argument("--method", choices=["auto", "exact", "local"], default="auto")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_pcurv)

    y = sub.add_parser("sympow", help="symmetric power")
    y.add_argument("--op", required=True)
    y.add_argument("--k", type=int, required=True)
    y.add_argument("--out")
    y.set_defaults(func=cmd_sympow)

    z = sub.add_parser("ansatz", help="fit a homogeneous K/E ansatz")
    z.add_argument("--target", required=True, help="series-v1 or lode-v1 file")
    z.add_argument("--g", type=int, required=True)
    z.add_argument("--prefactor", help="space separated 'c0,c1,...:exponent' items")
    z.add_argument("--degree", type=int, default=0)
    z.add_argument("--max-degree", type=int)
    z.add_argument("--var", choices=["w", "x"], default="w")
    z.set_defaults(func=cmd_ansatz)

    r = sub.add_parser("reconstruct", help="rational operator from a task directory")
    r.add_argument("--task", required=True)
    r.add_argument("--hint", type=int, action="append")
    r.set_defaults(func=cmd_reconstruct)

    v = sub.add_parser("verify", help="check an operator against a series or ansatz")
    v.add_argument("--op", required=True)
    v.add_argument("--series")
    v.add_argument("--ansatz")
    v.add_argument("--guard", type=int)
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("fixtures", help="list, export or check the shipped fixtures")
    grp = x.add_mutually_exclusive_group()
    grp.add_argument("--verify", action="store_true")
    grp.add_argument("--selftest-f3", action="store_true")
    grp.add_argument("--export")
    x.add_argument("--out")
    x.set_defaults(func=cmd_fixtures)
    return ap


def _manifest(path: str, argv: Sequence[str]):
    # the manifest's own path is left out so reruns compare equal
    args, skip = [], False
    for t in argv:
        if skip:
            skip = False
        elif t == "--manifest":
            skip = True
        elif not t.startswith("--manifest="):
            args.append(t)
    data = {"argv": args, "primes": list(default_primes()), "version": __version__}
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # negative rationals such as -1/4 would otherwise be read as options
    args = parser.parse_args([" " + t if re.match(r"^-\d", t) else t for t in argv])
    try:
        lines = args.func(args)
    except (OrefactorError, ArithmeticError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, KeyError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for ln in lines:
        print(ln)
    if args.manifest:
        _manifest(args.manifest, argv)
    return 0


if __name__ == "__main__":
    sys.exit(main())
