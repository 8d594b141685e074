"""Multi-prime reconstruction of rational operators.

Per-prime operators are brought to a common projective gauge (an anchor
coefficient equal to 1), combined coefficientwise by Chinese remaindering and
lifted to rationals by bounded reconstruction, trying scale hints in order.
With three or more primes one prime is held out: a coefficient only counts as
reconstructed if its lift reduces to the held-out residue.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .diffop import DiffOperator, local_exponents, p_curvature
from .errors import ConstraintViolation, HoldoutMismatch, NoReconstruction, ShapeMismatch
from .modarith import QQ, PrimeContext, ResidueSystem, crt_combine, prime_family, scaled_reconstruct

RECONSTRUCTED = "reconstructed"
PENDING = "pending"
INCONSISTENT = "inconsistent"


@dataclass
class ReconstructionTask:
    primes: List[int]
    grids: Dict[int, List[List[int]]]  # prime -> [i][j] residues (gauge fixed)
    basis: str
    order: int
    degree: int
    anchor: Tuple[int, int]
    hints: List[int] = field(default_factory=list)
    status: Dict[Tuple[int, int], str] = field(default_factory=dict)
    values: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def positions(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.order + 1) for j in range(self.degree + 1)]

    def residues(self, pos: Tuple[int, int], primes: Sequence[int]) -> ResidueSystem:
        i, j = pos
        return ResidueSystem(tuple((self.grids[p][i][j], p) for p in primes))


@dataclass
class ReconstructionReport:
    status: Dict[Tuple[int, int], str]
    primes_used: List[int]
    holdout: Optional[int]
    provisional: bool

    @property
    def complete(self) -> bool:
        return all(s == RECONSTRUCTED for s in self.status.values())

    def counts(self) -> Dict[str, int]:
        return dict(Counter(self.status.values()))

    def text(self) -> str:
        lines = [
            f"primes: {','.join(map(str, self.primes_used))}",
            f"holdout: {self.holdout if self.holdout is not None else '-'}",
            f"provisional: {str(self.provisional).lower()}",
        ]
        for (i, j), s in sorted(self.status.items()):
            lines.append(f"{i},{j}: {s}")
        return "\n".join(lines) + "\n"


def _grid(op: DiffOperator, degree: int) -> List[List[int]]:
    return [[(op.coeffs[i][j] if j < len(op.coeffs[i]) else 0) for j in range(degree + 1)]
            for i in range(op.order + 1)]


def align_operators(ops: Sequence[DiffOperator], anchor: Optional[Tuple[int, int]] = None) -> ReconstructionTask:
    """Common gauge for per-prime images of one rational operator."""
    if not ops:
        raise ShapeMismatch("no operators given")
    primes = []
    for op in ops:
        p = op.ctx.modulus
        if p == 0:
            raise ShapeMismatch("per-prime operators must be modular")
        if p in primes:
            raise ShapeMismatch(f"prime {p} appears twice")
        primes.append(p)
    first = ops[0]
    for op in ops[1:]:
        if op.basis != first.basis or op.order != first.order or op.degree != first.degree:
            raise ShapeMismatch(
                f"shape ({op.basis}, {op.order}, {op.degree}) differs from "
                f"({first.basis}, {first.order}, {first.degree})")
    Q, D = first.order, first.degree
    if anchor is None:
        anchor = (Q, len(first.coeffs[Q]) - 1)
    grids = {}
    for op in ops:
        p = op.ctx.modulus
        g = _grid(op, D)
        a = g[anchor[0]][anchor[1]] % p
        if a == 0:
            raise ShapeMismatch(f"anchor coefficient vanishes modulo {p}")
        inv = pow(a, -1, p)
        grids[p] = [[x * inv % p for x in row] for row in g]
    task = ReconstructionTask(primes, grids, first.basis, Q, D, anchor)
    task.status = {pos: PENDING for pos in task.positions()}
    # the gauge makes the anchor exactly 1
    task.status[anchor] = RECONSTRUCTED
    task.values[anchor] = Fraction(1)
    return task


def two_adic_hints(values: Iterable[Fraction], limit: int = 4) -> List[int]:
    """Powers of two suggested by the denominators of known coefficients."""
    seen = []
    for v in values:
        d = Fraction(v).denominator
        k = (d & -d).bit_length() - 1
        if k > 0 and (1 << k) not in seen:
            seen.append(1 << k)
    seen.sort(reverse=True)
    return seen[:limit]


def _lift(rs: ResidueSystem, hints: Sequence[int]) -> List[Tuple[int, Fraction]]:
    u, m = crt_combine(rs)
    out = []
    for s in hints:
        try:
            out.append((s, scaled_reconstruct(u, m, s)))
        except (NoReconstruction, ValueError):
            continue
    return out


def _matches(value: Fraction, residue: int, p: int) -> bool:
    if value.denominator % p == 0:
        return False
    return value.numerator * pow(value.denominator, -1, p) % p == residue % p


def reconstruct_positions(task: ReconstructionTask, positions: Sequence[Tuple[int, int]],
                          primes: Optional[Sequence[int]] = None, hints: Sequence[int] = ()) -> ReconstructionReport:
    """Reconstruct the given grid positions in place (``task.values``)."""
    primes = list(primes if primes is not None else task.primes)
    holdout = primes[-1] if len(primes) >= 3 else None
    use = primes[:-1] if holdout is not None else primes
    order = []
    for h in list(hints) + [1] + task.hints:
        if h not in order:
            order.append(h)
    for pos in positions:
        if task.status.get(pos) == RECONSTRUCTED:
            continue
        cands = _lift(task.residues(pos, use), order)
        if holdout is None:
            if cands:
                task.values[pos] = cands[0][1]
                task.status[pos] = RECONSTRUCTED
            else:
                task.status[pos] = PENDING
            continue
        res_h = task.grids[holdout][pos[0]][pos[1]]
        good = [v for _, v in cands if _matches(v, res_h, holdout)]
        if good:
            task.values[pos] = good[0]
            task.status[pos] = RECONSTRUCTED
        else:
            task.status[pos] = INCONSISTENT if cands else PENDING
    return ReconstructionReport({pos: task.status[pos] for pos in positions}, list(use), holdout,
                                provisional=holdout is None)


def reconstruct_operator(task: ReconstructionTask, hints: Sequence[int] = (),
                         strict: bool = False) -> Tuple[Optional[DiffOperator], ReconstructionReport]:
    """Rational operator from an aligned task, plus the per-coefficient report.

    Caller hints are tried first, then no scaling; the 2-adic magnitudes of
    coefficients already reconstructed are added for a second pass.
    """
    positions = task.positions()
    if len(task.primes) < 2:
        rep = ReconstructionReport({pos: PENDING for pos in positions}, list(task.primes), None, True)
        task.status.update(rep.status)
        return None, rep
    rep = reconstruct_positions(task, positions, hints=hints)
    if not rep.complete:
        auto = two_adic_hints(task.values[p] for p in positions if task.status[p] == RECONSTRUCTED)
        if auto:
            task.hints = auto
            rep = reconstruct_positions(task, positions, hints=hints)
            rep.status = {pos: task.status[pos] for pos in positions}
    if not rep.complete:
        if strict and any(s == INCONSISTENT for s in rep.status.values()):
            raise HoldoutMismatch("some coefficients disagree with the held-out prime")
        return None, rep
    op = _assemble(task)
    if rep.holdout is not None:
        p = rep.holdout
        for (i, j), v in task.values.items():
            if not _matches(v, task.grids[p][i][j], p):
                raise HoldoutMismatch(f"coefficient {i},{j} fails the held-out prime {p}")
    return op, rep


def _assemble(task: ReconstructionTask) -> DiffOperator:
    coeffs = [[task.values.get((i, j), Fraction(0)) for j in range(task.degree + 1)]
              for i in range(task.order + 1)]
    return DiffOperator(QQ, coeffs, task.basis)


def reconstruct_from_operators(ops: Sequence[DiffOperator], hints: Sequence[int] = (),
                               anchor: Optional[Tuple[int, int]] = None):
    return reconstruct_operator(align_operators(ops, anchor), hints)


@dataclass
class Constraints:
    """Structural information for staged reconstruction.

    ``stages`` lists groups of derivative powers, reconstructed in order; each
    stage may use its own number of primes.  ``exponents`` maps a point spec
    to the expected sorted exponent list there.
    """

    stages: List[List[int]]
    primes_per_stage: Optional[List[int]] = None
    exponents: Dict[str, List[Fraction]] = field(default_factory=dict)
    fixed: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)


def iterative_reconstruct(task: ReconstructionTask, constraints: Constraints):
    """Staged reconstruction: easy blocks first, scale hints from known blocks."""
    reports = []
    for (i, j), v in constraints.fixed.items():
        for p in task.primes:
            if not _matches(Fraction(v), task.grids[p][i][j], p):
                raise ConstraintViolation(f"fixed coefficient {i},{j} = {v} contradicts residues mod {p}")
        task.values[(i, j)] = Fraction(v)
        task.status[(i, j)] = RECONSTRUCTED
    for s, rows in enumerate(constraints.stages):
        n = None if constraints.primes_per_stage is None else constraints.primes_per_stage[s]
        primes = task.primes if n is None else task.primes[:n]
        positions = [(i, j) for i in rows for j in range(task.degree + 1)]
        known = [v for pos, v in task.values.items() if task.status[pos] == RECONSTRUCTED]
        hints = two_adic_hints(known)
        rep = reconstruct_positions(task, positions, primes=primes, hints=hints)
        reports.append(rep)
    status = {pos: task.status[pos] for pos in task.positions()}
    if not all(s == RECONSTRUCTED for s in status.values()):
        return None, reports
    op = _assemble(task)
    for point, expected in constraints.exponents.items():
        got = local_exponents(op, point).sorted_list()
        if sorted(Fraction(e) for e in expected) != got:
            raise ConstraintViolation(f"exponents at {point}: expected {expected}, got {got}")
    return op, reports


def reconstruct_vectors(vecs_by_prime: Mapping[int, List[Sequence[int]]]) -> List[List[Fraction]]:
    """Rational lift of kernel bases computed modulo several primes.

    Primes whose zero pattern disagrees with the majority are dropped; the
    last remaining prime is held out.  Raises ``ArithmeticError`` when the
    data do not yet determine the lift.
    """
    pattern = {p: tuple(tuple(int(x) % p != 0 for x in v) for v in vs) for p, vs in vecs_by_prime.items()}
    common, _ = Counter(pattern.values()).most_common(1)[0]
    primes = [p for p in vecs_by_prime if pattern[p] == common]
    if len(primes) < 3:
        raise ArithmeticError("not enough consistent primes")
    use, holdout = primes[:-1], primes[-1]
    out = []
    for k in range(len(vecs_by_prime[primes[0]])):
        vec = []
        for idx in range(len(vecs_by_prime[primes[0]][k])):
            rs = ResidueSystem(tuple((int(vecs_by_prime[p][k][idx]), p) for p in use))
            cands = _lift(rs, [1])
            if not cands or not _matches(cands[0][1], int(vecs_by_prime[holdout][k][idx]), holdout):
                raise ArithmeticError("reconstruction not confirmed by the held-out prime")
            vec.append(cands[0][1])
        out.append(vec)
    return out


def reconstruct_rational_poly(residues: Mapping[int, Sequence[int]], scale: int = 1) -> Optional[List[Fraction]]:
    """Lift a polynomial known modulo several primes; ``None`` if any
    coefficient fails the bound or the held-out prime."""
    primes = list(residues)
    if len(primes) < 2:
        return None
    holdout = primes[-1] if len(primes) >= 3 else None
    use = primes[:-1] if holdout else primes
    n = len(residues[primes[0]])
    out = []
    for k in range(n):
        cands = _lift(ResidueSystem(tuple((int(residues[p][k]), p) for p in use)), [scale])
        if not cands:
            return None
        v = cands[0][1]
        if holdout and not _matches(v, int(residues[holdout][k]), holdout):
            return None
        out.append(v)
    return out


def primes_needed(poly: Sequence[Fraction], scale: int = 1, var_scale: Fraction = Fraction(1),
                  pool: Optional[Sequence[int]] = None, max_primes: int = 20) -> int:
    """Smallest number of primes (plus one held out) reconstructing ``poly``
    exactly after the substitution w -> var_scale * w and multiplication of
    all residues by ``scale``."""
    target = [Fraction(c) * Fraction(var_scale) ** k for k, c in enumerate(poly)]
    pool = list(pool) if pool is not None else prime_family(max_primes + 1)
    for n in range(1, max_primes + 1):
        primes = pool[: n + 1]
        res = {}
        for p in primes:
            G = PrimeContext(p)
            res[p] = [G.elem(c) for c in target]
        got = reconstruct_rational_poly(res, scale)
        if got == target:
            return n
    raise NoReconstruction(f"more than {max_primes} primes needed")


def nilpotence_gate(op: DiffOperator, primes: Sequence[int]) -> bool:
    """True when the p-curvature is nilpotent at every given prime (>= 3 needed)."""
    if len(primes) < 3:
        raise ValueError("the nilpotence gate needs at least three primes")
    return all(p_curvature(op, p).nilpotent for p in primes)


# task directories -----------------------------------------------------------

def save_task(task: ReconstructionTask, directory: str, stem: str,
              result: Optional[DiffOperator] = None, report: Optional[ReconstructionReport] = None):
    os.makedirs(directory, exist_ok=True)
    for p in task.primes:
        op = DiffOperator(PrimeContext(p), task.grids[p], task.basis)
        with open(os.path.join(directory, f"{stem}.p{p}.lode"), "w") as fh:
            fh.write(op.to_text())
    if result is not None:
        with open(os.path.join(directory, f"{stem}.recon.lode"), "w") as fh:
            fh.write(result.to_text())
    if report is not None:
        with open(os.path.join(directory, "report.txt"), "w") as fh:
            fh.write(report.text())


def load_task_operators(directory: str) -> Tuple[str, List[DiffOperator]]:
    """Per-prime operators ``<stem>.p<prime>.lode`` found in a directory."""
    ops, stems = [], set()
    for name in sorted(os.listdir(directory)):
        if not name.endswith(".lode") or ".p" not in name or name.endswith(".recon.lode"):
            continue
        stem, _, rest = name[: -len(".lode")].rpartition(".p")
        if not rest.isdigit():
            continue
        stems.add(stem)
        with open(os.path.join(directory, name)) as fh:
            ops.append(DiffOperator.from_text(fh.read()))
    if len(stems) != 1:
        raise ShapeMismatch(f"expected one task stem in {directory}, found {sorted(stems)}")
    ops.sort(key=lambda op: -op.ctx.modulus)
    return stems.pop(), ops
