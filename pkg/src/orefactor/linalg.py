"""Dense linear algebra over prime fields (numpy int64) and over generic field
contexts (Python lists).

Pivoting is deterministic everywhere: columns left to right, and within a
column the first row (in current order) holding a nonzero entry.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np


def rref_mod(M, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form modulo ``p``.  Returns ``(rows, pivot_columns)``."""
    A = np.array(M, dtype=np.int64) % p
    if A.ndim != 2:
        raise ValueError("matrix expected")
    n, m = A.shape
    pivots: List[int] = []
    r = 0
    for c in range(m):
        if r == n:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r, c:] = A[r, c:] * inv % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            A[rows, c:] = (A[rows, c:] - np.outer(col[rows], A[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank_mod(M, p: int) -> int:
    return len(rref_mod(M, p)[1])


def nullspace_from_rref(R: np.ndarray, pivots: Sequence[int], ncols: int, p: int) -> List[np.ndarray]:
    """Kernel basis, one vector per free column (ascending)."""
    pivset = set(pivots)
    out = []
    for c in range(ncols):
        if c in pivset:
            continue
        v = np.zeros(ncols, dtype=np.int64)
        v[c] = 1
        for row, pc in enumerate(pivots):
            if pc < c:
                v[pc] = (-R[row, c]) % p
        out.append(v)
    return out


def nullspace_mod(M, p: int) -> List[np.ndarray]:
    M = np.asarray(M)
    R, piv = rref_mod(M, p)
    return nullspace_from_rref(R, piv, M.shape[1], p)


def det_mod(M, p: int) -> int:
    A = np.array(M, dtype=np.int64) % p
    n = A.shape[0]
    det = 1
    for c in range(n):
        nz = np.flatnonzero(A[c:, c])
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            A[[c, i]] = A[[i, c]]
            det = -det
        piv = int(A[c, c])
        det = det * piv % p
        inv = pow(piv, -1, p)
        below = A[c + 1:, c] * inv % p
        if below.any():
            A[c + 1:, c:] = (A[c + 1:, c:] - np.outer(below, A[c, c:]) % p) % p
    return det % p


def matmul_mod(A, B, p: int) -> np.ndarray:
    """Matrix product mod p without int64 overflow for p < 2^31."""
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    if p < 2**26 and A.shape[1] < 2**11:
        return (A @ B) % p
    # split B into 16-bit halves to keep partial sums below 2^63
    lo = B & 0xFFFF
    hi = B >> 16
    return ((A @ lo) % p + ((A @ hi) % p) * 65536 % p) % p


# generic field contexts ----------------------------------------------------

def rref_field(F, rows: Sequence[Sequence]) -> Tuple[List[list], List[int]]:
    A = [list(r) for r in rows]
    n = len(A)
    m = len(A[0]) if A else 0
    pivots: List[int] = []
    r = 0
    for c in range(m):
        if r == n:
            break
        i = next((k for k in range(r, n) if not F.is_zero(A[k][c])), None)
        if i is None:
            continue
        A[r], A[i] = A[i], A[r]
        inv = F.inv(A[r][c])
        A[r] = [F.mul(x, inv) for x in A[r]]
        for k in range(n):
            if k != r and not F.is_zero(A[k][c]):
                f = A[k][c]
                A[k] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[k], A[r])]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def nullspace_field(F, rows: Sequence[Sequence], ncols: int) -> List[list]:
    if not rows:
        return [[F.one if j == c else F.zero for j in range(ncols)] for c in range(ncols)]
    R, piv = rref_field(F, rows)
    pivset = set(piv)
    out = []
    for c in range(ncols):
        if c in pivset:
            continue
        v = [F.zero] * ncols
        v[c] = F.one
        for row, pc in enumerate(piv):
            if pc < c:
                v[pc] = F.neg(R[row][c])
        out.append(v)
    return out
