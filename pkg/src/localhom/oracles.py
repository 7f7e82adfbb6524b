"""Dense GF(2) linear algebra used as an independent check on the reduction.

Everything here works on explicit 0/1 matrices with row-echelon elimination
and never touches the column-reduction code path.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .complexes import facets, simplex_key

DEFAULT_SIZE_GUARD = 600


class OracleTooLarge(ValueError):
    pass


def gf2_rref(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot columns."""
    m = (np.asarray(mat, dtype=np.uint8) & 1).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hit = np.flatnonzero(m[:, c])
        hit = hit[hit != r]
        if hit.size:
            m[hit] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def gf2_rank(mat: np.ndarray) -> int:
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    return len(gf2_rref(mat)[1])


def gf2_nullspace(mat: np.ndarray) -> np.ndarray:
    """Basis of the right null space, one vector per row."""
    mat = np.asarray(mat, dtype=np.uint8)
    rows, cols = mat.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    if rows == 0:
        return np.eye(cols, dtype=np.uint8)
    rref, pivots = gf2_rref(mat)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for b, f in enumerate(free):
        basis[b, f] = 1
        for i, p in enumerate(pivots):
            basis[b, p] = rref[i, f]
    return basis


def _by_dim(simplices: Iterable) -> dict[int, list]:
    out: dict[int, list] = {}
    for s in sorted({tuple(s) for s in simplices}, key=simplex_key):
        out.setdefault(len(s) - 1, []).append(s)
    return out


def relative_boundary(A: Iterable, B: Iterable, k: int) -> tuple[np.ndarray, list, list]:
    """Matrix of ``C_k(A)/C_k(B) -> C_{k-1}(A)/C_{k-1}(B)`` plus row and column simplices."""
    bset = {tuple(s) for s in B}
    rel = _by_dim(s for s in A if tuple(s) not in bset)
    cols = rel.get(k, [])
    rows = rel.get(k - 1, []) if k >= 1 else []
    ridx = {s: i for i, s in enumerate(rows)}
    mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    for j, s in enumerate(cols):
        for f in facets(s):
            i = ridx.get(f)
            if i is not None:
                mat[i, j] ^= 1
    return mat, rows, cols


def _guard(A, max_simplices):
    n = len(A)
    if max_simplices is not None and n > max_simplices:
        raise OracleTooLarge(f"{n} simplices exceeds dense oracle guard {max_simplices}")


def dense_rank_oracle(A: Iterable, B: Iterable, k: int, max_simplices: int | None = DEFAULT_SIZE_GUARD) -> int:
    """Rank of ``H_k(A, B; Z2)`` as ``dim ker d_k - rank d_{k+1}``."""
    A = [tuple(s) for s in A]
    B = [tuple(s) for s in B]
    _guard(A, max_simplices)
    dk, _, cols = relative_boundary(A, B, k)
    dk1, _, _ = relative_boundary(A, B, k + 1)
    return len(cols) - gf2_rank(dk) - gf2_rank(dk1)


def dense_betti(A, B, kmax: int, max_simplices: int | None = DEFAULT_SIZE_GUARD) -> list[int]:
    return [dense_rank_oracle(A, B, k, max_simplices) for k in range(kmax + 1)]


def dense_image_rank(A1, B1, A2, B2, k: int, max_simplices: int | None = DEFAULT_SIZE_GUARD) -> int:
    """Rank of ``H_k(A1, B1) -> H_k(A2, B2)`` as ``rank[Z; Bd] - rank Bd``.

    ``Z`` spans the relative k-cycles of ``(A1, B1)`` pushed into
    ``C_k(A2)/C_k(B2)`` and ``Bd`` spans the relative k-boundaries of ``(A2, B2)``.
    """
    A1, B1, A2, B2 = ([tuple(s) for s in X] for X in (A1, B1, A2, B2))
    _guard(A2, max_simplices)
    d1, _, cols1 = relative_boundary(A1, B1, k)
    z = gf2_nullspace(d1) if cols1 else np.zeros((0, 0), dtype=np.uint8)
    d2, rows2, _ = relative_boundary(A2, B2, k + 1)
    _, _, cols_k2 = relative_boundary(A2, B2, k)
    target = {s: i for i, s in enumerate(cols_k2)}
    if rows2 and rows2 != cols_k2:
        raise AssertionError("inconsistent chain bases")
    zmap = np.zeros((z.shape[0], len(cols_k2)), dtype=np.uint8)
    for b in range(z.shape[0]):
        for j in np.flatnonzero(z[b]):
            t = target.get(cols1[j])
            if t is not None:
                zmap[b, t] ^= 1
    bd = d2.T if d2.size else np.zeros((0, len(cols_k2)), dtype=np.uint8)
    stacked = np.vstack([zmap, bd]) if zmap.size or bd.size else np.zeros((0, len(cols_k2)), dtype=np.uint8)
    return gf2_rank(stacked) - gf2_rank(bd)
