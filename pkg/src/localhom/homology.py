"""Z2 boundary matrices, column reduction and image-rank readout.

Columns are reduced left to right with the classical persistence algorithm.
Columns are held as sets of row positions, so adding two columns is a
symmetric difference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .complexes import LocalPairComplex, facets, simplex_key

EMPTY = ()
CONE_APEX = -1


@dataclass
class BoundaryMatrixZ2:
    """Square Z2 boundary matrix over an ordered list of simplices.

    ``columns[j]`` holds the sorted row positions of the facets of
    ``simplices[j]`` that are part of the matrix. All rows of a column precede it.
    """

    simplices: list
    columns: list[list[int]]

    def __len__(self) -> int:
        return len(self.columns)

    @property
    def dims(self) -> list[int]:
        return [len(s) - 1 for s in self.simplices]

    def low(self, j: int) -> int:
        col = self.columns[j]
        return col[-1] if col else -1

    def submatrix(self, stop: int) -> BoundaryMatrixZ2:
        """Leading ``stop`` columns, which is closed under the row restriction."""
        return BoundaryMatrixZ2(self.simplices[:stop], [list(c) for c in self.columns[:stop]])


@dataclass
class ReducedMatrix:
    simplices: list
    columns: list[frozenset | set]
    lows: list[int]
    pivots: dict[int, int]  # row -> column whose low it is

    def column(self, j: int) -> list[int]:
        return sorted(self.columns[j])

    def is_zero(self, j: int) -> bool:
        return not self.columns[j]

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pivots.items())


def assemble_boundary(pair: LocalPairComplex) -> BoundaryMatrixZ2:
    """Boundary matrix of blocks 3-5, with facets in blocks 1-2 dropped.

    A pruned pair lists no block 1-2 simplices, so a facet missing from the
    order is one of those.
    """
    start = pair.suffix_start()
    idx = pair.index
    simplices = list(pair.order[start:])
    columns = []
    for s in simplices:
        rows = []
        for f in facets(s):
            i = idx.get(f, -1)
            if i >= start:
                rows.append(i - start)
        rows.sort()
        columns.append(rows)
    return BoundaryMatrixZ2(simplices, columns)


def boundary_of_order(order: Sequence[tuple]) -> BoundaryMatrixZ2:
    """Full boundary matrix of an ordered simplex list (faces must precede cofaces).

    The empty simplex ``()`` may appear and then acts as the augmentation row
    of every vertex.
    """
    idx = {s: i for i, s in enumerate(order)}
    has_empty = EMPTY in idx
    columns = []
    for s in order:
        if len(s) == 1:
            rows = [idx[EMPTY]] if has_empty else []
        else:
            rows = sorted(idx[f] for f in facets(s)) if s else []
        columns.append(rows)
    return BoundaryMatrixZ2(list(order), columns)


def reduce(matrix: BoundaryMatrixZ2) -> ReducedMatrix:
    """Left-to-right Z2 column reduction; returns reduced columns and the low pairing.

    The dropped rows need not form a subcomplex, so the matrix need not square
    to zero and no clearing shortcut is taken.
    """
    n = len(matrix.columns)
    dims = matrix.dims
    columns: list = [frozenset()] * n
    lows = [-1] * n
    pivots: dict[int, int] = {}
    for j, col in enumerate(matrix.columns):
        if not col:
            continue
        d = dims[col[0]]
        for r in col:
            if dims[r] != d:
                raise ValueError(f"column {j} mixes row dimensions")
            if r >= j:
                raise ValueError(f"column {j} has row {r} that does not precede it")
        c = set(col)
        low = col[-1]
        while True:
            k = pivots.get(low)
            if k is None:
                pivots[low] = j
                lows[j] = low
                columns[j] = c
                break
            c ^= columns[k]
            if not c:
                break
            low = max(c)
    return ReducedMatrix(list(matrix.simplices), columns, lows, pivots)


def image_rank(pair: LocalPairComplex, reduced: ReducedMatrix | None = None) -> list[int]:
    """Rank of the map ``H_k(A1, B1) -> H_k(A2, B2)`` for ``k = 0 .. dim_cap - 1``.

    A k-simplex of block 4 whose reduced column is zero carries a class of
    ``H_k(A1, B1)`` that is also a relative cycle of ``(A2, B2)``; it survives
    unless its row is the low of a later column from blocks 4-5.
    """
    if reduced is None:
        reduced = reduce(assemble_boundary(pair))
    start = pair.suffix_start()
    b4_lo, b4_hi = pair.block_bounds[4]
    kmax = pair.dim_cap - 1
    zero = [0] * (kmax + 1)
    bdry = [0] * (kmax + 1)
    for i in range(b4_lo - start, b4_hi - start):
        k = len(reduced.simplices[i]) - 1
        if k > kmax or not reduced.is_zero(i):
            continue
        zero[k] += 1
        # block-3 columns only hold block-3 rows, so any killer lies in blocks 4-5
        if i in reduced.pivots:
            bdry[k] += 1
    ranks = [z - b for z, b in zip(zero, bdry)]
    if any(r < 0 for r in ranks):
        raise AssertionError(f"negative image rank {ranks} at base point {pair.base}")
    return ranks


def relative_betti(pair: LocalPairComplex) -> list[int]:
    """Betti numbers of ``(A1, B1)`` from reducing the blocks 3-4 submatrix."""
    full = assemble_boundary(pair)
    start = pair.suffix_start()
    sub = full.submatrix(pair.block_bounds[4][1] - start)
    red = reduce(sub)
    kmax = pair.dim_cap - 1
    betti = [0] * (kmax + 1)
    for i, s in enumerate(red.simplices):
        k = len(s) - 1
        if k <= kmax and red.is_zero(i) and i not in red.pivots:
            betti[k] += 1
    return betti


def cone_complexes(pair: LocalPairComplex):
    """``(A1 | w*B1, A2 | w*B2)`` with apex ``w = -1``, truncated at the pair's dim cap.

    The cone on an empty complex is taken to be the bare apex, so that reduced
    homology of the coned complex equals relative homology in every case.
    """
    if pair.pruned:
        raise ValueError("coning needs the full pair, not the pruned blocks")
    cap = pair.dim_cap
    w = (CONE_APEX,)

    def coned(A, B):
        out = set(A.simplices)
        out.add(w)
        out.update(w + s for s in B.simplices if len(s) <= cap)
        return out

    return coned(pair.A1, pair.B1), coned(pair.A2, pair.B2)


def cone_oracle_rank(pair: LocalPairComplex, kmax: int | None = None) -> list[int]:
    """Image rank computed through coning and augmented (reduced) homology."""
    if kmax is None:
        kmax = pair.dim_cap - 1
    if kmax + 1 > pair.dim_cap:
        raise ValueError("kmax needs simplices above the pair's dim cap")
    K1, K2 = cone_complexes(pair)
    if not K1 <= K2:
        raise AssertionError("coned complexes are not nested")
    order = [EMPTY] + sorted(K1, key=simplex_key) + sorted(K2 - K1, key=simplex_key)
    n1 = 1 + len(K1)
    red = reduce(boundary_of_order(order))
    ranks = [0] * (kmax + 1)
    for i in range(1, n1):
        k = len(order[i]) - 1
        if k <= kmax and red.is_zero(i) and i not in red.pivots:
            ranks[k] += 1
    return ranks


def local_profile(pair: LocalPairComplex) -> list[int]:
    return image_rank(pair, reduce(assemble_boundary(pair)))
