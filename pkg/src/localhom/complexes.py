"""Vietoris-Rips complexes and the four-complex local pair around a base point.

A local pair consists of two nested Rips pairs ``(A1, B1) -> (A2, B2)`` with
``B1 <= A1 <= A2`` and ``B1 <= B2 <= A2``. Every simplex of ``A2`` receives one
of five region tags, and the simplices are listed block by block:

====  =========================
tag   region
====  =========================
1     ``B2 \\ A1``
2     ``B1``
3     ``(B2 \\ B1) & A1``
4     ``A1 \\ B2``
5     ``A2 \\ (A1 | B2)``
====  =========================

Inside a block simplices are sorted by dimension, then lexicographically.

Only blocks 3-5 enter the image-rank computation, so the default builder
enumerates just those: cliques of ``A2`` that touch the inner ball
``d(p, .) < eta1 - 3a`` and cliques of ``A1`` inside ``P^{eta1}_{3a,r}`` that
touch ``d(p, .) < eta2 - a``. The full construction is kept for checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .geometry import PointCloud, inner_vertex_set, outer_vertex_set, pairwise_distances

Simplex = tuple[int, ...]

DEFAULT_BUDGET = 5_000_000

REGION_NAMES = {
    1: "B2-A1",
    2: "B1",
    3: "(B2-B1)&A1",
    4: "A1-B2",
    5: "A2-(A1|B2)",
}


class BudgetExceeded(RuntimeError):
    """Raised when a complex would exceed its vertex or simplex budget."""

    def __init__(self, what: str, limit: int, base=None):
        self.what = what
        self.limit = limit
        self.base = base
        where = f" at base point {base}" if base is not None else ""
        super().__init__(f"{what} budget of {limit} exceeded{where}")


def simplex_key(s: Simplex):
    return (len(s), s)


def facets(s: Simplex) -> list[Simplex]:
    if len(s) <= 1:
        return []
    return [s[:i] + s[i + 1:] for i in range(len(s))]


@dataclass(frozen=True)
class RipsComplex:
    """Clique complex of the ``threshold`` graph on ``vertices``, capped at ``dim_cap``."""

    threshold: float
    dim_cap: int
    vertices: tuple[int, ...]
    simplices: tuple[Simplex, ...]  # sorted by (dim, lex)

    @cached_property
    def simplex_set(self) -> frozenset:
        return frozenset(self.simplices)

    def __len__(self) -> int:
        return len(self.simplices)

    def __contains__(self, s) -> bool:
        return tuple(s) in self.simplex_set

    def __iter__(self):
        return iter(self.simplices)

    def count_by_dim(self) -> list[int]:
        counts = [0] * (self.dim_cap + 1)
        for s in self.simplices:
            counts[len(s) - 1] += 1
        return counts

    def induced(self, vertex_subset: Iterable[int]) -> RipsComplex:
        """Full subcomplex on ``vertex_subset``, which equals the Rips complex of that subset."""
        keep = set(int(v) for v in vertex_subset)
        verts = tuple(v for v in self.vertices if v in keep)
        simp = tuple(s for s in self.simplices if all(v in keep for v in s))
        return RipsComplex(self.threshold, self.dim_cap, verts, simp)

    def is_subcomplex_of(self, other: RipsComplex) -> bool:
        return self.simplex_set <= other.simplex_set


def build_rips(cloud: PointCloud, vertex_set, threshold: float, dim_cap: int,
               budget: int | None = DEFAULT_BUDGET, base=None) -> RipsComplex:
    """All cliques of at most ``dim_cap + 1`` vertices in the closed threshold graph."""
    if dim_cap < 0:
        raise ValueError("dim_cap must be >= 0")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    verts = np.unique(np.asarray(vertex_set, dtype=np.intp))
    nv = len(verts)
    if budget is not None and nv > budget:
        raise BudgetExceeded("simplex", budget, base)
    dist = pairwise_distances(cloud, verts)
    adj = dist <= threshold
    # higher-indexed neighbours as bitmasks over local positions
    upper = []
    for i in range(nv):
        row = np.flatnonzero(adj[i, i + 1:]) + i + 1
        mask = 0
        for j in row:
            mask |= 1 << int(j)
        upper.append(mask)

    g = [int(v) for v in verts]
    out: list[Simplex] = [(v,) for v in g]
    count = nv

    def expand(simplex: Simplex, cand: int):
        nonlocal count
        while cand:
            low = cand & -cand
            j = low.bit_length() - 1
            cand ^= low
            s = simplex + (g[j],)
            out.append(s)
            count += 1
            if budget is not None and count > budget:
                raise BudgetExceeded("simplex", budget, base)
            if len(s) <= dim_cap:
                nxt = cand & upper[j]
                if nxt:
                    expand(s, nxt)

    if dim_cap >= 1:
        for i in range(nv):
            expand((g[i],), upper[i])
    out.sort(key=simplex_key)
    return RipsComplex(float(threshold), dim_cap, tuple(g), tuple(out))


@dataclass(frozen=True)
class LocalPairComplex:
    """The nested Rips pairs around one base point, tagged and ordered."""

    A1: RipsComplex | None
    B1: RipsComplex | None
    A2: RipsComplex | None
    B2: RipsComplex | None
    order: tuple[Simplex, ...]
    tags: tuple[int, ...]
    base: object = None
    schedule: object = field(default=None, compare=False)
    cap: int | None = None
    neighbors: int | None = None  # vertices of A2

    @property
    def pruned(self) -> bool:
        """True when blocks 1-2 and the four complexes were never materialised."""
        return self.A2 is None

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.order)}

    @cached_property
    def block_bounds(self) -> dict[int, tuple[int, int]]:
        bounds = {}
        pos = 0
        for b in range(1, 6):
            start = pos
            while pos < len(self.tags) and self.tags[pos] == b:
                pos += 1
            bounds[b] = (start, pos)
        return bounds

    @property
    def dim_cap(self) -> int:
        return self.cap if self.cap is not None else self.A2.dim_cap

    def block(self, b: int) -> tuple[Simplex, ...]:
        lo, hi = self.block_bounds[b]
        return self.order[lo:hi]

    def suffix_start(self) -> int:
        """Position of the first simplex of block 3."""
        return self.block_bounds[3][0]

    def dump(self) -> str:
        """One simplex per line: ``region dim v0 v1 ...`` in filtration order."""
        lines = [f"{t} {len(s) - 1} " + " ".join(map(str, s)) for s, t in zip(self.order, self.tags)]
        return "\n".join(lines) + ("\n" if lines else "")

    def reordered(self, rng) -> LocalPairComplex:
        """Same pair with simplices shuffled inside each (block, dimension) group."""
        groups: dict[tuple[int, int], list[Simplex]] = {}
        for s, t in zip(self.order, self.tags):
            groups.setdefault((t, len(s)), []).append(s)
        order, tags = [], []
        for key in sorted(groups):
            items = list(groups[key])
            perm = rng.permutation(len(items))
            order.extend(items[i] for i in perm)
            tags.extend([key[0]] * len(items))
        return LocalPairComplex(self.A1, self.B1, self.A2, self.B2, tuple(order), tuple(tags),
                                self.base, self.schedule, self.cap, self.neighbors)


def region_of(s: Simplex, A1: frozenset, B1: frozenset, B2: frozenset) -> int:
    in_a1 = s in A1
    in_b2 = s in B2
    if in_b2 and not in_a1:
        return 1
    if s in B1:
        return 2
    if in_b2:
        return 3
    if in_a1:
        return 4
    return 5


def assemble_pair(A1: RipsComplex, B1: RipsComplex, A2: RipsComplex, B2: RipsComplex,
                  base=None, schedule=None, check: bool = True) -> LocalPairComplex:
    """Tag and order the simplices of ``A2`` given the four complexes."""
    if check:
        if not (B1.is_subcomplex_of(A1) and A1.is_subcomplex_of(A2)
                and B1.is_subcomplex_of(B2) and B2.is_subcomplex_of(A2)):
            raise AssertionError(f"inclusion chain violated at base point {base}")
    a1, b1, b2 = A1.simplex_set, B1.simplex_set, B2.simplex_set
    tagged = sorted(((region_of(s, a1, b1, b2), len(s), s) for s in A2.simplices))
    order = tuple(s for _, _, s in tagged)
    tags = tuple(t for t, _, _ in tagged)
    return LocalPairComplex(A1, B1, A2, B2, order, tags, base, schedule, A2.dim_cap, len(A2.vertices))


def local_vertex_sets(cloud: PointCloud, p, alpha: float, eta1: float, eta2: float, r: float):
    """Vertex sets of ``A1, B1, A2, B2`` in that order."""
    return (
        inner_vertex_set(cloud, p, alpha, r),
        outer_vertex_set(cloud, p, alpha, r, eta2),
        inner_vertex_set(cloud, p, 3 * alpha, r),
        outer_vertex_set(cloud, p, 3 * alpha, r, eta1),
    )


def _touching_cliques(cloud: PointCloud, verts, roots, threshold: float, dim_cap: int,
                      inner=None, inner_threshold: float = 0.0, counter=None,
                      budget=None, base=None):
    """Cliques of the threshold graph on ``verts`` that contain a vertex of ``roots``.

    With ``inner`` given, each clique is also flagged by whether it is a clique
    of the ``inner_threshold`` graph on ``inner``. Yields ``(simplex, flag)``
    with the simplex sorted by vertex id.
    """
    verts = np.unique(np.asarray(verts, dtype=np.intp))
    rootset = set(int(v) for v in roots)
    # roots get the lowest local positions, so every wanted clique starts at one
    local = sorted((int(v) for v in verts), key=lambda v: (v not in rootset, v))
    nroot = sum(1 for v in local if v in rootset)
    nv = len(local)
    dist = pairwise_distances(cloud, np.asarray(local, dtype=np.intp))
    adj = dist <= threshold
    upper = [_mask(np.flatnonzero(adj[i, i + 1:]) + i + 1) for i in range(nv)]
    if inner is not None:
        inset = set(int(v) for v in inner)
        member = np.array([v in inset for v in local], dtype=bool)
        near = (dist <= inner_threshold) & member[:, None] & member[None, :]
        full = [_mask(np.flatnonzero(near[i])) if member[i] else 0 for i in range(nv)]
    else:
        member = np.zeros(nv, dtype=bool)
        full = [0] * nv
    count = counter if counter is not None else [0]
    out: list[tuple[Simplex, bool]] = []

    def emit(s, flag):
        out.append((tuple(sorted(local[i] for i in s)), flag))
        count[0] += 1
        if budget is not None and count[0] > budget:
            raise BudgetExceeded("simplex", budget, base)

    def expand(s, cand, flag, near_cand):
        while cand:
            low = cand & -cand
            j = low.bit_length() - 1
            cand ^= low
            t = s + (j,)
            f = flag and bool(near_cand & low)
            emit(t, f)
            if len(t) <= dim_cap:
                nxt = cand & upper[j]
                if nxt:
                    expand(t, nxt, f, near_cand & full[j] if f else 0)

    for i in range(nroot):
        flag = bool(member[i])
        emit((i,), flag)
        if dim_cap >= 1 and upper[i]:
            expand((i,), upper[i], flag, full[i])
    return out


def _mask(positions) -> int:
    m = 0
    for j in positions:
        m |= 1 << int(j)
    return m


def build_local_blocks(cloud: PointCloud, p, schedule, dim_cap: int | None = None,
                       budget: int | None = DEFAULT_BUDGET, max_vertices: int | None = None
                       ) -> LocalPairComplex:
    """Blocks 3-5 of the local pair, without materialising ``B1``, ``B2`` or block 1.

    Block 4 and 5 simplices are the ``6a``-cliques of ``P_{3a,r}`` that touch
    ``P_{3a,r} \\ P^{eta1}_{3a,r}``; those that are also ``2a``-cliques of
    ``P_{a,r}`` form block 4. Block 3 is the ``2a``-cliques of
    ``P_{a,r} & P^{eta1}_{3a,r}`` that touch ``P_{a,r} \\ P^{eta2}_{a,r}``.
    """
    alpha, eta1, eta2, r = schedule.alpha, schedule.eta1, schedule.eta2, schedule.r
    if dim_cap is None:
        dim_cap = schedule.kmax_for(cloud.dim) + 1
    base = int(p) if isinstance(p, (int, np.integer)) else "point"
    va1, vb1, va2, vb2 = local_vertex_sets(cloud, p, alpha, eta1, eta2, r)
    if max_vertices is not None and len(va2) > max_vertices:
        raise BudgetExceeded("vertex", max_vertices, base)
    counter = [0]
    inner2 = np.setdiff1d(va2, vb2)
    big = _touching_cliques(cloud, va2, inner2, 6 * alpha, dim_cap, inner=va1,
                            inner_threshold=2 * alpha, counter=counter, budget=budget, base=base)
    shell = np.intersect1d(va1, vb2)
    small = _touching_cliques(cloud, shell, np.setdiff1d(shell, vb1), 2 * alpha, dim_cap,
                              counter=counter, budget=budget, base=base)
    blocks = {3: [s for s, _ in small], 4: [], 5: []}
    for s, in_a1 in big:
        blocks[4 if in_a1 else 5].append(s)
    order: list[Simplex] = []
    tags: list[int] = []
    for b in (3, 4, 5):
        items = sorted(blocks[b], key=simplex_key)
        order.extend(items)
        tags.extend([b] * len(items))
    return LocalPairComplex(None, None, None, None, tuple(order), tuple(tags), base, schedule,
                            dim_cap, len(va2))


def build_local_pair(cloud: PointCloud, p, schedule, dim_cap: int | None = None,
                     budget: int | None = DEFAULT_BUDGET, max_vertices: int | None = None,
                     check: bool = True) -> LocalPairComplex:
    """Build ``(Rips^{2a}(P_{a,r}), Rips^{2a}(P^{eta2}_{a,r})) -> (Rips^{6a}(P_{3a,r}), Rips^{6a}(P^{eta1}_{3a,r}))``.

    Every simplex of all four complexes is enumerated and tagged. ``schedule``
    needs ``alpha``, ``eta1``, ``eta2``, ``r`` attributes and a
    ``kmax_for(ambient_dim)`` method unless ``dim_cap`` is given.
    """
    alpha, eta1, eta2, r = schedule.alpha, schedule.eta1, schedule.eta2, schedule.r
    if dim_cap is None:
        dim_cap = schedule.kmax_for(cloud.dim) + 1
    base = int(p) if isinstance(p, (int, np.integer)) else "point"
    va1, vb1, va2, vb2 = local_vertex_sets(cloud, p, alpha, eta1, eta2, r)
    if max_vertices is not None and len(va2) > max_vertices:
        raise BudgetExceeded("vertex", max_vertices, base)
    A2 = build_rips(cloud, va2, 6 * alpha, dim_cap, budget, base)
    A1 = build_rips(cloud, va1, 2 * alpha, dim_cap, budget, base)
    B2 = A2.induced(vb2)
    B1 = A1.induced(vb1)
    return assemble_pair(A1, B1, A2, B2, base, schedule, check)


def pair_from_simplices(A1: Iterable[Sequence[int]], B1: Iterable[Sequence[int]],
                        A2: Iterable[Sequence[int]], B2: Iterable[Sequence[int]],
                        dim_cap: int | None = None, check: bool = True) -> LocalPairComplex:
    """Local pair from explicit simplex lists; faces are added automatically.

    ``dim_cap`` defaults to one above the top dimension present, so ranks are
    reported for every dimension the complexes can carry.
    """

    def close(simplices) -> set:
        acc = set()
        for s in simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s):
                raise ValueError(f"repeated vertex in simplex {s}")
            stack = [s]
            while stack:
                t = stack.pop()
                if t and t not in acc:
                    acc.add(t)
                    stack.extend(facets(t))
        return acc

    sets = [close(X) for X in (A1, B1, A2, B2)]
    if dim_cap is None:
        dim_cap = max((len(s) for X in sets for s in X), default=1)

    def wrap(acc) -> RipsComplex:
        simp = tuple(sorted(acc, key=simplex_key))
        verts = tuple(s[0] for s in simp if len(s) == 1)
        return RipsComplex(float("nan"), dim_cap, verts, simp)

    return assemble_pair(*(wrap(X) for X in sets), check=check)


def is_face_closed(simplices: Iterable[Simplex]) -> bool:
    present = set(simplices)
    return all(f in present for s in present for f in facets(s))


def filtration_is_valid(pair: LocalPairComplex) -> bool:
    """Each face of a block 3-5 simplex lies in blocks 1-2 or precedes it.

    For a pruned pair a face that is not listed counts as lying in blocks 1-2.
    """
    idx = pair.index
    start = pair.suffix_start()
    for j in range(start, len(pair.order)):
        for f in facets(pair.order[j]):
            i = idx.get(f)
            if i is None:
                if pair.pruned:
                    continue
                return False
            if i >= start and i >= j:
                return False
    return True
