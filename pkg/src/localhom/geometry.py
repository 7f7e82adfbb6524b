"""Point clouds, ball-type vertex sets, subsampling and graph-based centers."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist, squareform


class PointCloud:
    """Immutable ``n x d`` array of ambient coordinates.

    The underlying array is copied on construction and marked read-only, so a
    cloud can be shared freely between threads or pickled to worker processes.
    """

    def __init__(self, points):
        arr = np.array(points, dtype=np.float64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 1)
        if arr.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise ValueError("ambient dimension must be at least 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("points contain NaN or Inf coordinates")
        arr.setflags(write=False)
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def n(self) -> int:
        return self._points.shape[0]

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i):
        return self._points[i]

    def __repr__(self) -> str:
        return f"PointCloud(n={self.n}, d={self.dim})"

    def __getstate__(self):
        return {"points": np.array(self._points)}

    def __setstate__(self, state):
        self.__init__(state["points"])

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(self._points)

    def resolve(self, p) -> np.ndarray:
        """Return the coordinates of ``p``, which is either an index or a vector."""
        if isinstance(p, (int, np.integer)):
            return self._points[int(p)]
        vec = np.asarray(p, dtype=np.float64).reshape(-1)
        if vec.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: point has {vec.shape[0]} coordinates, cloud has {self.dim}")
        return vec

    def distances_to(self, p) -> np.ndarray:
        center = self.resolve(p)
        if self.n == 0:
            return np.zeros(0)
        return np.sqrt(((self._points - center) ** 2).sum(axis=1))

    def subset(self, indices) -> PointCloud:
        return PointCloud(self._points[np.asarray(indices, dtype=np.intp)])


def ball_query(cloud: PointCloud, center, radius: float, *, index: bool = False) -> np.ndarray:
    """Sorted indices of points in the closed ball of ``radius`` around ``center``.

    With ``index=True`` the query goes through a cached k-d tree; the result is
    filtered by the same exact distance test as the brute-force scan.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    c = cloud.resolve(center)
    if cloud.n == 0:
        return np.zeros(0, dtype=np.intp)
    if index:
        cand = np.asarray(cloud.tree.query_ball_point(c, radius * (1 + 1e-12) + 1e-300), dtype=np.intp)
        if cand.size == 0:
            return cand
        d = np.sqrt(((cloud.points[cand] - c) ** 2).sum(axis=1))
        return np.sort(cand[d <= radius])
    return np.flatnonzero(cloud.distances_to(c) <= radius)


def inner_vertex_set(cloud: PointCloud, p, alpha: float, r: float) -> np.ndarray:
    """Points whose alpha-ball meets the closed r-ball around ``p``."""
    if alpha <= 0 or r <= 0:
        raise ValueError("alpha and r must be positive")
    return np.flatnonzero(cloud.distances_to(p) <= r + alpha)


def outer_vertex_set(cloud: PointCloud, p, alpha: float, r: float, beta: float) -> np.ndarray:
    """Points of the inner set whose alpha-ball also reaches distance beta from ``p``."""
    if alpha <= 0 or r <= 0:
        raise ValueError("alpha and r must be positive")
    if beta <= 0:
        raise ValueError("beta must be positive")
    d = cloud.distances_to(p)
    return np.flatnonzero((d <= r + alpha) & (d >= beta - alpha))


def farthest_point_subsample(cloud: PointCloud, count: int | None = None, min_dist: float | None = None,
                             seed: int = 0) -> np.ndarray:
    """Greedy farthest-point traversal, returned in selection order.

    Exactly one of ``count`` and ``min_dist`` must be given. In ``min_dist``
    mode the traversal stops once the next farthest point is closer than
    ``min_dist`` to the selection, so all selected pairs are at least
    ``min_dist`` apart.
    """
    if (count is None) == (min_dist is None):
        raise ValueError("give exactly one of count or min_dist")
    n = cloud.n
    if count is not None:
        if count > n:
            raise ValueError(f"count {count} exceeds number of points {n}")
        if count <= 0:
            return np.zeros(0, dtype=np.intp)
    elif min_dist <= 0:
        raise ValueError("min_dist must be positive")
    if n == 0:
        return np.zeros(0, dtype=np.intp)

    rng = np.random.default_rng(seed)
    first = int(rng.integers(n))
    chosen = [first]
    nearest = cloud.distances_to(first)
    limit = count if count is not None else n
    while len(chosen) < limit:
        nxt = int(np.argmax(nearest))
        if min_dist is not None and nearest[nxt] < min_dist:
            break
        chosen.append(nxt)
        np.minimum(nearest, cloud.distances_to(nxt), out=nearest)
    return np.array(chosen, dtype=np.intp)


@dataclass(frozen=True)
class NeighborhoodGraph:
    """Distance-threshold graph with Euclidean edge weights and component labels."""

    n: int
    edge_len: float
    edges: np.ndarray  # (m, 2), i < j
    weights: np.ndarray  # (m,)
    labels: np.ndarray  # component id per vertex
    n_components: int = field(default=0)

    def components(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == c) for c in range(self.n_components)]

    def csgraph(self):
        m = len(self.edges)
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]]) if m else np.zeros(0, dtype=np.intp)
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]]) if m else np.zeros(0, dtype=np.intp)
        w = np.concatenate([self.weights, self.weights]) if m else np.zeros(0)
        return coo_matrix((w, (rows, cols)), shape=(self.n, self.n)).tocsr()


def build_neighborhood_graph(cloud: PointCloud, edge_len: float) -> NeighborhoodGraph:
    if edge_len <= 0:
        raise ValueError("edge_len must be positive")
    n = cloud.n
    if n >= 2:
        pairs = np.array(sorted(cloud.tree.query_pairs(edge_len * (1 + 1e-12))), dtype=np.intp).reshape(-1, 2)
        if len(pairs):
            w = np.sqrt(((cloud.points[pairs[:, 0]] - cloud.points[pairs[:, 1]]) ** 2).sum(axis=1))
            keep = w <= edge_len
            pairs, w = pairs[keep], w[keep]
        else:
            w = np.zeros(0)
    else:
        pairs, w = np.zeros((0, 2), dtype=np.intp), np.zeros(0)
    g = NeighborhoodGraph(n=n, edge_len=edge_len, edges=pairs, weights=w,
                          labels=np.zeros(n, dtype=np.intp), n_components=0)
    if n == 0:
        return g
    ncomp, labels = connected_components(g.csgraph(), directed=False)
    # relabel so components are numbered by their lowest vertex
    order = {}
    for lab in labels:
        order.setdefault(int(lab), len(order))
    labels = np.array([order[int(lab)] for lab in labels], dtype=np.intp)
    return NeighborhoodGraph(n=n, edge_len=edge_len, edges=pairs, weights=w, labels=labels, n_components=ncomp)


def component_centers(graph: NeighborhoodGraph, cloud: PointCloud | None = None,
                      min_component_size: int = 1, rel_tol: float = 1e-9) -> np.ndarray:
    """One center per component of at least ``min_component_size`` vertices.

    The center minimizes the weighted eccentricity (longest shortest path to
    any other vertex of the component). Eccentricities within ``rel_tol`` of
    the minimum count as tied and the lowest index wins.
    """
    if min_component_size < 1:
        raise ValueError("min_component_size must be >= 1")
    if cloud is not None and cloud.n != graph.n:
        raise ValueError("graph and cloud sizes differ")
    csg = graph.csgraph()
    centers = []
    for comp in graph.components():
        if len(comp) < min_component_size:
            continue
        if len(comp) == 1:
            centers.append(int(comp[0]))
            continue
        dist = dijkstra(csg, directed=False, indices=comp)
        ecc = dist[:, comp].max(axis=1)
        best = ecc.min()
        tied = np.flatnonzero(ecc <= best + rel_tol * max(1.0, abs(best)))
        centers.append(int(comp[tied].min()))
    return np.array(sorted(centers), dtype=np.intp)


def pairwise_distances(cloud: PointCloud, indices) -> np.ndarray:
    """Dense distance matrix among ``indices``; every entry is computed per pair."""
    idx = np.asarray(indices, dtype=np.intp)
    if idx.size < 2:
        return np.zeros((idx.size, idx.size))
    return squareform(pdist(cloud.points[idx]))
