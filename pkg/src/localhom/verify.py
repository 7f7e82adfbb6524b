"""Random small local pairs and cross-checks of the three rank computations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import LocalPairComplex, build_local_blocks, build_local_pair
from .geometry import PointCloud
from .homology import cone_oracle_rank, image_rank, relative_betti
from .oracles import dense_betti, dense_image_rank
from .pipeline import ParamSchedule, manual_schedule


@dataclass(frozen=True)
class Instance:
    cloud: PointCloud
    base: int
    schedule: ParamSchedule
    dim_cap: int

    def pair(self) -> LocalPairComplex:
        return build_local_pair(self.cloud, self.base, self.schedule, dim_cap=self.dim_cap)

    def blocks(self) -> LocalPairComplex:
        return build_local_blocks(self.cloud, self.base, self.schedule, dim_cap=self.dim_cap)


def random_instance(rng: np.random.Generator, max_points: int = 12, max_dim: int = 3,
                    dim_cap: int = 3) -> Instance:
    """A few points with a random manual schedule at a matching scale.

    Shapes are drawn with equal odds: uniform points in a cube, an evenly spaced
    circle with scales drawn around the window where a base point on the
    circle sees rank 1 in dimension 1, and a jittered circle with loosely
    drawn scales. The circles sit in a random coordinate plane of R^d.
    """
    shape = int(rng.integers(3)) if max_dim >= 2 else 0
    if shape == 0:
        n = int(rng.integers(3, max_points + 1))
        d = int(rng.integers(1, max_dim + 1))
        pts = rng.uniform(-1.0, 1.0, (n, d))
        alpha = float(rng.uniform(0.1, 0.6)) * 2.0 / n ** (1 / d)
        eta1 = alpha + float(rng.uniform(0.01, 1.2))
        eta2 = eta1 + float(rng.uniform(0.01, 0.8))
    else:
        n = int(rng.integers(8, max(8, max_points) + 1))
        d = int(rng.integers(2, max_dim + 1))
        th = np.linspace(0, 2 * np.pi, n, endpoint=False)
        spacing = 2 * np.sin(np.pi / n)
        if shape == 2:
            th = th + rng.uniform(-0.05, 0.05, n) * spacing
        axes = rng.choice(d, size=2, replace=False)
        pts = np.zeros((n, d))
        pts[:, axes[0]], pts[:, axes[1]] = np.cos(th), np.sin(th)
        if shape == 1:
            alpha = float(rng.uniform(0.48, 0.56)) * spacing
            eta1 = 3 * alpha + float(rng.uniform(1.0, 2.5)) * spacing
            eta2 = max(eta1 + 0.01, alpha + float(rng.uniform(2.3, 4.1)) * spacing)
        else:
            alpha = float(rng.uniform(0.3, 0.8)) * spacing
            eta1 = alpha + float(rng.uniform(0.1, 4.0)) * spacing
            eta2 = eta1 + float(rng.uniform(0.1, 2.0)) * spacing
    r = eta2 + float(rng.uniform(0.01, 0.8))
    sched = manual_schedule(alpha, eta1, eta2, r, k_max=dim_cap - 1)
    return Instance(PointCloud(pts), int(rng.integers(n)), sched, dim_cap)


@dataclass
class Check:
    image: list[int]
    cone: list[int]
    pruned: list[int]
    betti: list[int]
    dense_betti: list[int] | None
    dense_image: list[int] | None

    @property
    def ok(self) -> bool:
        agree = self.image == self.cone == self.pruned
        if self.dense_betti is not None:
            agree = agree and self.betti == self.dense_betti
        if self.dense_image is not None:
            agree = agree and self.image == self.dense_image
        return agree


def check_instance(inst: Instance, dense_guard: int = 600) -> Check:
    """All routes on one instance; dense oracles only when the pair is small enough."""
    pair = inst.pair()
    kmax = inst.dim_cap - 1
    img = image_rank(pair)
    cone = cone_oracle_rank(pair)
    pruned = image_rank(inst.blocks())
    betti = relative_betti(pair)
    dbetti = dimage = None
    if len(pair.A2) <= dense_guard:
        A1, B1, A2, B2 = (X.simplices for X in (pair.A1, pair.B1, pair.A2, pair.B2))
        dbetti = dense_betti(A1, B1, kmax, dense_guard)
        dimage = [dense_image_rank(A1, B1, A2, B2, k, dense_guard) for k in range(kmax + 1)]
    return Check(img, cone, pruned, betti, dbetti, dimage)


def run_checks(count: int, seed: int = 0) -> tuple[int, list[tuple[int, Check]]]:
    """Check ``count`` random instances; returns the number checked and the failures."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(count):
        res = check_instance(random_instance(rng))
        if not res.ok:
            failures.append((i, res))
    return count, failures
