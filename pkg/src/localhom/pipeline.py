"""Parameter schedules, per-point estimation and corpus-level aggregation."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .complexes import DEFAULT_BUDGET, BudgetExceeded, build_local_blocks
from .geometry import (PointCloud, ball_query, build_neighborhood_graph, component_centers,
                       farthest_point_subsample)
from .homology import local_profile

MODES = ("strict", "relaxed", "manual")
KMAX_CAP = 7


class ScheduleError(ValueError):
    pass


def theta1(epsilon: float, rho: float) -> float:
    return ((epsilon + rho) - math.sqrt(epsilon ** 2 + rho ** 2 - 6 * epsilon * rho)) / 2


def alpha_max(epsilon: float, rho: float) -> float:
    return (rho - 13 * epsilon) / 22


@dataclass(frozen=True)
class ParamSchedule:
    """Scales for the local pair: small offset ``alpha``, annulus radii ``eta1 < eta2``, window ``r``.

    ``mode`` selects how much is checked: ``strict`` enforces the full
    sampling-theoretic bounds, ``relaxed`` the looser offset-level bounds
    (with the large offset taken as ``3 * alpha``), ``manual`` only the ordering.
    """

    alpha: float
    eta1: float
    eta2: float
    r: float
    epsilon: float | None = None
    rho: float | None = None
    k_max: int | None = None
    mode: str = "manual"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ScheduleError(f"unknown mode {self.mode!r}")
        if self.k_max is not None and self.k_max < 0:
            raise ScheduleError("k_max must be >= 0")
        if not (0 < self.alpha < self.eta1 < self.eta2 < self.r):
            raise ScheduleError(
                f"need 0 < alpha < eta1 < eta2 < r, got alpha={self.alpha}, eta1={self.eta1}, "
                f"eta2={self.eta2}, r={self.r}")
        if self.mode == "strict":
            check_strict(self.epsilon, self.rho, self.alpha, self.eta1, self.eta2, self.r)
        elif self.mode == "relaxed":
            check_relaxed(self.epsilon, self.alpha, self.eta1, self.eta2, self.r)

    def kmax_for(self, ambient_dim: int) -> int:
        if self.k_max is not None:
            return self.k_max
        return max(0, min(ambient_dim - 1, KMAX_CAP))

    def with_kmax(self, k_max: int | None) -> ParamSchedule:
        return ParamSchedule(self.alpha, self.eta1, self.eta2, self.r, self.epsilon, self.rho, k_max, self.mode)

    def to_dict(self) -> dict:
        return asdict(self)


def check_strict(epsilon, rho, alpha, eta1, eta2, r):
    if epsilon is None or rho is None:
        raise ScheduleError("strict mode needs epsilon and rho")
    if not (epsilon > 0 and rho > 0):
        raise ScheduleError("epsilon and rho must be positive")
    if not epsilon < rho / 58:
        raise ScheduleError(f"sampling too coarse for guarantee: epsilon={epsilon} >= rho/58={rho / 58}")
    lo, hi = theta1(epsilon, rho), alpha_max(epsilon, rho)
    if not lo <= alpha <= hi:
        raise ScheduleError(f"alpha={alpha} outside [{lo}, {hi}]")
    if not eta1 >= 9 * alpha + 4 * epsilon:
        raise ScheduleError("need eta1 >= 9 alpha + 4 epsilon")
    if not eta2 >= eta1 + 12 * alpha + 6 * epsilon:
        raise ScheduleError("need eta2 >= eta1 + 12 alpha + 6 epsilon")
    if not (epsilon < eta1 < rho and epsilon < eta2 < rho):
        raise ScheduleError("need epsilon < eta1, eta2 < rho")
    if not r >= eta1 + eta2:
        raise ScheduleError("need r >= eta1 + eta2")


def check_relaxed(epsilon, alpha, eta1, eta2, r):
    if epsilon is None or epsilon < 0:
        raise ScheduleError("relaxed mode needs epsilon >= 0")
    big = 3 * alpha
    if not eta1 >= big + 4 * epsilon:
        raise ScheduleError("need eta1 >= 3 alpha + 4 epsilon")
    if not eta2 >= eta1 + alpha + big + 6 * epsilon:
        raise ScheduleError("need eta2 >= eta1 + 4 alpha + 6 epsilon")
    if not r > eta2 + 2 * alpha + 6 * epsilon:
        raise ScheduleError("need r > eta2 + 2 alpha + 6 epsilon")


def parameter_schedule(epsilon: float, rho: float, alpha: float | None = None,
                       k_max: int | None = None) -> ParamSchedule:
    """Strict schedule from the sampling bound ``epsilon`` and the reach ``rho``.

    Without ``alpha`` the midpoint of the admissible range is used; the
    annulus radii and window then take their smallest admissible values.
    """
    if not (epsilon > 0 and rho > 0):
        raise ScheduleError("epsilon and rho must be positive")
    if not epsilon < rho / 58:
        raise ScheduleError(f"sampling too coarse for guarantee: epsilon={epsilon} >= rho/58={rho / 58}")
    lo, hi = theta1(epsilon, rho), alpha_max(epsilon, rho)
    if alpha is None:
        alpha = (lo + hi) / 2
    elif not lo <= alpha <= hi:
        raise ScheduleError(f"alpha={alpha} outside [{lo}, {hi}]")
    eta1 = 9 * alpha + 4 * epsilon
    eta2 = eta1 + 12 * alpha + 6 * epsilon
    r = eta1 + eta2
    return ParamSchedule(alpha, eta1, eta2, r, epsilon, rho, k_max, "strict")


def manual_schedule(alpha: float, eta1: float, eta2: float, r: float, k_max: int | None = None) -> ParamSchedule:
    return ParamSchedule(alpha, eta1, eta2, r, k_max=k_max, mode="manual")


def relaxed_schedule(alpha: float, eta1: float, eta2: float, r: float, epsilon: float,
                     k_max: int | None = None) -> ParamSchedule:
    return ParamSchedule(alpha, eta1, eta2, r, epsilon=epsilon, k_max=k_max, mode="relaxed")


class Kind(str, Enum):
    TRIVIAL = "trivial"
    SPHERE = "sphere"
    NON_SPHERE = "non-sphere"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    n: int | None = None
    reason: str | None = None

    @property
    def label(self) -> str:
        if self.kind is Kind.SPHERE:
            return f"sphere-{self.n}"
        return self.kind.value

    @property
    def valid(self) -> bool:
        return self.kind is Kind.SPHERE


def classify(ranks) -> Classification:
    ranks = list(ranks)
    if all(r == 0 for r in ranks):
        return Classification(Kind.TRIVIAL)
    nonzero = [k for k, r in enumerate(ranks) if r != 0]
    if len(nonzero) == 1 and ranks[nonzero[0]] == 1:
        return Classification(Kind.SPHERE, nonzero[0])
    return Classification(Kind.NON_SPHERE)


@dataclass(frozen=True)
class BasePointResult:
    index: int | None
    ranks: tuple[int, ...]
    classification: Classification
    neighbors: int
    millis: float | None = None

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "index": self.index,
            "ranks": list(self.ranks),
            "class": self.classification.label,
            "neighbors": self.neighbors,
            "millis": round(self.millis, 3) if timings and self.millis is not None else None,
        }
        if self.classification.reason:
            out["reason"] = self.classification.reason
        return out


def estimate_local(cloud: PointCloud, p, schedule: ParamSchedule, budget: int | None = DEFAULT_BUDGET,
                   max_vertices: int | None = None) -> BasePointResult:
    """Local homology profile and sphere classification at one base point."""
    t0 = time.perf_counter()
    index = int(p) if isinstance(p, (int, np.integer)) else None
    try:
        pair = build_local_blocks(cloud, p, schedule, budget=budget, max_vertices=max_vertices)
    except BudgetExceeded as exc:
        cls = Classification(Kind.SKIPPED, reason=str(exc))
        return BasePointResult(index, (), cls, 0, (time.perf_counter() - t0) * 1e3)
    ranks = tuple(local_profile(pair))
    return BasePointResult(index, ranks, classify(ranks), pair.neighbors,
                           (time.perf_counter() - t0) * 1e3)


@dataclass(frozen=True)
class Strategy:
    """How base points are chosen: ``sparse``, ``centers``, ``all`` or ``list``."""

    kind: str
    min_dist: float | None = None
    edge_len: float | None = None
    min_size: int | None = None
    indices: tuple[int, ...] | None = None

    @classmethod
    def parse(cls, text: str) -> Strategy:
        kind, _, arg = text.partition(":")
        try:
            if kind == "all" and not arg:
                return cls("all")
            if kind == "sparse":
                return cls("sparse", min_dist=float(arg))
            if kind == "centers":
                edge, _, size = arg.partition(",")
                return cls("centers", edge_len=float(edge), min_size=int(size) if size else 1)
            if kind == "list":
                text = Path(arg).read_text()
                return cls("list", indices=tuple(int(tok) for tok in text.replace(",", " ").split()))
        except (ValueError, OSError) as exc:
            raise ValueError(f"bad base-point strategy {text!r}: {exc}") from exc
        raise ValueError(f"bad base-point strategy {text!r}")

    def select(self, cloud: PointCloud, seed: int = 0) -> list[int]:
        if self.kind == "all":
            idx = range(cloud.n)
        elif self.kind == "sparse":
            idx = farthest_point_subsample(cloud, min_dist=self.min_dist, seed=seed)
        elif self.kind == "centers":
            graph = build_neighborhood_graph(cloud, self.edge_len)
            idx = component_centers(graph, cloud, self.min_size)
        elif self.kind == "list":
            idx = self.indices
            bad = [i for i in idx if not 0 <= i < cloud.n]
            if bad:
                raise ValueError(f"base point indices out of range: {bad[:5]}")
        else:
            raise ValueError(f"unknown strategy {self.kind!r}")
        return sorted(set(int(i) for i in idx))

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        for key in ("min_dist", "edge_len", "min_size"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        if self.indices is not None:
            d["indices"] = list(self.indices)
        return d


@dataclass
class DimensionReport:
    results: list[BasePointResult]
    schedule: ParamSchedule
    strategy: Strategy | None
    n_points: int
    truth: int | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def sphere_tallies(self) -> dict[int, int]:
        c = Counter(r.classification.n for r in self.results if r.classification.valid)
        return dict(sorted(c.items()))

    def count(self, kind: Kind) -> int:
        return sum(1 for r in self.results if r.classification.kind is kind)

    @property
    def valid(self) -> int:
        return self.count(Kind.SPHERE)

    @property
    def ambiguous(self) -> bool:
        t = self.sphere_tallies
        if not t:
            return False
        top = max(t.values())
        return sum(1 for v in t.values() if v == top) > 1

    @property
    def estimated_dimension(self) -> int | None:
        t = self.sphere_tallies
        if not t or self.ambiguous:
            return None
        return max(t, key=t.get)

    @property
    def plurality_share(self) -> float | None:
        t = self.sphere_tallies
        return max(t.values()) / self.valid if t else None

    @property
    def correct(self) -> int | None:
        if self.truth is None:
            return None
        return self.sphere_tallies.get(self.truth, 0)

    @property
    def wrong_dimension(self) -> int | None:
        return None if self.truth is None else self.valid - self.correct

    @property
    def correct_ratio(self) -> float | None:
        if self.truth is None or self.valid == 0:
            return None
        return self.correct / self.valid

    @property
    def avg_neighbors(self) -> float:
        used = [r.neighbors for r in self.results if r.classification.kind is not Kind.SKIPPED]
        return float(np.mean(used)) if used else 0.0

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "schedule": self.schedule.to_dict(),
            "strategy": self.strategy.to_dict() if self.strategy else None,
            "seed": self.seed,
            "sample_points": self.n_points,
            "base_points": len(self.results),
            "per_point": [r.to_dict(timings) for r in self.results],
            "tallies": {
                "trivial": self.count(Kind.TRIVIAL),
                "non_sphere": self.count(Kind.NON_SPHERE),
                "skipped": self.count(Kind.SKIPPED),
                "sphere": {str(n): c for n, c in self.sphere_tallies.items()},
            },
            "avg_neighbors": round(self.avg_neighbors, 6),
            "estimated_dimension": self.estimated_dimension,
            "ambiguous": self.ambiguous,
        }
        if self.truth is not None:
            d["truth"] = self.truth
            d["correct_ratio"] = self.correct_ratio
        d.update(self.extra)
        return d

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """Summary in the layout of the synthetic-results table, one row per sphere dimension."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        total = len(self.results)
        w.writerow(["sample_points", "avg_neighb", "not_n_sphere", "trivial", "skipped",
                    "n", "n_sphere", "correct_ratio"])
        if self.truth is not None and self.valid:
            ratio = f"{100 * self.correct_ratio:.1f}% ({self.correct}/{self.valid})"
        else:
            ratio = ""
        head = [self.n_points, f"{self.avg_neighbors:.1f}", f"{self.count(Kind.NON_SPHERE)}/{total}",
                f"{self.count(Kind.TRIVIAL)}/{total}", f"{self.count(Kind.SKIPPED)}/{total}"]
        tallies = self.sphere_tallies or {None: 0}
        for n, c in tallies.items():
            w.writerow(head + ["" if n is None else n, f"{c}/{total}", ratio])
        return buf.getvalue()


def _estimate_many(args):
    cloud, indices, schedule, budget, max_vertices = args
    return [estimate_local(cloud, i, schedule, budget, max_vertices) for i in indices]


def estimate_dimension(cloud: PointCloud, schedule: ParamSchedule, strategy: Strategy | str = "all",
                       seed: int = 0, budget: int | None = DEFAULT_BUDGET, truth: int | None = None,
                       workers: int = 1, max_vertices: int | None = None,
                       base_points=None) -> DimensionReport:
    """Run the local estimate at every selected base point and aggregate.

    ``base_points`` overrides the strategy's selection. Results are always
    listed in increasing index order, whatever the number of workers.
    """
    if isinstance(strategy, str):
        strategy = Strategy.parse(strategy)
    indices = sorted(set(int(i) for i in base_points)) if base_points is not None else strategy.select(cloud, seed)
    if workers > 1 and len(indices) > 1:
        chunks = [indices[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_estimate_many, [(cloud, c, schedule, budget, max_vertices) for c in chunks])
            results = [r for part in parts for r in part]
        results.sort(key=lambda r: r.index)
    else:
        results = _estimate_many((cloud, indices, schedule, budget, max_vertices))
    return DimensionReport(results, schedule, strategy, cloud.n, truth, seed)


@dataclass
class RepeatedEstimate:
    """Outcome distribution of repeated random-subsample estimates at one center."""

    center: int
    results: list[BasePointResult]

    @property
    def trials(self) -> int:
        return len(self.results)

    @property
    def counts(self) -> dict[int, int]:
        c = Counter(r.classification.n for r in self.results if r.classification.valid)
        return dict(sorted(c.items()))

    @property
    def valid(self) -> int:
        return sum(self.counts.values())

    @property
    def estimated_dimension(self) -> int | None:
        c = self.counts
        if not c:
            return None
        top = max(c.values())
        winners = [n for n, v in c.items() if v == top]
        return winners[0] if len(winners) == 1 else None

    @property
    def percentage(self) -> float | None:
        c = self.counts
        return 100.0 * max(c.values()) / self.valid if c else None

    def to_dict(self) -> dict:
        return {
            "center": self.center,
            "trials": self.trials,
            "valid": self.valid,
            "sphere": {str(n): v for n, v in self.counts.items()},
            "estimated_dimension": self.estimated_dimension,
            "percentage": self.percentage,
        }


def repeated_center_estimate(cloud: PointCloud, schedule: ParamSchedule, center: int, subsample_size: int,
                             trials: int, seed: int = 0, radius: float | None = None,
                             budget: int | None = DEFAULT_BUDGET) -> RepeatedEstimate:
    """Estimate at ``center`` on ``trials`` fresh random subsamples of its neighborhood.

    Each subsample keeps the center and draws ``subsample_size - 1`` other
    points uniformly without replacement from the ball of ``radius``
    (default: the outer window ``r + 3 alpha``).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if subsample_size < 1:
        raise ValueError("subsample_size must be >= 1")
    if radius is None:
        radius = schedule.r + 3 * schedule.alpha
    hood = ball_query(cloud, int(center), radius)
    others = hood[hood != center]
    take = min(subsample_size - 1, len(others))
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(trials):
        pick = np.sort(rng.choice(others, size=take, replace=False)) if take else np.zeros(0, dtype=np.intp)
        idx = np.concatenate([[center], pick]).astype(np.intp)
        sub = cloud.subset(idx)
        res = estimate_local(sub, 0, schedule, budget)
        results.append(BasePointResult(int(center), res.ranks, res.classification, res.neighbors, res.millis))
    return RepeatedEstimate(int(center), results)
