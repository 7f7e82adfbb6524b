"""Synthetic point clouds: sphere caps, translated-image families, noisy parametric maps."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .geometry import PointCloud


def _cap_uniform(rng, n: int, cap_angle: float, size: int) -> np.ndarray:
    """Area-uniform points on the unit n-sphere within ``cap_angle`` of the pole ``e_0``."""
    # polar angle has density proportional to sin^(n-1)
    peak = 1.0 if cap_angle >= math.pi / 2 else math.sin(cap_angle) ** (n - 1)
    phis = []
    need = size
    while need > 0:
        batch = max(2 * need, 64)
        phi = rng.uniform(0.0, cap_angle, batch)
        keep = rng.uniform(0.0, peak, batch) <= np.sin(phi) ** (n - 1)
        phis.append(phi[keep][:need])
        need -= len(phis[-1])
    phi = np.concatenate(phis)
    direction = rng.standard_normal((size, n))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    pts = np.empty((size, n + 1))
    pts[:, 0] = np.cos(phi)
    pts[:, 1:] = np.sin(phi)[:, None] * direction
    return pts


def sphere_cap(n: int, cap_angle: float, target_epsilon: float, seed: int = 0,
               batch: int = 50000, quiet_batches: int = 10, margin: float = 0.01) -> PointCloud:
    """Uniform ``target_epsilon``-cover of a spherical cap of the unit n-sphere in R^(n+1).

    Random area-uniform probes are added greedily whenever they lie farther
    than ``(1 - margin) * target_epsilon`` from every point kept so far.
    Generation stops after ``quiet_batches`` consecutive probe batches add
    nothing, so the final probes certify the covering radius.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < cap_angle <= math.pi:
        raise ValueError("cap_angle must be in (0, pi]")
    if target_epsilon <= 0:
        raise ValueError("target_epsilon must be positive")
    rng = np.random.default_rng(seed)
    gap = (1 - margin) * target_epsilon
    kept = _cap_uniform(rng, n, cap_angle, 1)
    tree = cKDTree(kept)
    quiet = 0
    while quiet < quiet_batches:
        probes = _cap_uniform(rng, n, cap_angle, batch)
        d, _ = tree.query(probes, k=1)
        cand = probes[d > gap]
        added = np.empty_like(cand)
        m = 0
        for q in cand:
            if m and np.min(np.linalg.norm(added[:m] - q, axis=1)) <= gap:
                continue
            added[m] = q
            m += 1
        if m:
            kept = np.vstack([kept, added[:m]])
            tree = cKDTree(kept)
            quiet = 0
        else:
            quiet += 1
    kept /= np.linalg.norm(kept, axis=1, keepdims=True)
    return PointCloud(kept)


def covering_radius(cloud: PointCloud, probes: np.ndarray) -> float:
    """Largest distance from a probe to its nearest sample point."""
    d, _ = cKDTree(cloud.points).query(np.asarray(probes, dtype=np.float64), k=1)
    return float(np.max(d)) if len(d) else 0.0


def cap_probes(n: int, cap_angle: float, count: int, seed: int = 1) -> np.ndarray:
    return _cap_uniform(np.random.default_rng(seed), n, cap_angle, count)


def shift_images(image_w: int = 60, image_h: int = 84, patch_w: int = 21, patch_h: int = 29,
                 stride: int = 1, intensity: float = 1.0) -> PointCloud:
    """Every translate of a constant patch inside a black ``image_w x image_h`` image.

    Rows are the flattened (row-major, ``image_h`` rows of ``image_w`` pixels)
    images, ordered by vertical offset then horizontal offset.
    """
    if not (0 < patch_w <= image_w and 0 < patch_h <= image_h):
        raise ValueError("patch does not fit inside the image")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    xs = range(0, image_w - patch_w + 1, stride)
    ys = range(0, image_h - patch_h + 1, stride)
    out = np.zeros((len(xs) * len(ys), image_h, image_w))
    k = 0
    for y in ys:
        for x in xs:
            out[k, y:y + patch_h, x:x + patch_w] = intensity
            k += 1
    return PointCloud(out.reshape(k, image_h * image_w))


def shift_offsets(image_w: int = 60, image_h: int = 84, patch_w: int = 21, patch_h: int = 29,
                  stride: int = 1) -> np.ndarray:
    """``(x, y)`` offset of each row of :func:`shift_images`."""
    xs = np.arange(0, image_w - patch_w + 1, stride)
    ys = np.arange(0, image_h - patch_h + 1, stride)
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return np.c_[xx.ravel(), yy.ravel()]


def parametric_noisy(fmap: Callable[[np.ndarray], np.ndarray], grid, hausdorff_noise: float = 0.0,
                     seed: int = 0) -> PointCloud:
    """Image of a parameter grid under ``fmap`` with bounded uniform noise.

    ``grid`` is a sequence of 1-d arrays, one per parameter; their Cartesian
    product is mapped row-wise by ``fmap`` (``(k, m) -> (k, d)``). Each image
    point is moved by a vector drawn uniformly from the ball of radius
    ``hausdorff_noise``.
    """
    if hausdorff_noise < 0:
        raise ValueError("hausdorff_noise must be >= 0")
    axes = [np.asarray(g, dtype=np.float64) for g in grid]
    params = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    pts = np.asarray(fmap(params), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] != params.shape[0]:
        raise ValueError("map must return one row per parameter vector")
    if hausdorff_noise > 0:
        rng = np.random.default_rng(seed)
        k, d = pts.shape
        direction = rng.standard_normal((k, d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = hausdorff_noise * rng.uniform(0.0, 1.0, k) ** (1.0 / d)
        pts = pts + direction * radius[:, None]
    return PointCloud(pts)


def flat_torus(params: np.ndarray) -> np.ndarray:
    u, v = params[:, 0], params[:, 1]
    return np.c_[np.cos(u), np.sin(u), np.cos(v), np.sin(v)] / math.sqrt(2)


def torus_grid(density: int) -> list[np.ndarray]:
    t = np.linspace(0, 2 * math.pi, density, endpoint=False)
    return [t, t]


def circle(count: int, radius: float = 1.0) -> PointCloud:
    """``count`` equally spaced points on a circle, starting on the positive x-axis."""
    th = np.linspace(0, 2 * math.pi, count, endpoint=False)
    return PointCloud(radius * np.c_[np.cos(th), np.sin(th)])


GENERATORS = ("sphere-cap", "shift", "torus", "circle")
