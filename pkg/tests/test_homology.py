import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localhom.complexes import facets, pair_from_simplices
from localhom.datagen import circle
from localhom.complexes import build_local_pair
from localhom.homology import (BoundaryMatrixZ2, assemble_boundary, boundary_of_order, cone_oracle_rank,
                               image_rank, reduce, relative_betti)
from localhom.oracles import (OracleTooLarge, dense_betti, dense_image_rank, dense_rank_oracle, gf2_nullspace,
                              gf2_rank, relative_boundary)
from localhom.pipeline import manual_schedule
from localhom.verify import check_instance, random_instance

TRIANGLE = [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]
HOLLOW = TRIANGLE[:-1]


def test_empty_matrix():
    red = reduce(BoundaryMatrixZ2([], []))
    assert red.pairs() == []


def test_filled_triangle_pairs():
    red = reduce(boundary_of_order(TRIANGLE))
    # (v2, e12), (v3, e13), (e23, t); v1 unpaired
    assert red.pairs() == [(1, 3), (2, 4), (5, 6)]
    assert red.is_zero(5)


def test_hollow_triangle_pairs():
    red = reduce(boundary_of_order(HOLLOW))
    assert red.pairs() == [(1, 3), (2, 4)]
    assert red.is_zero(5) and 5 not in red.pivots


def test_reduce_rejects_bad_rows():
    with pytest.raises(ValueError):
        reduce(BoundaryMatrixZ2([(0,), (1,)], [[], [1]]))
    with pytest.raises(ValueError):
        reduce(BoundaryMatrixZ2([(0,), (0, 1), (1, 2)], [[], [0], [0, 1]]))


def test_lows_distinct_and_rows_precede(rng):
    for _ in range(30):
        pair = random_instance(rng).pair()
        red = reduce(assemble_boundary(pair))
        lows = [l for l in red.lows if l >= 0]
        assert len(lows) == len(set(lows))
        for j, col in enumerate(red.columns):
            assert all(r < j for r in col)


def test_identity_quotient_all_zero():
    pair = pair_from_simplices(TRIANGLE, TRIANGLE, TRIANGLE, TRIANGLE)
    assert image_rank(pair) == [0, 0, 0]
    assert cone_oracle_rank(pair) == [0, 0, 0]


def test_hollow_triangle_absolute():
    pair = pair_from_simplices(HOLLOW, [], HOLLOW, [])
    assert image_rank(pair) == [1, 1]
    assert cone_oracle_rank(pair) == [1, 1]


def test_block4_edge_with_b1_endpoint_has_single_row():
    # A1 = edge 01, B1 = vertex 1
    pair = pair_from_simplices([(0, 1)], [(1,)], [(0, 1)], [(1,)])
    m = assemble_boundary(pair)
    j = m.simplices.index((0, 1))
    assert len(m.columns[j]) == 1


def test_circle_twelve_points():
    pair = build_local_pair(circle(12), 0, manual_schedule(0.26, 1.3, 1.5, 1.9, k_max=1))
    assert image_rank(pair) == [0, 1]
    assert cone_oracle_rank(pair) == [0, 1]


def test_assembled_columns_match_facet_enumeration(rng):
    for _ in range(20):
        pair = random_instance(rng).pair()
        m = assemble_boundary(pair)
        start = pair.suffix_start()
        pos = {s: i for i, s in enumerate(pair.order)}
        for s, col in zip(m.simplices, m.columns):
            expect = sorted(pos[f] - start for f in facets(s) if pos[f] >= start)
            assert col == expect


def test_dense_oracle_examples():
    assert dense_betti(TRIANGLE, [], 2) == [1, 0, 0]
    assert dense_rank_oracle(HOLLOW, [(1,)], 1) == 1
    assert dense_rank_oracle(HOLLOW, [(1,)], 0) == 0


def test_dense_oracle_guard():
    with pytest.raises(OracleTooLarge):
        dense_rank_oracle(TRIANGLE, [], 0, max_simplices=3)


def test_gf2_helpers(rng):
    for _ in range(50):
        m = rng.integers(0, 2, size=(rng.integers(1, 8), rng.integers(1, 8)))
        ns = gf2_nullspace(m)
        assert gf2_rank(m) + len(ns) == m.shape[1]
        assert not ((m @ ns.T) % 2).any()


def _sub(pair, lo_block, hi_block):
    """Boundary matrix of blocks lo..hi with rows from earlier blocks dropped."""
    lo = pair.block_bounds[lo_block][0]
    hi = pair.block_bounds[hi_block][1]
    simp = pair.order[lo:hi]
    pos = {s: i for i, s in enumerate(simp)}
    n = len(simp)
    mat = np.zeros((n, n), dtype=np.int64)
    for j, s in enumerate(simp):
        for f in facets(s):
            if f in pos:
                mat[pos[f], j] = 1
    return mat


@settings(max_examples=100)
@given(st.integers(0, 2 ** 31 - 1))
def test_boundary_squares_to_zero_on_quotients(seed):
    pair = random_instance(np.random.default_rng(seed)).pair()
    for lo, hi in ((3, 4), (4, 5)):  # A1/B1 and A2/B2
        d = _sub(pair, lo, hi)
        assert not ((d @ d) % 2).any()
    for k in range(3):
        A, B = pair.A2.simplices, pair.B2.simplices
        dk, _, _ = relative_boundary(A, B, k)
        dk1, _, _ = relative_boundary(A, B, k + 1)
        if dk.size and dk1.size:
            assert not ((dk.astype(int) @ dk1.astype(int)) % 2).any()


@settings(max_examples=100)
@given(st.integers(0, 2 ** 31 - 1))
def test_three_routes_agree(seed):
    res = check_instance(random_instance(np.random.default_rng(seed)))
    assert res.image == res.cone == res.pruned
    if res.dense_image is not None:
        assert res.image == res.dense_image
        assert res.betti == res.dense_betti


@settings(max_examples=100)
@given(st.integers(0, 2 ** 31 - 1))
def test_reorder_within_blocks_keeps_ranks(seed):
    r = np.random.default_rng(seed)
    pair = random_instance(r).pair()
    base = image_rank(pair)
    shuffled = pair.reordered(r)
    assert image_rank(shuffled) == base
    assert relative_betti(shuffled) == relative_betti(pair)


def test_relative_betti_matches_dense_on_circle():
    pair = build_local_pair(circle(12), 0, manual_schedule(0.26, 1.3, 1.5, 1.9, k_max=1))
    assert relative_betti(pair) == dense_betti(pair.A1.simplices, pair.B1.simplices, 1)


def test_dense_image_rank_on_circle():
    pair = build_local_pair(circle(12), 0, manual_schedule(0.26, 1.3, 1.5, 1.9, k_max=1))
    A = [X.simplices for X in (pair.A1, pair.B1, pair.A2, pair.B2)]
    assert [dense_image_rank(*A, k=k) for k in range(2)] == [0, 1]


def test_cone_needs_full_pair():
    from localhom.complexes import build_local_blocks
    pair = build_local_blocks(circle(12), 0, manual_schedule(0.26, 1.3, 1.5, 1.9, k_max=1))
    with pytest.raises(ValueError):
        cone_oracle_rank(pair)


def lattice_disk(radius):
    """Triangular lattice with unit spacing inside a disk, sorted by distance to the origin."""
    ij = [(i, j) for i in range(-30, 31) for j in range(-30, 31)]
    pts = np.array([(i + 0.5 * j, j * np.sqrt(3) / 2) for i, j in ij])
    pts = pts[np.hypot(pts[:, 0], pts[:, 1]) <= radius]
    return pts[np.argsort(np.hypot(pts[:, 0], pts[:, 1]), kind="stable")]


def test_disk_center_sees_dimension_two():
    from localhom.complexes import build_local_blocks
    from localhom.geometry import PointCloud
    cloud = PointCloud(lattice_disk(6.5))
    s = manual_schedule(0.55, 3.5, 4.2, 4.6, k_max=2)
    pair = build_local_pair(cloud, 0, s)
    assert image_rank(pair) == [0, 0, 1]
    assert cone_oracle_rank(pair) == [0, 0, 1]
    assert image_rank(build_local_blocks(cloud, 0, s)) == [0, 0, 1]
    assert relative_betti(pair) == [0, 0, 1]
