import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumaspect.corpus import Document
from sumaspect.embedding import EmbeddingMatrix, encode_fallback
from sumaspect.errors import ValidationError
from sumaspect.geometry import pearson, polygon_area, quickhull
from sumaspect.aspects import (
    Selection,
    convexfall_removal_order,
    read_selections,
    select_convexfall,
    select_heuristic_volume,
    select_k_nearest,
    select_n_nearest,
    select_position,
    write_selections,
)


def make_doc(n, k=1, doc_id="d"):
    return Document(
        doc_id,
        tuple(f"src sentence {i}." for i in range(n)),
        tuple(f"tgt sentence {i}." for i in range(k)),
    )


def emb_from(rows, doc_id="d", k_tgt=1):
    # float64 keeps hand-built geometry exact
    rows = np.asarray(rows, dtype=np.float64)
    return EmbeddingMatrix(doc_id, rows, np.zeros((k_tgt, rows.shape[1])))


class TestPosition:
    def test_first(self):
        assert select_position(make_doc(5), 2, "first").indices == (0, 1)

    def test_last(self):
        assert select_position(make_doc(5), 2, "last").indices == (3, 4)

    def test_middle_start_formula(self):
        assert select_position(make_doc(5), 2, "middle").indices == (1, 2)

    def test_k_at_least_n(self):
        for mode in ("first", "last", "middle"):
            assert select_position(make_doc(3), 7, mode).indices == (0, 1, 2)

    @given(n=st.integers(1, 20), k=st.integers(1, 25))
    @settings(max_examples=60)
    def test_first_of_reversed_mirrors_last(self, n, k):
        doc = make_doc(n)
        first = select_position(doc, k, "first").indices
        last = select_position(doc, k, "last").indices
        assert sorted(n - 1 - i for i in first) == list(last)

    @given(n=st.integers(1, 20), k=st.integers(1, 25))
    @settings(max_examples=60)
    def test_selection_size(self, n, k):
        for mode in ("first", "last", "middle"):
            sel = select_position(make_doc(n), k, mode)
            assert len(sel.indices) == min(k, n)
            assert len(set(sel.indices)) == len(sel.indices)


class TestHeuristicVolume:
    def test_identical_rows_tie_break(self):
        emb = emb_from(np.ones((5, 4)))
        assert select_heuristic_volume(emb, 3).indices == (0, 1, 2)

    def test_square_corners_picks_opposite(self):
        # centroid sits at the interior point; all corners tie, so the seed
        # is corner 0 and the farthest point from it is the opposite corner
        pts = [(1, 1), (1, -1), (-1, 1), (-1, -1), (0, 0)]
        emb = emb_from(pts)
        sel = select_heuristic_volume(emb, 2)
        assert sel.indices == (0, 3)

    def test_k_at_least_n(self):
        emb = emb_from(np.arange(8).reshape(4, 2))
        assert select_heuristic_volume(emb, 9).indices == (0, 1, 2, 3)


class TestConvexFall:
    def test_all_when_k_equals_n(self):
        rng = np.random.default_rng(0)
        emb = emb_from(rng.normal(size=(6, 4)))
        assert select_convexfall(emb, 6).indices == tuple(range(6))

    def test_interior_point_never_selected_at_hull_size(self):
        pts = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)]
        emb = emb_from(pts)
        assert select_convexfall(emb, 4).indices == (0, 1, 2, 3)

    def test_regular_pentagon_tie_breaks_to_lowest(self):
        angles = 2 * np.pi * np.arange(5) / 5
        pts = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        emb = emb_from(pts)
        # all removal ratios are equal by symmetry
        hull = quickhull(pts)
        areas = []
        for drop in range(5):
            rest = [i for i in range(5) if i != drop]
            areas.append(polygon_area(quickhull(pts[rest])))
        assert max(areas) - min(areas) < 1e-9
        assert select_convexfall(emb, 4).indices == (1, 2, 3, 4)

    def test_padding_prefers_near_centroid(self):
        # hull is the square; index 4 is nearer the centroid than index 5
        pts = [(0, 0), (4, 0), (4, 4), (0, 4), (2.0, 2.1), (0.5, 0.5)]
        emb = emb_from(pts)
        sel = select_convexfall(emb, 5)
        assert sel.indices == (0, 1, 2, 3, 4)

    def test_prune_areas_non_increasing(self):
        rng = np.random.default_rng(3)
        rows = rng.normal(size=(12, 6))
        emb = emb_from(rows)
        from sumaspect.geometry import pca2d

        projected = pca2d(np.asarray(rows)).projected
        remaining, removed = convexfall_removal_order(emb, stop_len=1)
        working = list(range(12))
        last_area = polygon_area(quickhull(projected[working]))
        for gone in removed:
            working.remove(gone)
            area = polygon_area(quickhull(projected[working]))
            assert area <= last_area + 1e-9
            last_area = area
        assert working == remaining

    def test_removal_order_is_full_permutation(self):
        rng = np.random.default_rng(4)
        emb = emb_from(rng.normal(size=(9, 5)))
        remaining, removed = convexfall_removal_order(emb, stop_len=1)
        assert sorted(remaining + removed) == list(range(9))
        assert len(remaining) == 1


class TestNNearest:
    def test_identical_rows_tie_break(self):
        emb = emb_from(np.tile([0.5, 0.5, 0.5], (4, 1)))  # constant rows: degenerate
        assert select_n_nearest(emb, 2).indices == (0, 1)

    def test_three_vector_hand_case(self):
        emb = emb_from([(1, 2, 3), (1, 2, 3), (3, 2, 1)])
        scores = [
            (pearson([1, 2, 3], [1, 2, 3]) + pearson([1, 2, 3], [3, 2, 1])) / 2,
            (pearson([1, 2, 3], [1, 2, 3]) + pearson([1, 2, 3], [3, 2, 1])) / 2,
            (pearson([3, 2, 1], [1, 2, 3]) + pearson([3, 2, 1], [1, 2, 3])) / 2,
        ]
        assert scores == [0.0, 0.0, -1.0]
        assert select_n_nearest(emb, 1).indices == (0,)

    def test_k_at_least_n(self):
        emb = emb_from(np.random.default_rng(1).normal(size=(3, 4)))
        assert select_n_nearest(emb, 5).indices == (0, 1, 2)

    def test_single_sentence(self):
        emb = emb_from([[1.0, 2.0]])
        assert select_n_nearest(emb, 3).indices == (0,)


def brute_k_nearest(rows, k, K):
    """Direct replay of the round-based nearest-neighbour procedure."""
    rows = np.asarray(rows, dtype=np.float64)
    n = len(rows)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                dist[i][j] = 1.0 - pearson(rows[i], rows[j])
    pool = list(range(n))
    picked = []
    for _ in range(min(k, n)):
        scored = []
        for cand in pool:
            mates = sorted((m for m in pool if m != cand), key=lambda m: (dist[cand][m], m))
            mates = mates[: min(K, len(pool) - 1)]
            avg = sum(dist[cand][m] for m in mates) / len(mates) if mates else 0.0
            scored.append((avg, cand))
        scored.sort()
        picked.append(scored[0][1])
        pool.remove(scored[0][1])
    return tuple(sorted(picked))


class TestKNearest:
    def test_identical_rows_tie_break(self):
        emb = emb_from(np.zeros((5, 3)))
        assert select_k_nearest(emb, 2, 3).indices == (0, 1)

    def test_last_pool_member_selected(self):
        emb = emb_from(np.random.default_rng(2).normal(size=(3, 4)))
        assert select_k_nearest(emb, 3, 2).indices == (0, 1, 2)

    def test_two_rounds_vs_bruteforce(self):
        rows = [(1.0, 0.0, 0.2), (0.9, 0.1, 0.3), (0.0, 1.0, -0.5), (0.2, 0.8, -0.1)]
        emb = emb_from(rows)
        assert select_k_nearest(emb, 2, 2).indices == brute_k_nearest(rows, 2, 2)

    @given(seed=st.integers(0, 10_000), k=st.integers(1, 6), K=st.integers(1, 6))
    @settings(max_examples=40)
    def test_matches_bruteforce_replay(self, seed, k, K):
        rng = np.random.default_rng(seed)
        rows = rng.normal(size=(int(rng.integers(2, 8)), 4))
        emb = emb_from(rows)
        assert select_k_nearest(emb, k, K).indices == brute_k_nearest(rows, k, K)


embrows = st.integers(0, 10_000).map(
    lambda seed: np.random.default_rng(seed).normal(size=(np.random.default_rng(seed).integers(1, 10), 5))
)


@given(seed=st.integers(0, 10_000), k=st.integers(1, 8))
@settings(max_examples=30, deadline=None)
def test_scaling_invariance_and_determinism(seed, k):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(int(rng.integers(2, 9)), 6))
    emb = emb_from(rows)
    scaled = emb_from(rows * 3.7)
    for select in (
        select_heuristic_volume,
        select_convexfall,
        select_n_nearest,
        lambda e, kk: select_k_nearest(e, kk, 3),
    ):
        base = select(emb, k)
        assert base.indices == select(emb, k).indices  # repeatable
        assert base.indices == select(scaled, k).indices
        assert len(base.indices) == min(k, rows.shape[0])


def test_selection_validation():
    with pytest.raises(ValidationError):
        Selection("d", "first", ())
    with pytest.raises(ValidationError):
        Selection("d", "first", (2, 1))
    with pytest.raises(ValidationError):
        Selection("d", "first", (1, 1))
    with pytest.raises(ValidationError):
        Selection("d", "first", (-1, 0))


def test_selection_jsonl_roundtrip(tmp_path):
    sels = [Selection("d1", "first", (0, 1)), Selection("d2", "mmr", (2, 5))]
    path = tmp_path / "sel.jsonl"
    write_selections(sels, path)
    assert read_selections(path) == sels
