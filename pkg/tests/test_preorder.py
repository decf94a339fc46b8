"""Pre-ordering: binary decisions, group indices, buckets, rating init."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import confident_levels
from pairsort.errors import InputError
from pairsort.preorder import (
    MAX_DEPTH,
    EloInitConfig,
    ItemRecord,
    LevelSimilarity,
    bucket_of,
    classify_level,
    group_index,
    init_rating,
    item_confidence,
    run_preorder,
)
from pairsort.rng import Xoshiro256StarStar

# frozen from 50-digit arithmetic: e^{0.30/0.1} / (e^{0.30/0.1} + e^{0.20/0.1})
SOFTMAX_30_20_T01 = 0.7310585786300049


class FixedNoise:
    """Stands in for the session RNG to force a specific noise draw."""

    def __init__(self, value: float):
        self.value = value

    def uniform(self, lo: float, hi: float) -> float:
        assert lo <= self.value <= hi or (lo == hi == self.value)
        return self.value


# -- classify_level ---------------------------------------------------------


def test_classify_prefers_larger_score():
    decision, conf = classify_level((0.30, 0.20), 0.1)
    assert decision == 0
    assert math.isclose(conf, SOFTMAX_30_20_T01, rel_tol=1e-13)


def test_classify_mirror_flips_decision_keeps_confidence():
    decision, conf = classify_level((0.20, 0.30), 0.1)
    assert decision == 1
    assert math.isclose(conf, SOFTMAX_30_20_T01, rel_tol=1e-13)


def test_classify_tie_resolves_to_zero_at_half_confidence():
    assert classify_level((0.5, 0.5), 0.1) == (0, 0.5)


def test_classify_shift_invariance():
    _, base = classify_level((0.30, 0.20), 0.1)
    _, shifted = classify_level((10.30, 10.20), 0.1)
    assert math.isclose(base, shifted, rel_tol=1e-12)


def test_classify_huge_gap_does_not_overflow():
    decision, conf = classify_level((500.0, -500.0), 0.1)
    assert decision == 0
    assert conf == 1.0


def test_classify_rejects_nonfinite_scores():
    with pytest.raises(InputError):
        classify_level((float("nan"), 0.0), 0.1)
    with pytest.raises(InputError):
        classify_level((0.0, float("inf")), 0.1)


def test_classify_rejects_nonpositive_tau():
    with pytest.raises(InputError):
        classify_level((0.1, 0.2), 0.0)
    with pytest.raises(InputError):
        classify_level((0.1, 0.2), -0.1)


@given(
    st.floats(-1, 1, allow_nan=False),
    st.floats(-1, 1, allow_nan=False),
    st.floats(0.01, 5.0),
)
def test_classify_swap_symmetry(a, b, tau):
    d_ab, c_ab = classify_level((a, b), tau)
    d_ba, c_ba = classify_level((b, a), tau)
    assert c_ab == c_ba  # bitwise: computed from (min, max) either way
    assert 0.5 <= c_ab <= 1.0
    if a != b:
        assert d_ab != d_ba


# -- group_index --------------------------------------------------------------


def test_group_index_examples():
    assert group_index([0, 0, 0]) == 0
    assert group_index([1, 0, 1]) == 5
    assert group_index([1, 1, 1]) == 7


def test_group_index_is_little_endian():
    assert group_index([1]) == 1
    assert group_index([0, 1]) == 2
    assert group_index([0, 0, 1]) == 4


def test_group_index_rejects_empty_and_too_deep():
    with pytest.raises(InputError):
        group_index([])
    with pytest.raises(InputError):
        group_index([0] * (MAX_DEPTH + 1))


def test_group_index_rejects_nonbinary():
    with pytest.raises(InputError):
        group_index([0, 2, 1])


@given(st.lists(st.integers(0, 1), min_size=1, max_size=MAX_DEPTH))
def test_group_index_matches_binary_expansion(bits):
    expected = sum(bit << pos for pos, bit in enumerate(bits))
    assert group_index(bits) == expected
    assert 0 <= expected < (1 << len(bits))


# -- bucket_of ----------------------------------------------------------------


def test_bucket_examples():
    assert bucket_of(0, 3, 5) == 0
    assert bucket_of(7, 3, 5) == 4
    assert bucket_of(4, 3, 3) == 1


def test_bucket_monotone_and_surjective():
    for d, k in [(3, 5), (4, 5), (4, 3), (5, 2), (3, 1), (4, 16)]:
        buckets = [bucket_of(g, d, k) for g in range(1 << d)]
        assert buckets == sorted(buckets)
        if (1 << d) >= k:
            assert set(buckets) == set(range(k))


def test_bucket_rejects_out_of_range():
    with pytest.raises(InputError):
        bucket_of(8, 3, 5)
    with pytest.raises(InputError):
        bucket_of(-1, 3, 5)
    with pytest.raises(InputError):
        bucket_of(0, 0, 5)
    with pytest.raises(InputError):
        bucket_of(0, 3, 0)


# -- item_confidence ----------------------------------------------------------


def test_item_confidence_is_mean():
    assert item_confidence([0.9, 0.7]) == pytest.approx(0.8)
    assert item_confidence([0.5]) == 0.5
    assert item_confidence([1.0, 1.0, 1.0]) == 1.0


def test_item_confidence_rejects_empty():
    with pytest.raises(InputError):
        item_confidence([])


# -- init_rating ---------------------------------------------------------------


def test_init_rating_forced_noise_examples():
    cfg = EloInitConfig()
    assert init_rating(2, 1.0, cfg, FixedNoise(75.0)) == 1500 + 75.0 * 0.5
    assert init_rating(0, 0.5, cfg, FixedNoise(0.0)) == 1200.0


def test_init_rating_base_ladder():
    cfg = EloInitConfig()
    bases = [init_rating(b, 1.0, cfg, FixedNoise(0.0)) for b in range(5)]
    assert bases == [1200.0, 1350.0, 1500.0, 1650.0, 1800.0]


def test_init_rating_single_bucket_sits_at_midpoint():
    cfg = EloInitConfig(bucket_count=1)
    assert init_rating(0, 1.0, cfg, FixedNoise(0.0)) == 1500.0


def test_init_rating_interval_for_confident_item():
    cfg = EloInitConfig()
    rng = Xoshiro256StarStar(7)
    for _ in range(500):
        r = init_rating(4, 1.0, cfg, rng)
        assert 1762.5 <= r <= 1837.5


def test_init_rating_noise_bounds_by_confidence():
    cfg = EloInitConfig()
    rng = Xoshiro256StarStar(11)
    for _ in range(500):
        assert abs(init_rating(2, 0.5, cfg, rng) - 1500.0) <= 75.0
        # conf below 0.5 widens the spread, but never past 1.5x the halfwidth
        assert abs(init_rating(2, 0.01, cfg, rng) - 1500.0) <= 1.5 * 75.0


def test_init_rating_rejects_bad_inputs():
    cfg = EloInitConfig()
    rng = Xoshiro256StarStar(0)
    with pytest.raises(InputError):
        init_rating(5, 1.0, cfg, rng)
    with pytest.raises(InputError):
        init_rating(-1, 1.0, cfg, rng)
    with pytest.raises(InputError):
        init_rating(0, 0.0, cfg, rng)
    with pytest.raises(InputError):
        init_rating(0, 1.2, cfg, rng)


def test_config_validation():
    with pytest.raises(InputError):
        EloInitConfig(bucket_count=0).validate()
    with pytest.raises(InputError):
        EloInitConfig(rating_base_min=1800, rating_base_max=1200).validate()
    with pytest.raises(InputError):
        EloInitConfig(noise_halfwidth=-1).validate()
    EloInitConfig(bucket_count=1, rating_base_min=1500, rating_base_max=1500).validate()


# -- run_preorder ---------------------------------------------------------------


def test_run_preorder_composition_example():
    items = [ItemRecord(id="x", display_ref="x.png")]
    sims = {"x": confident_levels([1, 1, 1])}
    cfg = EloInitConfig(noise_halfwidth=0.0)
    (result,) = run_preorder(items, sims, cfg)
    assert result.group_index == 7
    assert result.bucket == 4
    assert result.confidence == 1.0
    assert result.rating == 1800.0
    assert result.depth == 3
    assert result.decisions == [1, 1, 1]


def test_run_preorder_empty_input_gives_empty_result():
    assert run_preorder([], {}, EloInitConfig()) == []


def test_run_preorder_is_deterministic_and_order_stable():
    items = [ItemRecord(id=f"i{k}") for k in range(6)]
    sims = {it.id: confident_levels([k & 1, (k >> 1) & 1]) for k, it in enumerate(items)}
    cfg = EloInitConfig(rng_seed=42)
    first = run_preorder(list(items), sims, cfg)
    again = run_preorder(list(items), sims, cfg)
    shuffled = run_preorder(list(reversed(items)), sims, cfg)
    by_id = lambda rows: {r.item_id: r.rating for r in rows}
    assert by_id(first) == by_id(again)
    assert by_id(first) == by_id(shuffled)


def test_run_preorder_seed_changes_ratings_not_structure():
    items = [ItemRecord(id="a"), ItemRecord(id="b")]
    sims = {
        "a": [LevelSimilarity(1, (0.30, 0.20)), LevelSimilarity(2, (0.10, 0.40))],
        "b": [LevelSimilarity(1, (0.30, 0.20)), LevelSimilarity(2, (0.10, 0.40))],
    }
    one = run_preorder(items, sims, EloInitConfig(rng_seed=1))
    two = run_preorder(items, sims, EloInitConfig(rng_seed=2))
    assert [r.group_index for r in one] == [r.group_index for r in two]
    assert [r.bucket for r in one] == [r.bucket for r in two]
    assert [r.rating for r in one] != [r.rating for r in two]
    # identical scores give identical structure, independent noise draws
    assert one[0].group_index == one[1].group_index
    assert one[0].rating != one[1].rating


def test_run_preorder_missing_similarity_names_the_id():
    items = [ItemRecord(id="a"), ItemRecord(id="b")]
    sims = {"a": confident_levels([0])}
    with pytest.raises(InputError, match="b"):
        run_preorder(items, sims, EloInitConfig())


def test_run_preorder_rejects_duplicate_ids():
    items = [ItemRecord(id="a"), ItemRecord(id="a")]
    sims = {"a": confident_levels([0])}
    with pytest.raises(InputError, match="duplicate"):
        run_preorder(items, sims, EloInitConfig())


def test_run_preorder_rejects_empty_level_list():
    items = [ItemRecord(id="a")]
    with pytest.raises(InputError, match="empty"):
        run_preorder(items, {"a": []}, EloInitConfig())


def test_run_preorder_rejects_depth_mismatch():
    items = [ItemRecord(id="a", depth=3)]
    sims = {"a": confident_levels([1, 0])}
    with pytest.raises(InputError, match="depth"):
        run_preorder(items, sims, EloInitConfig())


def test_run_preorder_supports_adaptive_depth():
    items = [ItemRecord(id="shallow"), ItemRecord(id="deep")]
    sims = {
        "shallow": confident_levels([1]),
        "deep": confident_levels([1, 1, 1, 1]),
    }
    rows = {r.item_id: r for r in run_preorder(items, sims, EloInitConfig())}
    assert rows["shallow"].depth == 1
    assert rows["deep"].depth == 4
    # one decision splits 5 buckets as floor(g*5/2): groups 0 and 1 land at 0 and 2
    assert rows["shallow"].bucket == 2
    # four confident wins fill the path: g=15, floor(15*5/16) = 4
    assert rows["deep"].bucket == 4


def test_run_preorder_rating_stays_within_noise_band():
    items = [ItemRecord(id=f"i{k}") for k in range(40)]
    sims = {it.id: [LevelSimilarity(1, (0.30, 0.20)), LevelSimilarity(2, (0.25, 0.26))] for it in items}
    cfg = EloInitConfig(rng_seed=5)
    for row in run_preorder(items, sims, cfg):
        base = cfg.base_rating(row.bucket)
        assert abs(row.rating - base) <= cfg.noise_halfwidth
