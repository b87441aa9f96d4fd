import itertools

import numpy as np
import pytest

from adasample.space import (
    BucketPartition,
    CategoricalAxis,
    ContinuousAxis,
    ParameterSpace,
    axis_from_descriptor,
)

ROT_EDGES = (-15.0, -7.5, 0.0, 7.5, 15.0)


def make_partition(*axes):
    return BucketPartition(ParameterSpace(tuple(axes)))


class TestAxisValidation:
    def test_categorical_needs_positive_count(self):
        with pytest.raises(ValueError):
            CategoricalAxis(0)

    def test_continuous_needs_lo_below_hi(self):
        with pytest.raises(ValueError):
            ContinuousAxis(1.0, 1.0, (1.0, 1.0))

    def test_edges_must_match_bounds(self):
        with pytest.raises(ValueError):
            ContinuousAxis(0.0, 1.0, (0.1, 1.0))
        with pytest.raises(ValueError):
            ContinuousAxis(0.0, 1.0, (0.0, 0.9))

    def test_edges_strictly_increasing(self):
        with pytest.raises(ValueError):
            ContinuousAxis(0.0, 1.0, (0.0, 0.5, 0.5, 1.0))

    def test_space_needs_axes(self):
        with pytest.raises(ValueError):
            ParameterSpace(())


class TestBucketOf:
    def test_identity_partition_on_single_categorical_axis(self):
        part = make_partition(CategoricalAxis(10))
        assert part.bucket_of((3,)) == 3

    def test_row_major_flattening_matches_brute_force_enumeration(self):
        # enumerate the bijection independently and check one-to-one
        part = make_partition(CategoricalAxis(10, "class"), CategoricalAxis(16, "bin"))
        seen = {}
        for c, b in itertools.product(range(10), range(16)):
            k = part.bucket_of((c, b))
            assert k not in seen
            seen[k] = (c, b)
            assert part.bins_of(k) == (c, b)
        assert sorted(seen) == list(range(160))
        assert part.bucket_of((7, 4)) == 7 * 16 + 4 == 116

    def test_last_continuous_bin_closed_at_upper_bound(self):
        part = make_partition(ContinuousAxis(-15.0, 15.0, ROT_EDGES, "rotation"))
        assert part.bucket_of((7.5,)) == 3
        assert part.bucket_of((15.0,)) == 3

    def test_bins_half_open_at_shared_edges(self):
        part = make_partition(ContinuousAxis(-15.0, 15.0, ROT_EDGES))
        assert part.bucket_of((-7.5,)) == 1
        assert part.bucket_of((0.0,)) == 2

    def test_out_of_domain_names_the_axis(self):
        part = make_partition(ContinuousAxis(-15.0, 15.0, ROT_EDGES, name="rotation"))
        with pytest.raises(ValueError, match="rotation"):
            part.bucket_of((15.5,))
        cat = make_partition(CategoricalAxis(4, name="class"))
        with pytest.raises(ValueError, match="class"):
            cat.bucket_of((4,))

    def test_wrong_arity_rejected(self):
        part = make_partition(CategoricalAxis(4))
        with pytest.raises(ValueError):
            part.bucket_of((1, 2))

    def test_disjoint_cover_exhaustive_on_categorical_space(self):
        part = make_partition(CategoricalAxis(3), CategoricalAxis(5))
        ids = [part.bucket_of((a, b)) for a in range(3) for b in range(5)]
        assert sorted(ids) == list(range(15))

    def test_disjoint_cover_randomized_on_continuous_space(self):
        rng = np.random.default_rng(7)
        part = make_partition(
            ContinuousAxis(-15.0, 15.0, ROT_EDGES),
            ContinuousAxis(0.0, 1.0, (0.0, 0.25, 1.0)),
        )
        for _ in range(10_000):
            point = (rng.uniform(-15, 15), rng.uniform(0, 1))
            k = part.bucket_of(point)
            assert 0 <= k < part.bucket_count
            # membership is unique: the unraveled bins reproduce the id
            assert part.bucket_of(point) == k


class TestUniformInBucket:
    def test_zero_width_interval_yields_the_point_itself(self):
        # degenerate edge case: a bin of width zero can only produce its edge
        axis = ContinuousAxis(0.0, 1.0, (0.0, 0.5, 1.0))
        object.__setattr__(axis, "bin_edges", (0.0, 0.0, 1.0))
        rng = np.random.default_rng(0)
        assert axis.sample_in_bin(0, rng) == 0.0

    def test_empirical_mean_of_draws_in_one_bin(self):
        part = make_partition(ContinuousAxis(-15.0, 15.0, ROT_EDGES))
        rng = np.random.default_rng(11)
        n = 100_000
        draws = np.array([part.uniform_in_bucket(0, rng)[0] for _ in range(n)])
        width = 7.5
        se = width / np.sqrt(12 * n)  # standard error of a uniform's mean
        assert abs(draws.mean() - (-11.25)) < 3 * se
        assert draws.min() >= -15.0 and draws.max() < -7.5

    def test_round_trip_for_random_bucket_and_draw_pairs(self):
        part = make_partition(
            CategoricalAxis(4),
            ContinuousAxis(0.0, 2.0, (0.0, 0.3, 1.1, 2.0)),
        )
        rng = np.random.default_rng(13)
        for _ in range(10_000):
            k = int(rng.integers(part.bucket_count))
            assert part.bucket_of(part.uniform_in_bucket(k, rng)) == k

    def test_out_of_range_bucket_id(self):
        part = make_partition(CategoricalAxis(4))
        rng = np.random.default_rng(0)
        with pytest.raises(IndexError):
            part.uniform_in_bucket(4, rng)
        with pytest.raises(IndexError):
            part.uniform_in_bucket(-1, rng)


class TestVolumePrior:
    def test_160_equal_buckets(self):
        part = make_partition(CategoricalAxis(10), CategoricalAxis(16))
        np.testing.assert_allclose(part.volume_prior(), np.full(160, 1 / 160), rtol=0, atol=1e-15)

    def test_equal_width_rotation_bins(self):
        part = make_partition(ContinuousAxis(-15.0, 15.0, ROT_EDGES))
        np.testing.assert_allclose(part.volume_prior(), [0.25, 0.25, 0.25, 0.25], atol=1e-15)

    def test_unequal_widths(self):
        # widths 1 and 3 over a total width of 4
        part = make_partition(ContinuousAxis(0.0, 4.0, (0.0, 1.0, 4.0)))
        np.testing.assert_allclose(part.volume_prior(), [0.25, 0.75], atol=1e-15)

    def test_sums_to_one(self):
        part = make_partition(
            CategoricalAxis(7),
            ContinuousAxis(0.0, 4.0, (0.0, 0.5, 1.0, 4.0)),
            ContinuousAxis(-1.0, 1.0, (-1.0, 0.25, 1.0)),
        )
        assert abs(part.volume_prior().sum() - 1.0) < 1e-12

    def test_invariant_to_axis_ordering_up_to_id_bijection(self):
        a = CategoricalAxis(3)
        b = ContinuousAxis(0.0, 4.0, (0.0, 1.0, 4.0))
        p_ab = make_partition(a, b).volume_prior().reshape(3, 2)
        p_ba = make_partition(b, a).volume_prior().reshape(2, 3)
        np.testing.assert_allclose(p_ab, p_ba.T, atol=1e-15)


class TestDescriptors:
    def test_round_trip(self):
        for axis in (
            CategoricalAxis(10, name="class"),
            ContinuousAxis(-15.0, 15.0, ROT_EDGES, name="rotation"),
        ):
            back = axis_from_descriptor(axis.descriptor(), name=axis.name)
            assert back == axis

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            axis_from_descriptor("weird:1,2")
