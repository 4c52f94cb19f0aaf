"""Exact finite-support ground truth: TV, optimal score, quantized maps,
the information-theoretic bound, annealing and the simulated samplers."""

import json
import math

import numpy as np
import pytest

from huse.classifier import KnnConfig, loo_error
from huse.metrics import compute_huse
from huse.oracle import (
    ContextSpec,
    DiscreteDistribution,
    DiscretePair,
    RaterModel,
    anneal,
    anneal_pair,
    check_approximation_bound,
    check_invertible_invariance,
    constant_quantizer,
    exact_feature_error,
    exact_optimal_error_rate,
    exact_tv,
    grid_quantizer,
    identity_quantizer,
    random_grid_quantizer,
    random_pair,
    sample_eval_dataset,
    sample_opt_features,
    sign_quantizer,
    single_context_pair,
    tv_anneal_curve,
)

TV02 = single_context_pair([0.25] * 4, [0.4, 0.3, 0.2, 0.1])
IDENTICAL = single_context_pair([0.3, 0.7], [0.3, 0.7])
DISJOINT = single_context_pair([0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5])
SYMMETRIC = single_context_pair([0.3, 0.7], [0.7, 0.3])


class TestExactTv:
    def test_identical(self):
        assert exact_tv(IDENTICAL) == 0.0

    def test_disjoint(self):
        assert exact_tv(DISJOINT) == 1.0

    def test_uniform_vs_skewed(self):
        assert exact_tv(TV02) == pytest.approx(0.2)

    def test_multi_context_prior_weighting(self):
        pair = DiscretePair(
            contexts=(
                ContextSpec("a", 0.75, IDENTICAL.contexts[0].p_human, IDENTICAL.contexts[0].p_model),
                ContextSpec("b", 0.25, DISJOINT.contexts[0].p_human, DISJOINT.contexts[0].p_model),
            )
        )
        assert exact_tv(pair) == pytest.approx(0.25)


class TestOptimalErrorRate:
    def test_identical(self):
        assert exact_optimal_error_rate(IDENTICAL) == 1.0

    def test_disjoint(self):
        assert exact_optimal_error_rate(DISJOINT) == 0.0

    def test_tv_02(self):
        assert exact_optimal_error_rate(TV02) == pytest.approx(0.8)

    def test_identity_on_random_dyadic_pairs(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            pair = random_pair(rng)
            assert exact_tv(pair) + exact_optimal_error_rate(pair) == 1.0


class TestAnneal:
    def test_uniform_is_fixed_point(self):
        d = DiscreteDistribution(("a", "b"), (0.5, 0.5))
        for t in (0.25, 0.5, 2.0):
            assert anneal(d, t).probs == pytest.approx((0.5, 0.5))

    def test_sharpening(self):
        d = DiscreteDistribution(("a", "b"), (0.9, 0.1))
        out = anneal(d, 0.5)
        assert out.probs[0] == pytest.approx(0.81 / 0.82)
        assert out.probs[1] == pytest.approx(0.01 / 0.82)

    def test_unit_temperature_is_exact_identity(self):
        d = DiscreteDistribution(("a", "b", "c"), (0.123, 0.456, 0.421))
        assert anneal(d, 1.0) is d

    def test_zero_mass_stays_zero(self):
        d = DiscreteDistribution(("a", "b", "c"), (0.9, 0.1, 0.0))
        assert anneal(d, 0.5).probs[2] == 0.0

    def test_nonpositive_temperature_rejected(self):
        d = DiscreteDistribution(("a", "b"), (0.5, 0.5))
        with pytest.raises(ValueError):
            anneal(d, 0.0)
        with pytest.raises(ValueError):
            anneal(d, -1.0)

    def test_normalization_preserved(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            pair = random_pair(rng)
            for t in (0.3, 0.7, 1.3):
                out = anneal(pair.contexts[0].p_model, t)
                assert abs(sum(out.probs) - 1.0) <= 1e-12

    def test_tv_monotone_under_annealing(self):
        # sharpening a non-uniform model away from its own base distribution
        # increases distinguishability
        rng = np.random.default_rng(2)
        for _ in range(20):
            probs = random_pair(rng, max_support=6).contexts[0].p_human
            if max(probs.probs) - min(probs.probs) < 0.05:
                continue
            base = DiscretePair(
                contexts=(ContextSpec("c", 1.0, probs, probs),)
            )
            curve = tv_anneal_curve(base, [0.5, 0.7, 0.9, 1.0])
            tvs = [tv for _, tv in curve]
            assert tvs[-1] == 0.0
            assert all(a >= b - 1e-12 for a, b in zip(tvs, tvs[1:]))


class TestFeatureError:
    def test_identity_equals_optimal(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            pair = random_pair(rng)
            assert exact_feature_error(pair, identity_quantizer) == exact_optimal_error_rate(pair)

    def test_constant_is_uninformative(self):
        assert exact_feature_error(TV02, constant_quantizer) == 1.0
        assert exact_feature_error(DISJOINT, constant_quantizer) == 1.0

    def test_sign_quantizer_suffices(self):
        # the optimal rule only needs the sign of p_human - p_model
        assert exact_feature_error(TV02, sign_quantizer) == pytest.approx(0.8)

    def test_coarser_features_never_better(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            pair = random_pair(rng)
            quantizer = random_grid_quantizer(rng)
            assert (
                exact_feature_error(pair, quantizer)
                >= exact_optimal_error_rate(pair) - 1e-12
            )

    def test_refinement_never_hurts(self):
        # halving the grid step refines the cell partition
        rng = np.random.default_rng(5)
        for _ in range(20):
            pair = random_pair(rng)
            coarse = exact_feature_error(pair, grid_quantizer(0.2))
            fine = exact_feature_error(pair, grid_quantizer(0.1))
            assert fine <= coarse + 1e-12


class TestApproximationBound:
    def test_identity_collapses_bound(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            pair = random_pair(rng)
            check = check_approximation_bound(pair, identity_quantizer)
            assert check.mutual_info_bits == 0.0
            assert check.l_phi == check.l_star
            assert check.holds

    def test_constant_quantizer(self):
        check = check_approximation_bound(TV02, constant_quantizer)
        assert check.l_phi == 1.0
        assert check.holds

    def test_random_sweep_holds(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            pair = random_pair(rng)
            assert check_approximation_bound(pair, random_grid_quantizer(rng)).holds


class TestInvertibleInvariance:
    def test_componentwise_increasing_map(self):
        assert check_invertible_invariance(TV02, lambda u, v: (math.exp(u), 2 * v + 1))

    def test_swap_map(self):
        assert check_invertible_invariance(TV02, lambda u, v: (v, u))

    def test_collapsing_map_rejected(self):
        with pytest.raises(ValueError, match="injective"):
            check_invertible_invariance(SYMMETRIC, lambda u, v: (u + v, u + v))


class TestSampleEvalDataset:
    def test_constant_rater(self):
        model = RaterModel(slope=0.0, intercept=3.0, noise=0.0, n_raters=4)
        ds = sample_eval_dataset(TV02, 10, model, seed=0)
        for e in ds.examples:
            assert e.ratings == (3.0, 3.0, 3.0, 3.0)

    def test_bit_reproducible(self):
        a = sample_eval_dataset(TV02, 25, RaterModel(), seed=42)
        b = sample_eval_dataset(TV02, 25, RaterModel(), seed=42)
        assert a == b

    def test_pairing_and_shape(self):
        ds = sample_eval_dataset(TV02, 30, RaterModel(n_raters=7), seed=1)
        assert ds.n_contexts == 30
        assert len(ds.examples) == 60
        assert all(len(e.ratings) == 7 for e in ds.examples)
        assert all(e.token_count == 1 for e in ds.examples)

    def test_identical_distributions_score_near_one(self):
        ds = sample_eval_dataset(IDENTICAL, 2000, RaterModel(noise=0.0), seed=0)
        report = compute_huse(ds, KnnConfig(k=16))
        assert report.huse == pytest.approx(1.0, abs=0.1)

    def test_invalid_rater_model_rejected(self):
        with pytest.raises(ValueError):
            RaterModel(n_raters=0)
        with pytest.raises(ValueError):
            RaterModel(noise=-1.0)


class TestSampleOptFeatures:
    def test_shapes_and_labels(self):
        feats, labels = sample_opt_features(TV02, 100, seed=0)
        assert feats.shape == (200, 2)
        assert labels.sum() == 100  # balanced by construction

    def test_features_are_exact_probabilities(self):
        feats, _ = sample_opt_features(TV02, 200, seed=1)
        legal = {(0.25, 0.4), (0.25, 0.3), (0.25, 0.2), (0.25, 0.1)}
        assert set(map(tuple, feats)) <= legal

    def test_estimator_tracks_oracle(self):
        feats, labels = sample_opt_features(TV02, 2000, seed=0)
        estimate = 2.0 * loo_error(feats, labels, KnnConfig(k=16))
        assert abs(estimate - 0.8) < 0.1


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(8)
        pair = random_pair(rng, n_contexts=3)
        assert DiscretePair.from_json(pair.to_json()) == pair

    def test_json_shape(self):
        obj = json.loads(TV02.to_json())
        assert list(obj) == ["contexts"]
        ctx = obj["contexts"][0]
        assert ctx["support"] == ["y0", "y1", "y2", "y3"]
        assert ctx["p_model"] == [0.4, 0.3, 0.2, 0.1]

    def test_invalid_pairs_rejected(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(("a", "b"), (0.6, 0.6))
        with pytest.raises(ValueError):
            DiscreteDistribution(("a", "a"), (0.5, 0.5))
        with pytest.raises(ValueError):
            single_context_pair([1.0, 0.0], [0.5, 0.5, 0.0])


class TestAnnealPair:
    def test_anneals_model_only(self):
        out = anneal_pair(TV02, 0.5)
        assert out.contexts[0].p_human == TV02.contexts[0].p_human
        assert out.contexts[0].p_model != TV02.contexts[0].p_model
