"""Instance generator: knob validation, determinism, and the shape
promises each regime makes."""

import numpy as np
import pytest

import probeopt as po


class TestGenSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n": 0},
            {"n": 3, "state_count": 1},
            {"n": 3, "prob_shape": "bimodal"},
            {"n": 3, "cost_regime": "free"},
            {"n": 3, "cost_range": (0.2, 0.1)},
            {"n": 3, "cost_range": (0.0, 1.0)},
            {"n": 3, "cost_range": (-0.1, 0.2)},
        ],
    )
    def test_bad_knobs(self, kwargs):
        with pytest.raises(ValueError):
            po.GenSpec(**kwargs)

    def test_knob_tables_exported(self):
        assert "two-point" in po.PROB_SHAPES
        assert "equal" in po.COST_REGIMES


class TestGenerate:
    def test_deterministic_given_seed(self):
        spec = po.GenSpec(n=5, state_count=3)
        a = po.generate(spec, 7)
        b = po.generate(spec, 7)
        np.testing.assert_array_equal(a.rewards, b.rewards)
        np.testing.assert_array_equal(a.probs, b.probs)
        np.testing.assert_array_equal(a.costs, b.costs)

    def test_generator_object_matches_int_seed(self):
        spec = po.GenSpec(n=4, state_count=4)
        a = po.generate(spec, 11)
        b = po.generate(spec, np.random.default_rng(11))
        np.testing.assert_array_equal(a.probs, b.probs)

    def test_every_regime_yields_valid_instances(self):
        for shape in po.PROB_SHAPES:
            for regime in po.COST_REGIMES:
                for seed in range(5):
                    spec = po.GenSpec(
                        n=4, state_count=3, prob_shape=shape, cost_regime=regime
                    )
                    inst = po.generate(spec, seed)
                    po.validate_instance(inst)
                    assert inst.n == 4 and inst.state_count == 3

    def test_cost_regimes(self):
        zero = po.generate(po.GenSpec(n=6, cost_regime="zero"), 1)
        assert np.all(zero.costs == 0.0)
        eq = po.generate(
            po.GenSpec(n=6, cost_regime="equal", cost_range=(0.1, 0.2)), 1
        )
        assert np.all(eq.costs == eq.costs[0])
        assert 0.1 <= eq.costs[0] < 0.2
        het = po.generate(
            po.GenSpec(n=6, cost_regime="heterogeneous", cost_range=(0.1, 0.2)), 1
        )
        assert np.all((het.costs >= 0.1) & (het.costs < 0.2))
        assert len(set(het.costs)) > 1

    def test_top_reward_pin(self):
        pinned = po.generate(po.GenSpec(n=3, state_count=4), 5)
        assert pinned.rewards[-1] == 1.0
        loose = po.generate(po.GenSpec(n=3, state_count=4, top_reward_one=False), 5)
        assert loose.rewards[-1] <= 1.0

    def test_two_point_mass_pattern(self):
        spec = po.GenSpec(n=8, state_count=4, prob_shape="two-point")
        inst = po.generate(spec, 3)
        for j in range(inst.n):
            col = inst.probs[:, j]
            assert np.count_nonzero(col) == 2
            assert col[0] > 0.0  # base state always carries mass

    def test_spiky_top_concentrates_mass(self):
        spec = po.GenSpec(n=8, state_count=4, prob_shape="spiky-top")
        inst = po.generate(spec, 4)
        top = inst.probs[-1]
        assert np.all((top >= 0.5) & (top < 0.95))


class TestCounterexample:
    def test_frozen_arrays(self):
        inst = po.counterexample_instance(0.1)
        np.testing.assert_allclose(inst.rewards, [0.0, 0.1, 1.0])
        np.testing.assert_allclose(inst.probs[:, 2], [0.50, 0.40, 0.10])
        np.testing.assert_allclose(inst.costs, [0.005885, 0.006, 0.005])

    def test_valid_across_the_stated_range(self):
        for delta in (0.01, 0.05, 0.1, 0.149):
            po.validate_instance(po.counterexample_instance(delta))

    @pytest.mark.parametrize("delta", [0.0, 0.15, -0.1, 0.5])
    def test_delta_domain(self, delta):
        with pytest.raises(ValueError):
            po.counterexample_instance(delta)
