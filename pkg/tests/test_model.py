"""Domain model: evaluation, Lovász extension, enumeration, submodularity."""

import numpy as np
import pytest

from slgmin import (CapacityError, ConcaveCurve, ConcavePotential,
                    DecomposableFunction, InfeasibleThresholdError,
                    NotConcaveError, ThresholdPotential, brute_force_minimize,
                    check_submodular, enumerate_values, lovasz_extension)
from helpers import random_instance


def unit_cut_2():
    """Cut of a single unit edge on two nodes, as a plain oracle."""
    values = {frozenset(): 0.0, frozenset({0}): 1.0,
              frozenset({1}): 1.0, frozenset({0, 1}): 0.0}
    return values.__getitem__


def test_eval_empty_set_is_zero():
    f = random_instance(7)
    assert f.evaluate(frozenset()) == 0.0


def test_eval_single_threshold():
    f = DecomposableFunction(
        3, np.zeros(3),
        thresholds=(ThresholdPotential.from_dense([1, 1, 1], 1, 1),))
    assert f.evaluate({0, 2}) == pytest.approx(1.0)


def test_eval_mixed_modular_threshold():
    f = DecomposableFunction(
        2, np.array([0.5, -0.3]),
        thresholds=(ThresholdPotential.from_dense([1, 1], 1, 2),))
    assert f.evaluate({0, 1}) == pytest.approx(2.2)


def test_eval_rejects_bad_index():
    f = random_instance(3, n=4)
    with pytest.raises(ValueError, match="invalid subset"):
        f.evaluate({4})
    with pytest.raises(ValueError, match="invalid subset"):
        f.evaluate({-1})


def test_lovasz_matches_values_on_vertices():
    f = random_instance(11, n=6)
    for A in [frozenset(), frozenset({1, 3}), frozenset(range(6))]:
        value, _ = lovasz_extension(f, f.indicator(A))
        assert value == pytest.approx(f.evaluate(A), abs=1e-12 * f.value_scale)


def test_lovasz_cut_by_hand():
    value, grad = lovasz_extension(unit_cut_2(), [1.0, 0.5])
    assert value == pytest.approx(0.5)
    assert grad == pytest.approx([1.0, -1.0])


def test_lovasz_tie_is_permutation_independent():
    value, _ = lovasz_extension(unit_cut_2(), [0.5, 0.5])
    assert value == pytest.approx(0.0)


def test_lovasz_subgradient_inequality():
    rng = np.random.default_rng(5)
    f = random_instance(21, n=7)
    for _ in range(50):
        x = rng.uniform(0, 1, 7)
        z = rng.uniform(0, 1, 7)
        vx, g = lovasz_extension(f, x)
        vz, _ = lovasz_extension(f, z)
        assert vz >= vx + g @ (z - x) - 1e-9


def test_brute_force_modular():
    f = DecomposableFunction(3, np.array([1.0, -2.0, 3.0]))
    value, sets = brute_force_minimize(f, 3)
    assert value == pytest.approx(-2.0)
    assert sets == [frozenset({1})]


def test_brute_force_cut_both_trivial_sets():
    value, sets = brute_force_minimize(unit_cut_2(), 2)
    assert value == 0.0
    assert sets == [frozenset(), frozenset({0, 1})]


def test_brute_force_threshold_instance():
    f = DecomposableFunction(
        3, np.array([-1.0, -1.0, 2.0]),
        thresholds=(ThresholdPotential.from_dense([1, 1, 1], 1, 1),))
    value, sets = brute_force_minimize(f, 3)
    assert value == pytest.approx(-1.0)
    assert sets == [frozenset({0, 1})]


def test_brute_force_value_bounds_every_subset():
    f = random_instance(31, n=8)
    values = enumerate_values(f)
    best, _ = brute_force_minimize(f, 8)
    assert np.all(best <= values + 1e-12)


def test_brute_force_capacity():
    with pytest.raises(CapacityError):
        brute_force_minimize(lambda A: 0.0, 25)


def test_enumerate_matches_generic_loop():
    f = random_instance(13, n=7)
    fast = enumerate_values(f)
    slow = np.array([f.evaluate({k for k in range(7) if (mask >> k) & 1})
                     for mask in range(1 << 7)])
    assert fast == pytest.approx(slow, abs=1e-10 * f.value_scale)


def test_check_submodular_decomposable_instances():
    for seed in range(8):
        f = random_instance(100 + seed, n=int(np.random.default_rng(seed).integers(4, 9)))
        ok, witness = check_submodular(f, f.n)
        assert ok, f"seed {seed} gave witness {witness}"


def test_check_submodular_modular_equality():
    f = DecomposableFunction(4, np.array([1.0, -2.0, 0.5, 0.0]))
    ok, witness = check_submodular(f, 4)
    assert ok and witness is None


def test_check_submodular_catches_convex_cardinality():
    oracle = lambda A: max(0.0, len(A) - 1.0)
    ok, witness = check_submodular(oracle, 3)
    assert not ok
    assert witness == (frozenset({0}), frozenset({1}))


def test_check_submodular_capacity():
    with pytest.raises(CapacityError):
        check_submodular(lambda A: 0.0, 15)


def test_monotone_discrete_derivatives():
    # equivalent characterization: marginals shrink on larger sets
    f = random_instance(41, n=6)
    n = 6
    for b_mask in range(1 << n):
        B = {k for k in range(n) if (b_mask >> k) & 1}
        fb = f.evaluate(B)
        sub = b_mask
        while True:  # iterate all submasks of b_mask
            A = {k for k in range(n) if (sub >> k) & 1}
            fa = f.evaluate(A)
            for k in range(n):
                if (b_mask >> k) & 1:
                    continue
                da = f.evaluate(A | {k}) - fa
                db = f.evaluate(B | {k}) - fb
                assert da >= db - 1e-9 * f.value_scale
            if sub == 0:
                break
            sub = (sub - 1) & b_mask


def test_extension_property_on_all_vertices():
    f = random_instance(51, n=7)
    for mask in range(1 << 7):
        A = frozenset(k for k in range(7) if (mask >> k) & 1)
        value, _ = lovasz_extension(f, f.indicator(A))
        assert value == pytest.approx(f.evaluate(A), abs=1e-12 * f.value_scale)


class TestThresholdPotential:
    def test_drops_zero_weights(self):
        p = ThresholdPotential.from_dense([0.0, 0.5, 0.0, 1.0], 1.0, 1.0)
        assert list(p.indices) == [1, 3]
        assert p.mass == pytest.approx(1.5)

    def test_rejects_weight_above_one(self):
        with pytest.raises(ValueError):
            ThresholdPotential.from_dense([1.2], 0.5, 1.0)

    def test_rejects_level_above_mass(self):
        with pytest.raises(InfeasibleThresholdError):
            ThresholdPotential.from_dense([1.0, 0.5], 2.0, 1.0)

    def test_rejects_negative_coefficient(self):
        with pytest.raises(ValueError):
            ThresholdPotential.from_dense([1.0], 0.5, -1.0)

    def test_degenerate_empty_support_is_legal(self):
        p = ThresholdPotential.from_dense([0.0, 0.0], 0.0, 1.0)
        assert p.mass == 0.0
        f = DecomposableFunction(2, np.zeros(2), thresholds=(p,))
        assert f.evaluate({0, 1}) == 0.0


class TestConcaveCurve:
    def test_normalizes_offset(self):
        curve = ConcaveCurve.from_points([(0, 2.0), (1, 3.0), (2, 3.5)])
        assert curve.offset == pytest.approx(2.0)
        assert curve.value(0) == 0.0
        assert curve.value(1.5) == pytest.approx(1.25)

    def test_rejects_nonconcave(self):
        with pytest.raises(NotConcaveError):
            ConcaveCurve.from_points([(0, 0), (1, 1), (2, 3)])

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            ConcaveCurve.from_points([(0, 0), (2, 1), (1, 2)])

    def test_sampler_of_sqrt_is_concave(self):
        curve = ConcaveCurve.from_function(np.sqrt, 2.0, num=64)
        assert curve.ts.size == 64
        assert np.all(np.diff(curve.slopes) <= 1e-12)

    def test_domain_mismatch_rejected(self):
        curve = ConcaveCurve.from_points([(0, 0), (1.0, 1.0)])
        with pytest.raises(ValueError, match="domain"):
            ConcavePotential.from_dense([0.5, 0.9], curve)


def test_function_offset_accumulates_curve_constants():
    curve = ConcaveCurve.from_points([(0, 1.5), (1.0, 2.0)])
    f = DecomposableFunction(
        2, np.zeros(2),
        concaves=(ConcavePotential.from_dense([0.5, 0.5], curve),))
    assert f.offset == pytest.approx(1.5)
    assert f.evaluate(frozenset()) == 0.0
