"""Rounding, candidate selection and discrete optimality certificates."""

import numpy as np
import pytest

from slgmin import (DecomposableFunction, WeightedGraph, brute_force_minimize,
                    candidate_set, certificate_gap, graph_cut,
                    lovasz_extension, round_to_sets, smoothed_objective)
from helpers import random_instance


class TestRoundToSets:
    def test_vertex_input_recovers_set(self):
        f = random_instance(90, n=6)
        _, argmins = brute_force_minimize(f, 6)
        A = argmins[0]
        sets, value = round_to_sets(f.indicator(A), f)
        assert A in sets
        assert value == pytest.approx(f.evaluate(A), abs=1e-12 * f.value_scale)

    def test_half_point_modular(self):
        f = DecomposableFunction(2, np.array([-1.0, 2.0]))
        sets, value = round_to_sets(np.full(2, 0.5), f)
        assert sets == [frozenset({0})]
        assert value == pytest.approx(-1.0)

    def test_never_above_extension_value(self):
        rng = np.random.default_rng(97)
        for seed in range(5):
            f = random_instance(800 + seed, n=7)
            for _ in range(40):
                x = rng.uniform(0, 1, 7)
                _, value = round_to_sets(x, f)
                f_tilde, _ = lovasz_extension(f, x)
                assert value <= f_tilde + 1e-9

    def test_ties_prefer_ascending_index(self):
        # equal coordinates enumerate prefixes {}, {0}, {0,1}, ...
        f = DecomposableFunction(3, np.array([0.0, -1.0, 0.0]))
        sets, value = round_to_sets(np.full(3, 0.5), f)
        assert value == pytest.approx(-1.0)
        assert frozenset({0, 1}) in sets


class TestCandidateSet:
    def test_modular_sign_pattern(self):
        f = DecomposableFunction(2, np.array([-1.0, 2.0]))
        for x in (np.zeros(2), np.full(2, 0.5), np.ones(2)):
            assert candidate_set(f, 0.1, x) == frozenset({0})

    def test_all_positive_gradient_gives_empty(self):
        f = DecomposableFunction(3, np.array([1.0, 2.0, 0.5]))
        assert candidate_set(f, 0.1, np.full(3, 0.5)) == frozenset()

    def test_matches_recomputed_gradient_signs(self):
        rng = np.random.default_rng(101)
        f = random_instance(93, n=4)
        for _ in range(20):
            x = rng.uniform(0, 1, 4)
            mu = float(rng.uniform(0.02, 0.5))
            grad = smoothed_objective(f, x, mu).grad
            expected = frozenset(int(k) for k in range(4) if grad[k] <= 0)
            assert candidate_set(f, mu, x) == expected


class TestCertificateGap:
    def test_modular_optimum_is_certified(self):
        f = DecomposableFunction(3, np.array([-1.0, 2.0, -0.5]))
        A = frozenset({0, 2})
        cert = certificate_gap(f, 0.1, np.full(3, 0.5), A)
        assert cert.gap == pytest.approx(0.0, abs=1e-12)
        assert cert.sign_stable

    def test_two_node_cut_nonoptimal_singleton(self):
        f = graph_cut(WeightedGraph(2, ((0, 1, 1.0),)))
        cert = certificate_gap(f, 0.1, np.full(2, 0.5), frozenset({0}))
        assert cert.gamma == pytest.approx(0.2)
        assert cert.grad_at_shift == pytest.approx([1.0, -1.0])
        assert cert.gap == pytest.approx(2.0)
        # sound: f({0}) - f* = 1 <= 2
        assert cert.gap >= f.evaluate({0}) - 0.0 - 1e-9

    def test_empty_and_full_sets(self):
        f = random_instance(94, n=5)
        x = np.random.default_rng(0).uniform(0, 1, 5)
        for A in (frozenset(), frozenset(range(5))):
            cert = certificate_gap(f, 0.05, x, A)
            assert cert.gamma == pytest.approx(0.1)
            assert cert.gap >= -1e-12

    def test_soundness_random_sets(self):
        rng = np.random.default_rng(103)
        for seed in range(8):
            f = random_instance(900 + seed, n=7)
            fstar, _ = brute_force_minimize(f, 7)
            for _ in range(12):
                x = rng.uniform(0, 1, 7)
                mu = float(rng.uniform(0.01, 0.5))
                A = frozenset(int(k) for k in range(7) if rng.uniform() < 0.5)
                cert = certificate_gap(f, mu, x, A)
                assert cert.gap >= f.evaluate(A) - fstar - 1e-9

    def test_zero_gap_implies_optimal(self):
        rng = np.random.default_rng(107)
        found = 0
        for seed in range(20):
            f = random_instance(1000 + seed, n=6)
            fstar, argmins = brute_force_minimize(f, 6)
            x = rng.uniform(0, 1, 6)
            mu = 0.05
            A = candidate_set(f, mu, x)
            cert = certificate_gap(f, mu, x, A)
            if cert.gap <= 1e-9 * f.value_scale:
                found += 1
                assert A in argmins
        assert found > 0

    def test_separated_gradient_is_a_subgradient(self):
        # with enough separation no shift is applied and the smoothed
        # gradient supports the exact extension at the set's vertex
        rng = np.random.default_rng(109)
        for seed in range(5):
            f = random_instance(1100 + seed, n=6)
            mu = 0.02
            A = frozenset({0, 3})
            x = np.where(f.indicator(A) > 0.5, 0.9, 0.1)
            cert = certificate_gap(f, mu, x, A)
            assert cert.gamma == 0.0
            g = smoothed_objective(f, x, mu).grad
            fa, _ = lovasz_extension(f, f.indicator(A))
            for _ in range(20):
                z = rng.uniform(0, 1, 6)
                fz, _ = lovasz_extension(f, z)
                assert fz >= fa + g @ (z - f.indicator(A)) - 1e-9
