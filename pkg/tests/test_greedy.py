import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobigreedy.jacobi import JacobiParams, NormalizationMode
from jacobigreedy.greedy import (
    Expansion,
    JacobiFamily,
    default_search_family,
    democracy_scan,
    expansion_lp_norm,
    greedy_approx,
    greedy_ordering,
    quasi_greedy_ratio,
    sign_ratio,
)
from jacobigreedy.quadrature import MeshConfig

LEG = JacobiParams(0.0, 0.0)
ON = NormalizationMode.orthonormal()
SQ = NormalizationMode.sqrt_scaled()


def brute_force_order(coeffs: dict) -> tuple:
    """Oracle: lexicographically minimal among all magnitude-sorted permutations."""
    support = sorted(coeffs)
    valid = [
        perm
        for perm in itertools.permutations(support)
        if all(abs(coeffs[perm[i]]) >= abs(coeffs[perm[i + 1]]) for i in range(len(perm) - 1))
    ]
    return min(valid)


coeff_values = st.sampled_from([-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0])
coeff_maps = st.dictionaries(st.integers(0, 15), coeff_values, min_size=1, max_size=6)


class TestGreedyOrdering:
    def test_magnitude_sort_with_tie(self):
        e = Expansion(LEG, ON, {0: 0.5, 1: -2.0, 2: 0.5})
        assert greedy_ordering(e).order == (1, 0, 2)

    def test_singleton(self):
        e = Expansion(LEG, ON, {7: 3.0})
        assert greedy_ordering(e).order == (7,)

    def test_all_equal_uses_natural_order(self):
        e = Expansion(LEG, ON, {0: 1.0, 1: 1.0, 2: 1.0, 3: 1.0})
        assert greedy_ordering(e).order == (0, 1, 2, 3)

    @settings(max_examples=200, deadline=None)
    @given(coeffs=coeff_maps)
    def test_matches_brute_force(self, coeffs):
        e = Expansion(LEG, ON, coeffs)
        assert greedy_ordering(e).order == brute_force_order(e.coeffs)

    @settings(max_examples=50, deadline=None)
    @given(coeffs=coeff_maps, scale=st.sampled_from([-3.0, -0.25, 0.5, 7.0]))
    def test_scale_equivariance(self, coeffs, scale):
        e = Expansion(LEG, ON, coeffs)
        scaled = Expansion(LEG, ON, {j: scale * c for j, c in coeffs.items()})
        assert greedy_ordering(e).order == greedy_ordering(scaled).order


class TestGreedyApprox:
    def test_m_zero_empty(self):
        e = Expansion(LEG, ON, {0: 1.0, 3: 2.0})
        assert greedy_approx(e, 0).coeffs == {}

    def test_full_retention(self):
        e = Expansion(LEG, ON, {0: 1.0, 3: 2.0})
        assert greedy_approx(e, 10).coeffs == e.coeffs

    def test_keeps_largest(self):
        e = Expansion(LEG, ON, {0: 0.5, 1: -2.0, 2: 0.5})
        assert greedy_approx(e, 1).coeffs == {1: -2.0}

    def test_nesting_and_idempotence(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            support = rng.choice(30, size=rng.integers(1, 9), replace=False)
            e = Expansion(LEG, ON, {int(j): float(rng.normal()) for j in support})
            prev = set()
            for m in range(len(e.coeffs) + 1):
                g = greedy_approx(e, m)
                cur = set(g.coeffs)
                assert prev <= cur
                assert greedy_approx(g, m).coeffs == g.coeffs
                prev = cur
            assert greedy_approx(e, len(e.coeffs)).coeffs == e.coeffs

    def test_zero_coefficients_are_canonically_absent(self):
        e = Expansion(LEG, ON, {0: 0.0, 2: 1.0})
        assert e.support == (2,)


class TestQuasiGreedyRatio:
    def test_p2_orthonormal_contraction(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            support = rng.choice(40, size=rng.integers(1, 9), replace=False)
            e = Expansion(LEG, ON, {int(j): float(rng.normal()) for j in support})
            assert quasi_greedy_ratio(e, 2.0) <= 1.0 + 1e-8

    def test_singleton_is_one(self):
        e = Expansion(LEG, ON, {4: -1.3})
        assert quasi_greedy_ratio(e, 3.0) == pytest.approx(1.0, rel=1e-9)

    def test_global_scaling_invariant(self):
        e = Expansion(LEG, ON, {1: 1.0, 5: -0.5, 8: 0.25})
        a = quasi_greedy_ratio(e, 3.0)
        b = quasi_greedy_ratio(Expansion(LEG, ON, {1: 42.0, 5: -21.0, 8: 10.5}), 3.0)
        assert a == pytest.approx(b, rel=1e-9)

    def test_block_plus_tail_ratio_grows_for_p_not_2(self):
        # random signs on the block keep the full sum near N^{1/2}, while a tiny
        # bump on the positive terms makes G_m isolate a constant-sign subset
        # whose coherent endpoint peak grows like N^{5/6} at p=3
        rng = np.random.default_rng(0)

        def crafted(N):
            signs = rng.integers(0, 2, size=N) * 2 - 1
            block = range(N, 3 * N, 2)
            coeffs = {j: (1.0 + 1e-6 if s > 0 else -1.0) for j, s in zip(block, signs)}
            return Expansion(LEG, SQ, coeffs)

        r16 = quasi_greedy_ratio(crafted(16), 3.0, tol=1e-7)
        r64 = quasi_greedy_ratio(crafted(64), 3.0, tol=1e-7)
        assert r64 > r16 > 1.0
        assert r64 > 1.5

    def test_perturbation_stability(self):
        # rescaling coefficients by lambda in [1/2, 2] changes the ratio boundedly
        rng = np.random.default_rng(11)
        for _ in range(10):
            support = rng.choice(20, size=6, replace=False)
            coeffs = {int(j): float(rng.normal()) for j in support}
            lam = {j: float(rng.uniform(0.5, 2.0)) for j in coeffs}
            base = quasi_greedy_ratio(Expansion(LEG, ON, coeffs), 3.0, tol=1e-7)
            pert = quasi_greedy_ratio(
                Expansion(LEG, ON, {j: lam[j] * c for j, c in coeffs.items()}), 3.0, tol=1e-7
            )
            assert pert <= 4.0 * base


class TestSignRatio:
    def test_all_plus_is_exactly_one(self):
        assert sign_ratio(LEG, ON, [0, 2, 5], [1, 1, 1], 3.0) == pytest.approx(1.0, rel=1e-12)

    def test_singleton_either_sign(self):
        for s in (1.0, -1.0):
            assert sign_ratio(LEG, ON, [3], [s], 3.0) == pytest.approx(1.0, rel=1e-12)

    def test_rejects_bad_signs(self):
        with pytest.raises(ValueError):
            sign_ratio(LEG, ON, [0, 1], [1.0, 0.5], 2.0)

    def test_p2_orthonormal_sign_invariant(self):
        assert sign_ratio(LEG, ON, [0, 1, 4, 9], [1, -1, -1, 1], 2.0) == pytest.approx(
            1.0, abs=1e-10
        )


class TestExpansionNorm:
    def test_p2_parseval(self):
        e = Expansion(LEG, ON, {0: 3.0, 2: -4.0})
        assert expansion_lp_norm(e, 2.0) == pytest.approx(5.0, rel=1e-12)

    def test_p2_matches_mesh_path(self):
        e = Expansion(LEG, SQ, {j: 1.0 for j in (4, 6, 8)})
        exact = expansion_lp_norm(e, 2.0)
        # bypass the fast path by integrating |f|^2 on the graded mesh
        from jacobigreedy.quadrature import lp_norm

        mesh = MeshConfig().scaled_for_degree(8)
        general = lp_norm(e.evaluate, LEG, 2.0, mesh=mesh, tol=1e-10)
        assert general == pytest.approx(exact, rel=1e-9)

    def test_empty_expansion_norm_zero(self):
        assert expansion_lp_norm(Expansion(LEG, ON, {}), 3.0) == 0.0


class TestDemocracyScan:
    def test_p2_orthonormal_all_sets_sqrt_N(self):
        rep = democracy_scan(LEG, ON, 9, 2.0)
        assert rep.phi_u_estimate == pytest.approx(3.0, abs=1e-6)
        assert rep.phi_l_estimate == pytest.approx(3.0, abs=1e-6)

    def test_size_one(self):
        rep = democracy_scan(LEG, ON, 1, 3.0)
        assert rep.phi_l_estimate <= rep.phi_u_estimate
        assert rep.phi_u_estimate == pytest.approx(1.0, rel=0.5)

    def test_default_family_contents(self):
        fam = default_search_family(6, seed=0)
        assert fam["contiguous"] == (0, 1, 2, 3, 4, 5)
        assert fam["staggered"] == (6, 8, 10, 12, 14, 16)
        assert fam["lacunary"] == (1, 2, 4, 8, 16, 32)
        assert all(len(v) == 6 for v in fam.values())

    def test_ordering_of_estimates(self):
        rep = democracy_scan(LEG, SQ, 8, 3.0, tol=1e-6)
        assert rep.phi_l_estimate <= rep.phi_u_estimate
        assert "upper" in rep.witness_sets and "lower" in rep.witness_sets
