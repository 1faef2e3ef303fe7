import numpy as np
import pytest

from filtration_lab import fixtures
from filtration_lab.calculus import (
    compensator,
    dual_projection,
    is_martingale,
    quadratic_covariation,
)
from filtration_lab.errors import IndependenceViolated, NotMartingale
from filtration_lab.finite_space import AdaptedProcess, PointProcess
from filtration_lab.jump_measure import compensator_measure, fundamental_martingales, jump_measure
from filtration_lab.random_time import stopping_time
from filtration_lab.representation import (
    independent_decomposition,
    martingale_closure,
    multiplicity,
    orthogonal_spanning_martingales,
    solve_in_basis,
    solve_prp,
    solve_triple,
    solve_wrp,
)


class TestMartingaleClosure:
    def test_constant_variable(self, space_a_bundle):
        y = martingale_closure(np.full(16, 2.5), space_a_bundle.g)
        assert np.allclose(y.values, 2.5, atol=1e-15)

    def test_terminal_count_closure(self, space_a_bundle):
        b = space_a_bundle
        y = martingale_closure(b.X.terminal, b.g)
        expected = b.X.values + 0.5 * (2.0 - np.arange(3))[None, :]
        assert np.allclose(y.values, expected, atol=1e-14)

    def test_indicator_closure_on_three_atoms(self, a2_bundle):
        y = martingale_closure(np.array([1.0, 0.0, 0.0]), a2_bundle.g)
        assert np.allclose(y.values[:, 0], 0.3, atol=1e-15)
        assert np.array_equal(y.values[:, 1], [1.0, 0.0, 0.0])

    def test_closure_is_martingale_hitting_target(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            b = fixtures.random_bundle(rng)
            xi = rng.normal(size=b.space.n_atoms)
            y = martingale_closure(xi, b.g)
            assert bool(is_martingale(y))
            # terminal values agree wherever the tree separates atoms
            proj = martingale_closure(y.terminal, b.g)
            assert np.allclose(proj.terminal, y.terminal, atol=1e-12)


class TestSingleSourceRepresentation:
    def test_self_representation(self, space_a_bundle):
        b = space_a_bundle
        x_f = PointProcess(b.f, b.X.values)
        m = compensator(x_f).martingale_part
        sol = solve_prp(m, m)
        assert sol.residual_sup <= 1e-12
        assert np.allclose(sol.integrands["K"][:, 1:], 1.0, atol=1e-12)

    def test_binary_tree_always_solvable(self, space_a_bundle):
        b = space_a_bundle
        rng = np.random.default_rng(42)
        x_f = PointProcess(b.f, b.X.values)
        m = compensator(x_f).martingale_part
        for _ in range(25):
            xi = rng.normal() * b.X.terminal ** 2 + rng.normal() * b.X.terminal
            sol = solve_prp(martingale_closure(xi, b.f), m, b.f)
            assert sol.residual_sup <= 1e-9

    def test_joint_filtration_four_way_branching_fails(self, space_a_bundle):
        b = space_a_bundle
        m = compensator(b.X).martingale_part
        y = martingale_closure(b.H.terminal, b.g)
        sol = solve_prp(y, m, b.g)
        assert sol.residual_sup > 0.5

    def test_rejects_non_martingale_target(self, space_a_bundle):
        b = space_a_bundle
        m = compensator(b.X).martingale_part
        with pytest.raises(NotMartingale):
            solve_prp(b.X, m, b.g)


class TestMeasureAndTripleRepresentation:
    def test_constant_target_zero_function(self, a2_bundle):
        b = a2_bundle
        mu = jump_measure(b.X, b.H)
        nu = compensator_measure(mu)
        sol = solve_wrp(martingale_closure(np.ones(3), b.g), mu, nu)
        assert sol.residual_sup <= 1e-15
        assert max(np.abs(v).max() for v in sol.integrands.values()) <= 1e-15

    def test_uniform_fixture_product_target(self, space_a_bundle):
        b = space_a_bundle
        mu = jump_measure(b.X, b.H)
        nu = compensator_measure(mu)
        y = martingale_closure(b.X.terminal * b.H.terminal, b.g)
        assert solve_wrp(y, mu, nu).residual_sup <= 1e-9

    def test_three_atom_indicator_avoids_dead_mark(self, a2_bundle):
        b = a2_bundle
        mu = jump_measure(b.X, b.H)
        nu = compensator_measure(mu)
        sol = solve_wrp(martingale_closure(np.array([0.0, 0.0, 1.0]), b.g), mu, nu)
        assert sol.residual_sup <= 1e-9
        assert np.abs(sol.integrands["W(1, 1)"]).max() <= 1e-12
        assert np.abs(sol.integrands["W(1, 0)"][:, 1] + 1.0).max() <= 1e-12
        assert np.abs(sol.integrands["W(0, 1)"][:, 1] + 1.0).max() <= 1e-12

    def test_triple_picks_own_coordinate(self, space_a_bundle):
        b = space_a_bundle
        z1, z2, z3 = fundamental_martingales(b.X, b.H)
        sol = solve_triple(AdaptedProcess(b.g, z2.values), z1, z2, z3)
        assert sol.residual_sup <= 1e-12
        assert np.abs(sol.integrands["K2"][:, 1:] - 1.0).max() <= 1e-12
        assert np.abs(sol.integrands["K1"][:, 1:]).max() <= 1e-12
        assert np.abs(sol.integrands["K3"][:, 1:]).max() <= 1e-12

    def test_forms_agree_and_both_solve(self):
        rng = np.random.default_rng(43)
        for _ in range(10):
            b = fixtures.random_bundle(rng)
            mu = jump_measure(b.X, b.H)
            nu = compensator_measure(mu)
            z1, z2, z3 = fundamental_martingales(b.X, b.H)
            y = martingale_closure(rng.normal(size=b.space.n_atoms), b.g)
            a = solve_wrp(y, mu, nu)
            c = solve_triple(y, z1, z2, z3)
            assert a.residual_sup <= 1e-9
            assert c.residual_sup <= 1e-9
            assert np.abs(a.reconstruction.values - c.reconstruction.values).max() <= 1e-12

    def test_stopped_representation(self):
        rng = np.random.default_rng(44)
        bundles = [fixtures.staggered_random_time(), fixtures.trinomial_random_time()]
        bundles += [fixtures.random_random_time_bundle(rng) for _ in range(5)]
        for rb in bundles:
            z1, z2, z3 = fundamental_martingales(rb.X, rb.H)
            st = stopping_time(rb)
            for _ in range(10):
                y = martingale_closure(rng.normal(size=rb.g.space.n_atoms), rb.g)
                sol = solve_triple(y, z1, z2, z3, stop_at=st)
                assert sol.kind == "triple_stopped"
                assert sol.residual_sup <= 1e-9


class TestIndependentDecomposition:
    def test_orthogonal_basis_and_identities(self, space_a_bundle):
        b = space_a_bundle
        rng = np.random.default_rng(45)
        for _ in range(10):
            y = martingale_closure(rng.normal(size=16), b.g)
            sol = independent_decomposition(y, b)
            assert sol.residual_sup <= 1e-9
            assert sol.checks["basis_orthogonality_gap"] <= 1e-12
            assert sol.checks["basis_identity_gap"] <= 1e-12
            assert sol.checks["bracket_factorisation_gap"] <= 1e-9
            assert sol.checks["pythagoras_gap"] <= 1e-9

    def test_bracket_target_takes_third_coordinate(self, space_a_bundle):
        b = space_a_bundle
        xbar = compensator(b.X).martingale_part
        hbar = compensator(b.H).martingale_part
        cross = quadratic_covariation(xbar, hbar)
        sol = independent_decomposition(cross, b)
        assert sol.residual_sup <= 1e-12
        assert np.abs(sol.integrands["K1"][:, 1:]).max() <= 1e-12
        assert np.abs(sol.integrands["K2"][:, 1:]).max() <= 1e-12
        assert np.abs(sol.integrands["K3"][:, 1:] - 1.0).max() <= 1e-12

    def test_dependent_fixture_rejected(self):
        dep = fixtures.dependent()
        y = martingale_closure(dep.X.terminal, dep.g)
        with pytest.raises(IndependenceViolated):
            independent_decomposition(y, dep)


class TestMultiplicity:
    def test_known_spanning_numbers(self):
        assert multiplicity(fixtures.space_a().f) == 1
        assert multiplicity(fixtures.space_a().g) == 3
        assert multiplicity(fixtures.trinomial_random_time().g) == 2
        assert multiplicity(fixtures.staggered().g) == 1

    def test_certificates(self):
        rng = np.random.default_rng(46)
        for filt, expected in (
            (fixtures.space_a().f, 1),
            (fixtures.space_a().g, 3),
            (fixtures.trinomial_random_time().g, 2),
        ):
            spanning = orthogonal_spanning_martingales(filt)
            assert len(spanning) == expected
            for i, mi in enumerate(spanning):
                assert bool(is_martingale(mi))
                for mj in spanning[i + 1 :]:
                    gap = dual_projection(quadratic_covariation(mi, mj), filt).sup_abs()
                    assert gap <= 1e-12
            for _ in range(10):
                y = martingale_closure(rng.normal(size=filt.space.n_atoms), filt)
                assert solve_in_basis(y, spanning).residual_sup <= 1e-9

    def test_fewer_martingales_cannot_span(self, space_a_bundle):
        # dropping one of the three leaves a visible residual on the joint tree
        b = space_a_bundle
        spanning = orthogonal_spanning_martingales(b.g)
        y = martingale_closure(b.X.terminal * b.H.terminal, b.g)
        assert solve_in_basis(y, spanning[:2]).residual_sup > 1e-3

    def test_monotone_under_enlargement(self):
        rng = np.random.default_rng(47)
        for _ in range(15):
            b = fixtures.random_bundle(rng)
            assert multiplicity(b.g) >= multiplicity(b.f)
