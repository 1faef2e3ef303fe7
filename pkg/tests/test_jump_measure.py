import numpy as np
import pytest

from filtration_lab import fixtures
from filtration_lab.calculus import is_martingale, quadratic_covariation, stochastic_integral
from filtration_lab.enlargement import build_bundle
from filtration_lab.finite_space import AdaptedProcess, PointProcess, build_space
from filtration_lab.jump_measure import (
    MARKS,
    Mark,
    PredictableFunction,
    compensator_measure,
    fundamental_martingales,
    integrate,
    joint_decomposition,
    jump_measure,
)


class TestJointDecomposition:
    def test_no_second_process_means_first_only(self, space_a_bundle):
        b = space_a_bundle
        quiet = build_bundle(b.space, b.X.values, np.zeros_like(b.H.values))
        y1, y2, y3 = joint_decomposition(quiet.X, quiet.H)
        assert np.array_equal(y1.values, quiet.X.values)
        assert y2.sup_abs() == 0.0 and y3.sup_abs() == 0.0

    def test_equal_processes_all_joint(self, space_a_bundle):
        b = space_a_bundle
        same = build_bundle(b.space, b.X.values, b.X.values)
        y1, y2, y3 = joint_decomposition(same.X, same.H)
        assert y1.sup_abs() == 0.0 and y2.sup_abs() == 0.0
        assert np.array_equal(y3.values, same.X.values)

    def test_parts_are_counting_processes_with_disjoint_jumps(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            b = fixtures.random_bundle(rng)
            y1, y2, y3 = joint_decomposition(b.X, b.H)
            for part in (y1, y2, y3):
                assert isinstance(part, PointProcess)
            for a, c in ((y1, y2), (y1, y3), (y2, y3)):
                assert quadratic_covariation(a, c).sup_abs() == 0.0
            assert np.array_equal(y1.values + y3.values, b.X.values)
            assert np.array_equal(y2.values + y3.values, b.H.values)

    def test_joint_mean_on_uniform_fixture(self, space_a_bundle):
        _, _, y3 = joint_decomposition(space_a_bundle.X, space_a_bundle.H)
        assert space_a_bundle.space.expectation(y3.terminal) == pytest.approx(0.5, abs=1e-15)


class TestJumpMeasure:
    def test_no_jumps_empty_measure(self, space_a_bundle):
        b = space_a_bundle
        quiet = build_bundle(b.space, np.zeros_like(b.X.values), np.zeros_like(b.H.values))
        mu = jump_measure(quiet.X, quiet.H)
        assert all(len(evs) == 0 for evs in mu.events)

    def test_three_atom_fixture_events(self, a2_bundle):
        mu = jump_measure(a2_bundle.X, a2_bundle.H)
        assert mu.events[0] == ((1, Mark.X_ONLY),)
        assert mu.events[1] == ((1, Mark.H_ONLY),)
        assert mu.events[2] == ()

    def test_mixed_path_events(self, space_a_bundle):
        b = space_a_bundle
        mu = jump_measure(b.X, b.H)
        dx = b.X.increments()
        dh = b.H.increments()
        # atom with jumps (dx, dh) = (1,0) then (1,1)
        atom = next(
            a
            for a in range(16)
            if dx[a, 1] == 1 and dh[a, 1] == 0 and dx[a, 2] == 1 and dh[a, 2] == 1
        )
        assert mu.events[atom] == ((1, Mark.X_ONLY), (2, Mark.JOINT))

    def test_total_mass_formula(self):
        rng = np.random.default_rng(32)
        for _ in range(20):
            b = fixtures.random_bundle(rng)
            mu = jump_measure(b.X, b.H)
            bracket = quadratic_covariation(b.X, b.H)
            expected = b.X.values + b.H.values - bracket.values
            assert np.array_equal(mu.mass().values, expected)

    def test_at_most_one_event_per_time(self):
        rng = np.random.default_rng(33)
        for _ in range(10):
            b = fixtures.random_bundle(rng)
            for evs in jump_measure(b.X, b.H).events:
                times = [t for t, _ in evs]
                assert len(times) == len(set(times))


class TestCompensatorMeasure:
    def test_deterministic_jumps_compensate_to_themselves(self):
        space = build_space([0.5, 0.5])
        x = np.array([[0.0, 1.0], [0.0, 1.0]])
        h = np.zeros((2, 2))
        b = build_bundle(space, x, h)
        mu = jump_measure(b.X, b.H)
        nu = compensator_measure(mu)
        for mark in MARKS:
            assert np.allclose(
                nu.indicator_increments(mark), mu.indicator_increments(mark), atol=1e-15
            )
        w = PredictableFunction.constant(b.g, 2.0)
        diff = integrate(w, mu).values - integrate(w, nu).values
        assert np.abs(diff).max() <= 1e-15

    def test_uniform_fixture_densities(self, space_a_bundle):
        nu = compensator_measure(jump_measure(space_a_bundle.X, space_a_bundle.H))
        for mark in MARKS:
            assert np.allclose(nu.indicator_increments(mark)[:, 1:], 0.25, atol=1e-15)

    def test_three_atom_densities(self, a2_bundle):
        nu = compensator_measure(jump_measure(a2_bundle.X, a2_bundle.H))
        assert np.allclose(nu.indicator_increments(Mark.X_ONLY)[:, 1], 0.3, atol=1e-15)
        assert np.allclose(nu.indicator_increments(Mark.H_ONLY)[:, 1], 0.5, atol=1e-15)
        assert np.allclose(nu.indicator_increments(Mark.JOINT)[:, 1], 0.0, atol=1e-15)

    def test_compensated_integral_is_martingale_for_random_functions(self):
        rng = np.random.default_rng(34)
        for _ in range(5):
            b = fixtures.random_bundle(rng)
            mu = jump_measure(b.X, b.H)
            nu = compensator_measure(mu)
            z1, z2, z3 = fundamental_martingales(b.X, b.H)
            for _ in range(20):
                w = PredictableFunction(
                    b.g,
                    np.stack(
                        [fixtures.random_predictable_values(rng, b.g) for _ in MARKS]
                    ),
                )
                diff = AdaptedProcess(
                    b.g, integrate(w, mu).values - integrate(w, nu).values
                )
                assert bool(is_martingale(diff))
                split = sum(
                    stochastic_integral(w.component(mark), z).values
                    for mark, z in zip(MARKS, (z1, z2, z3))
                )
                assert np.abs(diff.values - split).max() <= 1e-12


class TestIntegrate:
    def test_unit_function_counts_events(self, space_a_bundle):
        b = space_a_bundle
        mu = jump_measure(b.X, b.H)
        ones = PredictableFunction.constant(b.g, 1.0)
        assert np.array_equal(integrate(ones, mu).values, mu.mass().values)

    def test_joint_indicator_recovers_bracket(self, space_a_bundle):
        b = space_a_bundle
        mu = jump_measure(b.X, b.H)
        picks = PredictableFunction.indicator(b.g, (Mark.JOINT,))
        bracket = quadratic_covariation(b.X, b.H)
        assert np.array_equal(integrate(picks, mu).values, bracket.values)

    def test_unit_function_against_densities(self, space_a_bundle):
        b = space_a_bundle
        nu = compensator_measure(jump_measure(b.X, b.H))
        ones = PredictableFunction.constant(b.g, 1.0)
        expected = 0.75 * np.arange(3)[None, :]
        assert np.allclose(integrate(ones, nu).values, expected, atol=1e-15)


class TestFundamentalMartingales:
    def test_quiet_second_process(self, space_a_bundle):
        b = space_a_bundle
        quiet = build_bundle(b.space, b.X.values, np.zeros_like(b.H.values))
        z1, z2, z3 = fundamental_martingales(quiet.X, quiet.H)
        from filtration_lab.calculus import compensator

        xbar = compensator(quiet.X).martingale_part
        assert np.allclose(z1.values, xbar.values, atol=1e-15)
        assert z2.sup_abs() == 0.0 and z3.sup_abs() == 0.0

    def test_uniform_fixture_joint_part(self, space_a_bundle):
        b = space_a_bundle
        _, _, z3 = fundamental_martingales(b.X, b.H)
        bracket = quadratic_covariation(b.X, b.H)
        expected = bracket.values - 0.25 * np.arange(3)[None, :]
        assert np.allclose(z3.values, expected, atol=1e-15)
        assert bool(is_martingale(z3))

    def test_three_atom_fixture_parts(self, a2_bundle):
        z1, z2, z3 = fundamental_martingales(a2_bundle.X, a2_bundle.H)
        assert z3.sup_abs() == 0.0
        assert z1.values[:, 1] == pytest.approx([0.7, -0.3, -0.3], abs=1e-15)
        assert z2.values[:, 1] == pytest.approx([-0.5, 0.5, -0.5], abs=1e-15)

    def test_all_three_are_exact_martingales(self):
        rng = np.random.default_rng(35)
        for _ in range(15):
            b = fixtures.random_bundle(rng)
            from filtration_lab.calculus import compensator

            z1, z2, z3 = fundamental_martingales(b.X, b.H)
            for z in (z1, z2, z3):
                assert bool(is_martingale(z))
            xbar = compensator(b.X).martingale_part
            hbar = compensator(b.H).martingale_part
            assert np.abs(z1.values + z3.values - xbar.values).max() <= 1e-12
            assert np.abs(z2.values + z3.values - hbar.values).max() <= 1e-12
