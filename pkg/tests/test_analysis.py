import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpchar import Generator, GeneratorPair, StepFunction, make_space, power_pair
from lpchar.analysis import (
    concavity_scan,
    functional_equivalence_scan,
    hardy_condition_check,
    hessian_fd_check,
    multiplicativity_check,
    optimality_search,
    power_fit,
    power_hessian_det,
    reversed_optimality_search,
    strict_gap_demo,
)
from lpchar.errors import DegenerateInputError, DomainError, PreconditionError, ValidationError


class TestConcavity:
    @pytest.mark.parametrize("p,q,expected", [(2, 2, True), (3, 1.5, True), (4, 4, True), (1.5, 1.5, False), (1.2, 2, False)])
    def test_predicate(self, p, q, expected):
        v = concavity_scan(power_pair(p, q))
        assert v.concave_on_grid == expected
        assert (v.violating_triple is None) == expected

    def test_oracle_defect(self):
        # independent brute force of the worst normalized midpoint defect
        p, q = 1.5, 1.5
        s = np.linspace(0.1, 10, 5)
        pts = [(a, b) for a in s for b in s]
        F = lambda x, y: x ** (1 / p) * y ** (1 / q)  # noqa: E731
        worst = -np.inf
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                a = 0.5 * (F(*pts[i]) + F(*pts[j]))
                m = F(0.5 * (pts[i][0] + pts[j][0]), 0.5 * (pts[i][1] + pts[j][1]))
                worst = max(worst, (a - m) / max(1, abs(a), abs(m)))
        v = concavity_scan(power_pair(p, q), steps=5)
        assert v.worst_violation == pytest.approx(worst, rel=1e-12)

    def test_scale_invariance(self):
        # phi -> lam * phi rescales phi^{-1}'s argument, and concavity is unaffected
        a = concavity_scan(power_pair(3, 2)).concave_on_grid
        b = concavity_scan(power_pair(3, 2, c_phi=7.0, c_psi=0.1)).concave_on_grid
        assert a == b

    def test_csv_rows(self):
        v = concavity_scan(power_pair(2, 2), steps=4)
        rows = v.csv_rows()
        assert len(rows) == 16 and all(len(r) == 3 for r in rows)

    def test_bad_input(self):
        with pytest.raises(ValidationError):
            concavity_scan(power_pair(2, 2), steps=2)
        with pytest.raises(ValidationError):
            concavity_scan(power_pair(2, 2), s_range=(0, 1))


class TestHessian:
    def test_conjugate_zero(self):
        assert power_hessian_det(2, 2) == 0.0

    def test_closed_form(self):
        # (1/9)(1 - 2/3)
        assert power_hessian_det(3, 3) == pytest.approx(1 / 27, rel=1e-15)
        assert power_hessian_det(1.5, 1.5) == pytest.approx((1 / 2.25) * (1 - 4 / 3), rel=1e-15)

    @given(st.floats(1.2, 5), st.floats(1.2, 5), st.floats(0.5, 4), st.floats(0.5, 4))
    def test_fd_agrees_anywhere(self, p, q, s, t):
        assert hessian_fd_check(p, q, (s, t)) == pytest.approx(power_hessian_det(p, q), abs=1e-5)

    def test_zero_exponent(self):
        with pytest.raises(DomainError):
            power_hessian_det(0, 2)


class TestPowerDetectors:
    @given(st.floats(0.01, 100), st.floats(0.2, 6))
    def test_fit_recovers(self, c, p):
        fit = power_fit(Generator.power(c, p), np.geomspace(0.1, 10, 30))
        assert fit.c == pytest.approx(c, rel=1e-6)
        assert fit.p == pytest.approx(p, rel=1e-6)
        assert fit.max_relative_residual < 1e-9

    def test_expm1_residual(self):
        fit = power_fit(Generator.expm1(), np.linspace(0.5, 4, 20))
        assert fit.max_relative_residual > 0.05

    def test_multiplicativity(self):
        grid = np.linspace(0.5, 4, 8)
        pairs = [(x, y) for x in grid for y in grid]
        assert multiplicativity_check(Generator.power(3.0, 2.2), pairs) < 1e-12
        assert multiplicativity_check(Generator.expm1(), pairs) > 0.05

    def test_fit_errors(self):
        with pytest.raises(ValidationError):
            power_fit(Generator.power(1, 2), [1, 1, 2])
        with pytest.raises(DomainError):
            power_fit(Generator.power(1, 2), [0, 1, 2])


class TestHardy:
    def test_expm1_passes(self):
        assert hardy_condition_check(Generator.expm1(), np.linspace(0.2, 5, 15)).passed

    def test_power_passes(self):
        # phi'/phi'' = t/(p-1) is linear, hence concave
        assert hardy_condition_check(Generator.power(1, 3), np.linspace(0.2, 5, 15)).passed

    def test_linear_indeterminate(self):
        r = hardy_condition_check(Generator.power(1, 1), np.linspace(0.2, 5, 15))
        assert r.indeterminate and not r.passed

    def test_concave_generator_fails(self):
        r = hardy_condition_check(Generator.log1p(), np.linspace(0.2, 5, 15))
        assert not r.positive and not r.passed


class TestOptimality:
    def test_conjugate_attains(self, half):
        res = optimality_search(power_pair(2, 2), StepFunction(half, [1, 2]), half)
        assert abs(res.min_gap) <= 1e-9 * res.scale
        assert res.best_exponent == pytest.approx(1.0, abs=1e-4)

    def test_non_conjugate_gap(self, half):
        res = optimality_search(power_pair(3, 3), StepFunction(half, [1, 2]), half)
        assert res.min_gap > 1e-4 and not res.achieved_equality

    def test_non_conjugate_oracle(self, half):
        # independent dense scan of the gap over g = f^r
        r = np.linspace(0.1, 10, 100_001)
        lhs = 0.5 * (1 + 2 ** (1 + r))
        norm3 = lambda a, b: (0.5 * a**3 + 0.5 * b**3) ** (1 / 3)  # noqa: E731
        gap = norm3(1, 2) * norm3(1, 2**r) - lhs
        res = optimality_search(power_pair(3, 3), StepFunction(half, [1, 2]), half)
        assert res.min_gap == pytest.approx(gap.min(), rel=1e-6)
        assert res.best_exponent == pytest.approx(r[np.argmin(gap)], abs=1e-3)

    @pytest.mark.parametrize("p", [0.3, 0.5, 0.8])
    def test_reversed_finds_q_minus_one(self, p):
        q = p / (p - 1)
        mu = make_space([0.3, 0.7])
        g = StepFunction(mu, [1.0, 3.0])
        res = reversed_optimality_search(power_pair(p, q), g, mu, (-10, -0.1), 400)
        assert res.achieved_equality
        assert res.best_exponent == pytest.approx(q - 1, abs=1e-3)

    def test_zero_f(self, half):
        with pytest.raises(DegenerateInputError):
            optimality_search(power_pair(2, 2), StepFunction(half, [0, 0]), half)


class TestStrictGap:
    def test_margin(self, half):
        low, high = strict_gap_demo(2, 1.5, StepFunction(half, [1, 2]), half)
        assert high == pytest.approx(math.sqrt(2.5), rel=1e-15)
        assert low == pytest.approx((0.5 + 0.5 * 2**1.5) ** (1 / 1.5), rel=1e-15)
        assert high - low > 1e-6

    def test_preconditions(self, half):
        with pytest.raises(PreconditionError):
            strict_gap_demo(2, 1.5, StepFunction(half, [2, 2]), half)
        with pytest.raises(PreconditionError):
            strict_gap_demo(1.5, 2, StepFunction(half, [1, 2]), half)
        mu = make_space([1, 1])
        with pytest.raises(PreconditionError):
            strict_gap_demo(2, 1.5, StepFunction(mu, [1, 2]), mu)


def test_functional_equivalence():
    samples = [(0.5, 2.0), (1.0, 3.0), (4.0, 0.3)]
    assert functional_equivalence_scan(Generator.power(1, 2), Generator.power(9, 2), samples) < 1e-14
    assert functional_equivalence_scan(Generator.power(1, 2), Generator.expm1(), samples) > 1e-3
    # a pair is only fixed up to scaling of each generator
    pair = GeneratorPair(Generator.power(2, 3), Generator.power(5, 1.5))
    assert functional_equivalence_scan(pair.phi, Generator.power(1, 3), samples) < 1e-14
