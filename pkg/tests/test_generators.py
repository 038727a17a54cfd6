import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lpchar import Generator, StepFunction, make_space, mulholland_sum, p_functional, parse_generator, quasi_mean
from lpchar.errors import DomainError, RangeError, ValidationError
from lpchar.generators import bisect_inverse, conjugate_exponent, evaluate, inverse

BUILTIN = [
    Generator.power(1, 2),
    Generator.power(3, 2.5),
    Generator.power(1, 0.5),
    Generator.expm1(),
    Generator.log1p(),
    Generator.expm1().inverted(),
    Generator.tabulated([0, 1, 2, 5], [0, 0.5, 3, 4]),
    Generator.from_callable(lambda t: t**3 + t, "cubic"),
]


class TestEval:
    def test_square(self):
        assert evaluate(Generator.power(1, 2), 3) == 9

    @pytest.mark.parametrize("gen", BUILTIN, ids=repr)
    def test_zero_fixed(self, gen):
        assert gen(0.0) == 0.0

    def test_expm1_at_one(self):
        assert Generator.expm1()(1.0) == pytest.approx(math.e - 1, rel=1e-15)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            Generator.power(1, 2)(-1.0)

    def test_table_range(self):
        g = Generator.tabulated([0, 1], [0, 2])
        assert g(0.5) == 1.0
        with pytest.raises(DomainError):
            g(1.5)

    def test_extended_power_rejects_zero(self):
        g = Generator.power(1, -1)
        assert g(2.0) == 0.5
        with pytest.raises(DomainError):
            g(0.0)

    @pytest.mark.parametrize("gen", BUILTIN, ids=repr)
    def test_monotone(self, gen):
        t = np.linspace(0, min(5.0, gen.domain_upper), 200)
        assert np.all(np.diff(gen(t)) > 0)

    def test_vectorized(self):
        out = Generator.power(2, 2)(np.array([1.0, 2.0]))
        assert out.tolist() == [2.0, 8.0]


class TestInverse:
    def test_square_root(self):
        assert inverse(Generator.power(1, 2), 9) == 3

    def test_log1p_inverse(self):
        # log(1 + t) = 1  =>  t = e - 1
        assert Generator.log1p().inverse(1.0) == pytest.approx(math.e - 1, rel=1e-14)

    @pytest.mark.parametrize("gen", BUILTIN, ids=repr)
    def test_round_trip_grid(self, gen):
        t = np.linspace(0.01, min(4.9, gen.domain_upper), 97)
        back = gen.inverse(gen(t))
        assert np.allclose(back, t, rtol=1e-10, atol=0)

    @given(st.floats(1e-3, 50))
    def test_round_trip_random(self, t):
        for gen in (Generator.power(1.7, 3.1), Generator.expm1(), Generator.log1p()):
            assert gen.inverse(gen(t)) == pytest.approx(t, rel=1e-10)

    def test_range_errors(self):
        with pytest.raises(RangeError):
            Generator.power(1, 2).inverse(-1.0)
        with pytest.raises(RangeError):
            Generator.tabulated([0, 1], [0, 2]).inverse(3.0)

    def test_bisection_matches_closed_form(self):
        # bisection is an independent route to the closed-form inverses
        s = np.array([0.0, 0.3, 1.0, 7.5, 123.0])
        assert np.allclose(bisect_inverse(np.expm1, s), np.log1p(s), rtol=1e-13, atol=1e-15)
        assert np.allclose(bisect_inverse(np.log1p, s), np.expm1(s), rtol=1e-13, atol=1e-15)
        assert np.allclose(bisect_inverse(lambda t: 2 * t**3, s), (s / 2) ** (1 / 3), rtol=1e-13)

    def test_bisection_bounded(self):
        with pytest.raises(RangeError):
            bisect_inverse(lambda t: t, np.array([5.0]), upper=2.0)

    def test_inverted_generators(self):
        for gen in BUILTIN[:7]:
            inv = gen.inverted()
            t = np.linspace(0.0, min(3.0, gen.domain_upper), 31)
            assert np.allclose(inv(gen(t)), t, rtol=1e-12, atol=1e-14)

    def test_power_inverted_closed_form(self):
        inv = Generator.power(4.0, 2.0).inverted()
        assert inv.kind == "power" and inv.exponent == 0.5
        assert inv(16.0) == pytest.approx(2.0)


class TestPFunctional:
    def test_example(self, half):
        # sqrt(0.5*1 + 0.5*4)
        assert p_functional(Generator.power(1, 2), StepFunction(half, [1, 2]), half) == pytest.approx(math.sqrt(2.5), rel=1e-15)

    @pytest.mark.parametrize("gen", BUILTIN, ids=repr)
    def test_constant(self, gen, half):
        assert p_functional(gen, StepFunction(half, [0.7, 0.7]), half) == pytest.approx(0.7, rel=1e-12)

    def test_scale_invariant(self, half):
        f = StepFunction(half, [1, 2])
        assert p_functional(Generator.power(5, 2), f, half) == pytest.approx(
            p_functional(Generator.power(1, 2), f, half), rel=1e-14
        )

    def test_table_range_error(self):
        mu = make_space([2.0, 2.0])
        g = Generator.tabulated([0, 1, 2], [0, 1, 2])
        with pytest.raises(RangeError):
            p_functional(g, StepFunction(mu, [1.5, 1.5]), mu)

    @given(st.floats(0.1, 8), st.floats(1e-3, 1e3), st.integers(0, 1000))
    def test_scale_invariance_all(self, lam, scale_t, seed):
        r = np.random.default_rng(seed)
        mu = make_space(r.dirichlet(np.ones(3)))
        f = StepFunction(mu, r.uniform(0, 3, 3))
        for gen in (Generator.power(1, 2.5), Generator.expm1(), Generator.log1p()):
            a = p_functional(gen, f, mu)
            b = p_functional(gen.scaled(lam), f, mu)
            assert b == pytest.approx(a, rel=1e-10)

    @given(st.integers(0, 10_000))
    def test_power_mean_monotone(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(2, 6))
        mu = make_space(r.dirichlet(np.ones(n)))
        f = StepFunction(mu, r.uniform(0.1, 5, n))
        ps = [0.5, 1.0, 1.5, 2.0, 3.0, 5.0]
        vals = [p_functional(Generator.power(1, p), f, mu) for p in ps]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestQuasiMean:
    def test_arithmetic(self):
        assert quasi_mean(Generator.power(1, 1), [1, 3], [0.5, 0.5]) == 2

    def test_quadratic(self):
        assert quasi_mean(Generator.power(1, 2), [1, 3], [0.5, 0.5]) == pytest.approx(math.sqrt(5), rel=1e-15)

    def test_constants(self):
        assert quasi_mean(Generator.expm1(), [2.5, 2.5, 2.5], [0.2, 0.3, 0.5]) == pytest.approx(2.5, rel=1e-12)

    def test_weight_sum(self):
        with pytest.raises(ValidationError):
            quasi_mean(Generator.power(1, 2), [1, 3], [0.5, 0.6])

    @given(st.lists(st.floats(0, 20), min_size=1, max_size=5), st.integers(0, 999))
    def test_between_min_and_max(self, a, seed):
        q = np.random.default_rng(seed).dirichlet(np.ones(len(a)))
        q = q / q.sum()
        for gen in (Generator.power(1, 3), Generator.expm1(), Generator.log1p()):
            m = quasi_mean(gen, a, q)
            assert min(a) - 1e-9 * max(1, max(a)) <= m <= max(a) + 1e-9 * max(1, max(a))


class TestMulholland:
    def test_pythagorean(self):
        assert mulholland_sum(Generator.power(1, 2), 3, 4) == 5

    def test_linear(self):
        assert mulholland_sum(Generator.power(1, 1), 1.25, 2.5) == 3.75

    @pytest.mark.parametrize("gen", BUILTIN[:6], ids=repr)
    def test_zero_identity(self, gen):
        assert mulholland_sum(gen, 1.3, 0) == pytest.approx(1.3, rel=1e-12)

    @given(st.floats(0, 10), st.floats(0, 10))
    def test_symmetric(self, a, b):
        g = Generator.expm1()
        assert mulholland_sum(g, a, b) == pytest.approx(mulholland_sum(g, b, a), rel=1e-14)

    def test_scale_invariant(self):
        g = Generator.log1p()
        assert mulholland_sum(g.scaled(3.0), 1.5, 2.0) == pytest.approx(mulholland_sum(g, 1.5, 2.0), rel=1e-10)


class TestParsing:
    @pytest.mark.parametrize("spec", ["power:1.0,2.0", "expm1", "log1p", "inverse:expm1", "expm1:2.0"])
    def test_round_trip(self, spec):
        assert parse_generator(spec).spec() in (spec, "inverse:expm1")

    def test_table_file(self, tmp_path):
        p = tmp_path / "g.csv"
        p.write_text("0,0\n1,1\n2,4\n")
        g = parse_generator(f"table:{p}")
        assert g(1.5) == 2.5
        assert parse_generator(g.spec())(1.5) == 2.5

    @pytest.mark.parametrize("text", ["0,0\n1,1\n1,2\n", "0,1\n1,2\n", "0,0\n1,1\n2,0.5\n"])
    def test_bad_tables(self, tmp_path, text):
        p = tmp_path / "g.csv"
        p.write_text(text)
        with pytest.raises(ValidationError):
            parse_generator(f"table:{p}")

    @pytest.mark.parametrize("spec", ["power:1", "power:a,b", "sinh", "power:1,0", "table:"])
    def test_bad_specs(self, spec):
        with pytest.raises(ValidationError):
            parse_generator(spec)

    def test_conjugate(self):
        assert conjugate_exponent(2.0) == 2.0
        assert conjugate_exponent(0.5) == -1.0
        assert conjugate_exponent(1.0) == math.inf


def test_multiplicative_powers():
    g = Generator.power(2.0, 1.7)
    x, y = 1.3, 2.9
    n = lambda t: g(t) / g(1.0)  # noqa: E731
    assert n(x * y) == pytest.approx(n(x) * n(y), rel=1e-14)
    e = Generator.expm1()
    m = lambda t: e(t) / e(1.0)  # noqa: E731
    assert abs(m(4.0) - m(2.0) ** 2) / m(4.0) > 0.1
