"""Exact arithmetic, polynomials, and certified root finding."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from bbsolve.algebra import (BiPoly, GaussianRational, UPoly,
                             all_nth_roots, falling, pochhammer,
                             roots_univariate, solve_linear, squarefree_in_p)
from bbsolve.errors import DegenerateInput

rationals = st.builds(Fraction,
                      st.integers(min_value=-50, max_value=50),
                      st.integers(min_value=1, max_value=20))
gaussians = st.builds(GaussianRational, rationals, rationals)


class TestPochhammer:
    def test_empty_product(self):
        assert pochhammer(1, 0) == 1

    def test_rising(self):
        assert pochhammer(2, 2) == 6
        assert pochhammer(1, 2) == 2   # (k+n-1)!/(n-1)! = 2!/0!

    def test_falling_matches_sign_convention(self):
        # falling(-n, k) = (-1)^k pochhammer(n, k)
        for n in range(1, 6):
            for k in range(0, 6):
                assert falling(-n, k) == (-1) ** k * pochhammer(n, k)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            pochhammer(0, 1)


class TestGaussianRational:
    @settings(max_examples=60, deadline=None)
    @given(gaussians, gaussians, gaussians)
    def test_field_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + (-a) == GaussianRational(0)
        if not a.is_zero():
            assert a * a.inverse() == GaussianRational(1)

    def test_pow_and_div(self):
        i = GaussianRational(0, 1)
        assert i ** 2 == GaussianRational(-1)
        assert (GaussianRational(3, 4) / GaussianRational(3, 4)) == GaussianRational(1)


class TestRoots:
    def test_square_minus_one(self):
        roots = roots_univariate(UPoly([-1, 0, 1]))
        assert [r.exact for r in roots] == [GaussianRational(-1), GaussianRational(1)]

    def test_newton_on_half(self):
        roots = roots_univariate(UPoly([-2, 0, 4]))   # 4c^2 = 2
        vals = [complex(r) for r in roots]
        assert abs(vals[0] + 0.7071067811865476) < 1e-12
        assert abs(vals[1] - 0.7071067811865476) < 1e-12
        for r in roots:
            assert float(r.err) < 2.0 ** (-128)

    def test_roots_of_unity(self):
        roots = roots_univariate(UPoly([-1, 0, 0, 1]))
        assert len(roots) == 3
        one = [r for r in roots if r.exact == GaussianRational(1)]
        assert len(one) == 1
        with mpmath.workprec(300):
            for r in roots:
                assert abs(r.val ** 3 - 1) < mpmath.mpf(2) ** (-120)

    def test_zero_poly_rejected_constant_empty(self):
        with pytest.raises(DegenerateInput):
            roots_univariate(UPoly([]))
        assert roots_univariate(UPoly([5])) == []

    def test_multiplicity(self):
        p = UPoly([-1, 1]) * UPoly([-1, 1]) * UPoly([2, 1])
        roots = roots_univariate(p)
        exacts = sorted(str(r.exact) for r in roots)
        assert exacts == ["-2", "1", "1"]

    def test_residual_bounded_by_error(self):
        # substituting each root back: |poly(root)| <= C * err with C from
        # coefficient sizes (here via the derivative bound on the disk)
        p = UPoly([Fraction(3, 7), Fraction(-2), Fraction(1), Fraction(5)])
        roots = roots_univariate(p, precision=192)
        for r in roots:
            val = p.eval(r)
            assert val.abs_upper() <= 1e-20

    def test_monic_reconstruction(self):
        p = UPoly([Fraction(-6), Fraction(11), Fraction(-6), Fraction(1)])
        roots = roots_univariate(p)   # 1, 2, 3
        with mpmath.workprec(300):
            poly = [mpmath.mpc(1)]
            for r in roots:
                nxt = [mpmath.mpc(0)] * (len(poly) + 1)
                for idx, cc in enumerate(poly):
                    nxt[idx + 1] += cc
                    nxt[idx] -= cc * r.val
                poly = nxt
            for got, want in zip(poly, p.coeffs):
                assert abs(got - complex(want)) < 1e-40

    def test_deterministic_ordering(self):
        a = roots_univariate(UPoly([-1, 0, 0, 1]))
        b = roots_univariate(UPoly([-1, 0, 0, 1]))
        assert [complex(x) for x in a] == [complex(x) for x in b]

    def test_nth_roots(self):
        rs = all_nth_roots(GaussianRational(4), 2)
        assert sorted(str(r.exact) for r in rs) == ["-2", "2"]


class TestSquarefree:
    def test_separable_quadratic(self):
        assert squarefree_in_p(BiPoly({(2, 0): 1, (0, 1): -1}))

    def test_repeated_factor(self):
        P = BiPoly({(2, 0): 1, (1, 1): -2, (0, 2): 1})   # (p - q)^2
        assert not squarefree_in_p(P)

    def test_weierstrass(self):
        P = BiPoly({(2, 0): 1, (0, 3): -4, (0, 1): 4})
        assert squarefree_in_p(P)


class TestLinearSolve:
    def test_exact_solution(self):
        rows = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
        rhs = [Fraction(5), Fraction(10)]
        x = solve_linear(rows, rhs)
        assert x[0] == GaussianRational(1) and x[1] == GaussianRational(3)

    def test_singular_detected(self):
        with pytest.raises(ValueError):
            solve_linear([[1, 2], [2, 4]], [1, 2])


class TestUPoly:
    def test_divmod_roundtrip(self):
        a = UPoly([Fraction(1, 2), 0, 3, 1])
        b = UPoly([1, 2])
        q, r = divmod(a, b)
        assert q * b + r == a

    def test_yun_decomposition(self):
        x = UPoly([0, 1])
        lin = UPoly([-1, 1])
        poly = x * x * lin * lin * lin
        dec = poly.squarefree_decomposition()
        assert sorted((tuple(str(c) for c in f.coeffs), m) for f, m in dec) == \
            [(("-1", "1"), 3), (("0", "1"), 2)]

    def test_gcd(self):
        a = UPoly([-1, 0, 1])       # (x-1)(x+1)
        b = UPoly([-1, 1])
        assert a.gcd(b) == UPoly([-1, 1])
