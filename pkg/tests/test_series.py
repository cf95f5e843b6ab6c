"""The Laurent-germ engine: brackets, leading roots, recurrence, pinning."""

import random
from fractions import Fraction

import pytest

from bbsolve.algebra import BigComplex, GaussianRational, coeff_is_zero
from bbsolve.curve import branches_at_infinity
from bbsolve.eqparse import parse_equation
from bbsolve.errors import NoRoots
from bbsolve.series import (FREE, ZSeries, bracket_phi, enumerate_series,
                            leading_coefficients, pinning_coefficient,
                            recurrence_bracket, series_to_json, verify_series)

F = Fraction


def setup_eq(text, depth=16):
    eq = parse_equation(text)
    return eq, branches_at_infinity(eq.P, depth)


def rational_series(rng, n, length):
    coeffs = [GaussianRational(F(rng.randint(-9, 9), rng.randint(1, 6)))
              for _ in range(length)]
    if coeffs[0].is_zero():
        coeffs[0] = GaussianRational(1)
    return ZSeries(-n, coeffs)


class TestBracketPhi:
    def test_k2_single_term(self):
        y = ZSeries(-2, [GaussianRational(1)])      # y = z^-2
        phi = bracket_phi(2, y)
        assert phi.items() == [(-6, GaussianRational(2))]   # (1/2)(-2 z^-3)^2

    def test_k4_shape(self):
        # Phi_4 = y''' y' - (1/2)(y'')^2; check d/dz Phi = y'''' y'
        rng = random.Random(3)
        y = rational_series(rng, 2, 9)
        phi = bracket_phi(4, y)
        diff = phi.derivative() - y.derivative_n(4) * y.derivative()
        assert diff.first_noncertified_zero() is None

    def test_identity_random(self):
        rng = random.Random(5)
        for k in (2, 4, 6):
            for _ in range(4):
                y = rational_series(rng, rng.randint(1, 3), 8)
                lhs = bracket_phi(k, y).derivative()
                rhs = y.derivative_n(k) * y.derivative()
                assert (lhs - rhs).first_noncertified_zero() is None

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            bracket_phi(3, ZSeries(-1, [GaussianRational(1)]))


class TestRecurrenceBracket:
    def test_even_k_unique_zero(self):
        for k in (2, 4):
            for n in (1, 2, 3, 5):
                zeros = [j for j in range(0, 4 * n + 2 * k + 8)
                         if recurrence_bracket(k, n, j) == 0]
                assert zeros == [2 * n + k]

    def test_odd_k_never_zero(self):
        for k in (1, 3, 5):
            for n in (1, 2, 4):
                assert all(recurrence_bracket(k, n, j) != 0
                           for j in range(1, 4 * n + 2 * k + 8))

    def test_factorial_form_beyond_n_plus_k(self):
        # for j >= n+k the bracket equals (k+j')!/j'! - (n+k)!/n!, j' = j-n-k
        import math
        for k in (2, 4):
            for n in (1, 3):
                for jp in range(0, 8):
                    j = n + k + jp
                    want = (F(math.factorial(k + jp), math.factorial(jp))
                            - F(math.factorial(n + k), math.factorial(n)))
                    assert recurrence_bracket(k, n, j) == want


class TestLeadingCoefficients:
    def test_worked_p_germ(self):
        eq, bs = setup_eq("y'' = 6*y^2")
        assert leading_coefficients(2, 2, bs[0]) == [GaussianRational(1)]

    def test_big_coefficient(self):
        eq, bs = setup_eq("y'' = y^2")
        assert leading_coefficients(2, 2, bs[0]) == [GaussianRational(6)]

    def test_irrational_pair(self):
        eq, bs = setup_eq("y'' = 4*y^3")
        got = leading_coefficients(2, 1, bs[0])
        vals = sorted((complex(x.val) if isinstance(x, BigComplex) else complex(x)
                       for x in got), key=lambda z: z.real)
        assert abs(vals[0] + 0.7071067811865476) < 1e-12
        assert abs(vals[1] - 0.7071067811865476) < 1e-12

    def test_ramification_gate(self):
        eq, bs = setup_eq("P: p^2 - q^3 ; k=2", depth=20)
        with pytest.raises(NoRoots):
            leading_coefficients(2, 3, bs[0])   # m=2 does not divide n=3


class TestPinning:
    def test_spot_values(self):
        assert pinning_coefficient(2, 2, 1) == GaussianRational(14)
        assert pinning_coefficient(2, 1, 1) == GaussianRational(5)

    def test_positive_for_unit_c0(self):
        for k in (2, 4, 6, 8):
            for n in range(1, 8):
                v = pinning_coefficient(k, n, 1)
                assert v.im == 0 and v.re > 0

    def test_zero_c0_rejected(self):
        with pytest.raises(ValueError):
            pinning_coefficient(2, 2, 0)


class TestEnumerate:
    def test_worked_germ_fixed_c(self):
        eq, bs = setup_eq("y'' = 6*y^2")
        out = enumerate_series(eq, bs[0], 2, c=GaussianRational(7), N=12)
        assert len(out) == 1
        ls = out[0]
        assert ls.coeffs[0] == GaussianRational(1)
        assert all(coeff_is_zero(c) for c in ls.coeffs[1:6])
        assert ls.coeffs[6] == GaussianRational(F(-1, 2))   # -c/14 at c=7
        assert ls.resonance_status == "pinned"

    def test_worked_germ_free(self):
        eq, bs = setup_eq("y'' = 6*y^2")
        out = enumerate_series(eq, bs[0], 2, c=None, N=12)
        ls = out[0]
        assert ls.coeffs[-1] is FREE and len(ls.coeffs) == 7
        assert ls.resonance_status == "free_parameter"

    def test_weierstrass_germ_matches_reference(self):
        eq, bs = setup_eq("P: p^2 - 4*q^3 + 4*q ; k=1", depth=40)
        out = enumerate_series(eq, bs[0], 2, N=16)
        assert len(out) == 1
        got = {i - 2: c for i, c in enumerate(out[0].coeffs) if not coeff_is_zero(c)}
        # reference Laurent coefficients of the g2=4, g3=0 case
        assert got[-2] == GaussianRational(1)
        assert got[2] == GaussianRational(F(1, 5))
        assert got[6] == GaussianRational(F(1, 75))
        assert got[10] == GaussianRational(F(2, 4875))

    def test_even_k_same_function_as_curve_route(self):
        eq2, bs2 = setup_eq("y'' = 6*y^2 - 2", depth=24)
        out2 = enumerate_series(eq2, bs2[0], 2, c=0, N=16)
        eq1, bs1 = setup_eq("P: p^2 - 4*q^3 + 4*q ; k=1", depth=40)
        out1 = enumerate_series(eq1, bs1[0], 2, N=16)
        assert [str(c) for c in out2[0].coeffs] == [str(c) for c in out1[0].coeffs]

    def test_monomial_at_c_zero(self):
        eq, bs = setup_eq("y'' = 4*y^3")
        out = enumerate_series(eq, bs[0], 1, c=0, N=8)
        assert len(out) == 2
        for ls in out:
            assert all(coeff_is_zero(c) for c in ls.coeffs[1:])

    def test_finiteness_bound(self):
        # germ count <= (number of c0 roots) x (ramification choices)
        for text, n, depth in (("y'' = 6*y^2", 2, 16),
                               ("y'' = 4*y^3", 1, 16),
                               ("P: p^2 - 4*q^3 + 4*q ; k=1", 2, 40)):
            eq, bs = setup_eq(text, depth)
            out = enumerate_series(eq, bs[0], n, c=0 if eq.k % 2 == 0 else None,
                                   N=2 * n + eq.k + 4)
            g = bs[0].m * eq.k // n
            assert 1 <= len(out) <= g * bs[0].m

    def test_resonance_blocked_by_residue(self):
        # P is irreducible here but p dq carries residue: engine must reject
        eq, bs = setup_eq("P: q^2*p - q^5 - q ; k=2", depth=16)
        notes = []
        out = enumerate_series(eq, bs[0], 1, c=GaussianRational(0), N=10,
                               collect_notes=notes)
        assert out == [] and any("resonant" in n for n in notes)


class TestPinningConsistency:
    def test_constant_term_of_bracket_minus_s_equals_c(self):
        # for even k with c fixed: [z^0](Phi_k(y) - s(y)) == c and all
        # negative-power coefficients of Phi_k(y) - s(y) vanish
        for text, n, cval in (("y'' = 6*y^2", 2, F(7)),
                              ("y'' = 6*y^2 - 2", 2, F(-3, 2)),
                              ("y'' = y^2", 2, F(5, 3))):
            eq, bs = setup_eq(text, depth=24)
            c = GaussianRational(cval)
            ls, = enumerate_series(eq, bs[0], n, c=c, N=2 * n + eq.k + 6)
            y = ls.as_zseries()
            phi = bracket_phi(eq.k, y)
            # s(y) for polynomial R: termwise integral evaluated at y
            N_, D_ = eq.resolved
            assert D_.degree() == 0
            s_coeffs = N_.integrate()
            s_of_y = ZSeries(0, [])
            ypow = ZSeries(0, [GaussianRational(1)])
            for d in range(s_coeffs.degree() + 1):
                if d > 0:
                    ypow = ypow * y
                if not s_coeffs[d].is_zero():
                    s_of_y = s_of_y + ypow.scale(s_coeffs[d])
            diff = phi - s_of_y
            assert diff.coeff(0) == c
            for e in range(diff.start, 0):
                assert coeff_is_zero(diff.coeff(e)), (text, e, diff.coeff(e))


class TestVerify:
    def test_exact_solution(self):
        eq, bs = setup_eq("y'' = 6*y^2")
        ls, = enumerate_series(eq, bs[0], 2, c=GaussianRational(0), N=12)
        order = verify_series(eq, ls)
        assert order >= 13

    def test_pinned_germ(self):
        eq, bs = setup_eq("y'' = 6*y^2")
        ls, = enumerate_series(eq, bs[0], 2, c=GaussianRational(7), N=12)
        assert verify_series(eq, ls) >= 13

    def test_corruption_detected(self):
        eq, bs = setup_eq("y'' = 6*y^2")
        ls, = enumerate_series(eq, bs[0], 2, c=GaussianRational(7), N=12)
        bad = list(ls.coeffs)
        bad[4] = GaussianRational(F(1, 3))
        corrupted = type(ls)(n=ls.n, k=ls.k, coeffs=tuple(bad), N=ls.N,
                             resonance_status=ls.resonance_status, c=ls.c,
                             branch_id=ls.branch_id, root_choice=ls.root_choice)
        assert verify_series(eq, corrupted) < verify_series(eq, ls)


class TestSerialization:
    def test_json_shapes(self):
        eq, bs = setup_eq("y'' = 6*y^2")
        free, = enumerate_series(eq, bs[0], 2, c=None, N=12)
        j = series_to_json(free)
        assert j["resonance"] == "free" and j["coeffs"][-1] == {"free": True}
        assert j["coeffs"][0] == {"rat": "1"}
        pinned, = enumerate_series(eq, bs[0], 2, c=GaussianRational(7), N=12)
        j2 = series_to_json(pinned)
        assert j2["resonance"] == "pinned" and j2["c"] == {"rat": "7"}
        eq3, bs3 = setup_eq("y'' = 4*y^3")
        irr, *_ = enumerate_series(eq3, bs3[0], 1, c=0, N=8)
        j3 = series_to_json(irr)
        assert set(j3["coeffs"][0]) == {"re", "im", "err"}
