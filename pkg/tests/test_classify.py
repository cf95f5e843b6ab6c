"""Exact matchers, operator expansion, continuation, period detection."""

import cmath
from fractions import Fraction

import pytest

from bbsolve.algebra import BigComplex, GaussianRational, UPoly
from bbsolve.classify import (PoleEvent, assemble_verdict, continue_trajectory,
                              detect_periods, match_exponential, match_monomial,
                              stirling2, sweep_poles, theta_pow, make_probe,
                              germ_numeric, _reduce_rat)
from bbsolve.conditions import screen_admissibility
from bbsolve.curve import branches_at_infinity
from bbsolve.eqparse import parse_equation
from bbsolve.series import enumerate_series

F = Fraction


class TestMonomialMatcher:
    def test_p_case(self):
        ms = match_monomial(parse_equation("y'' = 6*y^2"))
        assert len(ms) == 1 and ms[0].n == 2
        assert list(ms[0].roots) == [GaussianRational(1)]

    def test_scaled_case(self):
        ms = match_monomial(parse_equation("y'' = y^2"))
        assert list(ms[0].roots) == [GaussianRational(6)]

    def test_constant_breaks_monomial(self):
        assert match_monomial(parse_equation("y'' = 6*y^2 - 2")) == []

    def test_first_order(self):
        ms = match_monomial(parse_equation("y' = y^2"))
        assert ms[0].n == 1 and list(ms[0].roots) == [GaussianRational(-1)]

    def test_back_substitution_exact(self):
        # emitted matches satisfy P identically: checked through verify_series
        from bbsolve.series import LaurentSeries, verify_series
        eq = parse_equation("y'' = y^2")
        m, = match_monomial(eq)
        germ = LaurentSeries(n=m.n, k=eq.k,
                             coeffs=(m.roots[0],) + (GaussianRational(0),) * 10,
                             N=10, resonance_status="pinned", c=GaussianRational(0),
                             branch_id="b0", root_choice=0)
        assert verify_series(eq, germ) >= 11


class TestExponentialMatcher:
    def test_cubic_roots_of_unity(self):
        ms = match_exponential(parse_equation("y''' = y"))
        assert len(ms) == 1
        m = ms[0]
        assert m.a_poly == UPoly([-1, 0, 0, 1])
        vals = [complex(v.val) if isinstance(v, BigComplex) else complex(v)
                for v in m.a_values]
        assert all(abs(v ** 3 - 1) < 1e-12 for v in vals)
        errs = [float(v.err) for v in m.a_values if isinstance(v, BigComplex)]
        assert all(e < 2.0 ** -128 for e in errs)
        assert m.exact

    def test_harmonic(self):
        ms = match_exponential(parse_equation("y'' = y"))
        assert sorted(str(v) for v in ms[0].a_values) == ["-1", "1"]

    def test_riccati_not_exponential(self):
        notes = []
        ms = match_exponential(parse_equation("y' = y^2"), degree_cap=3,
                               notes=notes)
        assert ms == []
        assert any("no exact exponential match" in n for n in notes)

    def test_affine_shift(self):
        ms = match_exponential(parse_equation("y'' = 4*y - 8"))
        m = ms[0]
        # y = w + 2 with w = e^(az), a^2 = 4
        assert str(m.R_num.coeffs[0]) == "2"
        assert sorted(str(v) for v in m.a_values) == ["-2", "2"]


class TestThetaOperator:
    def test_stirling_values(self):
        assert [stirling2(4, j) for j in range(1, 5)] == [1, 7, 6, 1]
        assert [stirling2(3, j) for j in range(1, 4)] == [1, 3, 1]

    def test_operator_identity_on_rationals(self):
        # (w d/dw)^k computed by the Stirling expansion must equal k
        # successive applications of w d/dw
        samples = [
            (UPoly([0, 1]), UPoly([1])),                 # w
            (UPoly([1, 2, 1]), UPoly([-1, 1])),          # (w+1)^2/(w-1)
            (UPoly([0, 0, 3]), UPoly([2, 0, 1])),        # 3w^2/(w^2+2)
        ]
        for k in (1, 2, 3, 4):
            for Rn, Rd in samples:
                num, den = theta_pow(Rn, Rd, k)
                # direct repeated application
                dn, dd = Rn, Rd
                for _ in range(k):
                    ddn = dn.derivative() * dd - dn * dd.derivative()
                    dn, dd = _reduce_rat(UPoly([0, 1]) * ddn, dd * dd)
                assert (num * dd - dn * den).is_zero()


class TestTrajectory:
    def test_exact_rational_solution(self):
        eq = parse_equation("y' = y^2")
        bs = branches_at_infinity(eq.P, depth=12)
        germ, = enumerate_series(eq, bs[0], 1, N=10)
        traj = continue_trajectory(eq, germ, [0.3 + 0.1j, 2.0 + 0.5j, -1.5 + 0.2j])
        assert traj.completed
        assert len(traj.pole_events) == 1       # y = -1/(z - z0): one pole only
        assert traj.pole_events[0].order == 1

    def test_p_germ_short_segment(self):
        eq = parse_equation("y'' = 6*y^2")
        bs = branches_at_infinity(eq.P, depth=16)
        germ, = enumerate_series(eq, bs[0], 2, c=GaussianRational(0), N=14)
        traj = continue_trajectory(eq, germ, [0.2 + 0.1j, 0.8 + 0.3j])
        assert traj.completed
        # seed pole at 0 of order 2 recorded
        assert traj.pole_events[0].z == 0 and traj.pole_events[0].order == 2
        # y ~ 1/z^2 asymptotics at the endpoint
        z_end, state = traj.steps[-1]
        assert abs(state[0] - 1 / z_end ** 2) < 1e-6 * abs(state[0])

    def test_curve_mode_defect_controlled(self):
        eq = parse_equation("P: p^2 - 4*q^3 + 4*q ; k=1")
        bs = branches_at_infinity(eq.P, depth=40)
        germ, = enumerate_series(eq, bs[0], 2, N=24)
        traj = continue_trajectory(eq, germ, [0.25 + 0.13j, 1.1 + 0.4j])
        assert traj.completed
        assert traj.max_defect < 1e-10


class TestTrajectoryStability:
    def test_pole_locations_stable_under_tightened_tolerance(self):
        # rerunning with much smaller steps (tolerance / 100) moves the
        # reported pole locations by less than 10 * tol
        eq = parse_equation("P: p^2 - 4*q^3 + 4*q ; k=1")
        bs = branches_at_infinity(eq.P, depth=40)
        germ, = enumerate_series(eq, bs[0], 2, N=24)
        tol = 1e-10
        runs = []
        for t in (tol, tol / 100):
            events, _f, _g = sweep_poles(eq, [germ], tol=t, budget=6)
            runs.append([ev.z for ev in events])
        assert len(runs[0]) == len(runs[1])
        for a in runs[0]:
            b = min(runs[1], key=lambda z: abs(z - a))
            assert abs(a - b) < 10 * tol, (a, b)


class TestDetectPeriods:
    def test_arithmetic_progression(self):
        T = 2j * cmath.pi
        events = [PoleEvent(z=m * T, order=1, germ_id="g0", residual=0.0)
                  for m in range(3)]

        def probe(z):
            w = cmath.exp(z)        # period 2 pi i exactly
            return (w, w * w)

        pr = detect_periods(events, state_probe=probe)
        assert pr.rank == 1 and pr.verified
        assert min(abs(pr.periods[0] - T), abs(pr.periods[0] + T)) < 1e-7

    def test_square_lattice_fit(self):
        T1, T2 = 1.0 + 0j, 1j
        pts = [a * T1 + b * T2 for a in range(-2, 3) for b in range(-2, 3)]
        events = [PoleEvent(z=z, order=2, germ_id="g0", residual=0.0)
                  for z in sorted(pts, key=lambda t: (abs(t), t.real))]

        def probe(z):
            zr = complex(z.real - round(z.real), z.imag - round(z.imag))
            return (zr, zr ** 2)

        pr = detect_periods(events, state_probe=probe)
        assert pr.rank == 2 and pr.verified
        assert abs(pr.ratio - 1j) < 1e-9

    def test_single_pole_inconclusive(self):
        events = [PoleEvent(z=0j, order=1, germ_id="g0", residual=0.0)]
        pr = detect_periods(events)
        assert pr.rank == 0 and not pr.verified


class TestVerdicts:
    def _report(self, text):
        eq = parse_equation(text)
        bs = branches_at_infinity(eq.P, 12)
        lead_const = eq.P.coeff_in_p(eq.P.deg_p()).degree() == 0
        return eq, screen_admissibility(eq.k, bs, leading_p_coeff_constant=lead_const)

    def test_entire_only(self):
        _eq, rep = self._report("y'' = y^4")
        v = assemble_verdict(rep, [])
        assert v.label == "entire_only" and v.confidence == "exact"

    def test_monomial_gives_rational(self):
        eq, rep = self._report("y' = y^2")
        mono = match_monomial(eq)
        v = assemble_verdict(rep, [], mono_matches=mono)
        assert v.label == "rational" and v.confidence == "exact"

    def test_monotonic_confidence(self):
        # adding numeric evidence never downgrades an exact verdict
        from bbsolve.classify import PeriodResult
        eq, rep = self._report("y' = y^2 - 1")
        exp = match_exponential(parse_equation("y'' = y"))   # any exact match
        one = PeriodResult(rank=1, periods=(3.14159j,), ratio=None,
                           verified=True, detail="")
        v1 = assemble_verdict(rep, [], exp_matches=exp, period_result=one)
        assert v1.confidence == "exact"
        events = [PoleEvent(z=1j * t, order=1, germ_id="g0", residual=0.0)
                  for t in range(4)]
        v2 = assemble_verdict(rep, [], exp_matches=exp, period_result=one,
                              pole_events=events)
        assert v2.confidence == "exact" and v2.label == v1.label

    def test_label_validation(self):
        from bbsolve.classify import ClassificationVerdict
        with pytest.raises(AssertionError):
            ClassificationVerdict(label="mystery", confidence="exact", evidence=())


class TestAgainstJacobiForm:
    def test_probe_matches_classical_special_function(self):
        # the lemniscatic solution of p^2 = 4q^3 - 4q in classical form:
        # y(z) = e3 + (e1 - e3)/sn(z sqrt(e1 - e3) | m)^2 with e = (1, 0, -1),
        # m = 1/2; the germ-anchored probe must reproduce it pointwise
        import mpmath
        eq = parse_equation("P: p^2 - 4*q^3 + 4*q ; k=1")
        bs = branches_at_infinity(eq.P, depth=40)
        germ, = enumerate_series(eq, bs[0], 2, N=24)
        events, _f, ngerms = sweep_poles(eq, [germ], budget=6)
        probe = make_probe(eq, events, ngerms)
        s2 = mpmath.sqrt(2)
        for z in (0.31 + 0.22j, 0.8 - 0.4j, 1.4 + 0.9j):
            got = probe(z)[0]
            sn = mpmath.ellipfun("sn", s2 * z, 0.5)
            want = complex(-1 + 2 / sn ** 2)
            assert abs(got - want) < 1e-8 * (1 + abs(want)), (z, got, want)


class TestEquianharmonicSymmetry:
    def test_hexagonal_lattice_for_pure_square_equation(self):
        # y'' = 6y^2 at c = 1 integrates to y'^2 = 4y^3 + 2: the cubic has
        # g2 = 0, so the pole lattice must be hexagonal: |ratio| = 1 and
        # Re(ratio) = +-1/2 exactly in the limit
        from bbsolve.curve import exactness_check
        eq = parse_equation("y'' = 6*y^2")
        bs = branches_at_infinity(eq.P, depth=40)
        germ, = enumerate_series(eq, bs[0], 2, c=GaussianRational(1), N=24)
        ev = exactness_check(bs, resolved=eq.resolved)
        events, _f, ngerms = sweep_poles(eq, [germ], budget=12,
                                         first_integral=ev.s_rational)
        probe = make_probe(eq, events, ngerms, first_integral=ev.s_rational)
        pr = detect_periods(events, state_probe=probe)
        assert pr.rank == 2 and pr.verified
        assert abs(abs(pr.ratio) - 1) < 1e-6
        assert abs(abs(pr.ratio.real) - 0.5) < 1e-6


class TestTrajectoryDump:
    def test_jsonl_records(self):
        import json as _json
        from bbsolve.classify import trajectory_to_jsonl
        eq = parse_equation("y' = y^2")
        bs = branches_at_infinity(eq.P, depth=12)
        germ, = enumerate_series(eq, bs[0], 1, N=10)
        traj = continue_trajectory(eq, germ, [0.3 + 0.1j, 1.2 + 0.4j])
        lines = trajectory_to_jsonl(traj).splitlines()
        assert len(lines) >= 2
        step = _json.loads(lines[0])
        assert set(step) == {"z", "state", "defect"}
        pole = _json.loads(lines[-1])
        assert set(pole) == {"z", "order", "germ", "residual"}
        assert pole["order"] == 1


class TestScaledLattice:
    def test_contracted_pole_lattice(self):
        # y'' = 600 y^2 - 200 is the lemniscatic equation contracted by 10:
        # every absolute threshold in the sweep must rescale off the germ
        import mpmath
        from bbsolve.curve import exactness_check
        eq = parse_equation("y'' = 600*y^2 - 200")
        bs = branches_at_infinity(eq.P, depth=40)
        germs = enumerate_series(eq, bs[0], 2, c=GaussianRational(0), N=24)
        ev = exactness_check(bs, resolved=eq.resolved)
        events, _f, ng = sweep_poles(eq, germs, budget=12,
                                     first_integral=ev.s_rational)
        probe = make_probe(eq, events, ng, first_integral=ev.s_rational)
        pr = detect_periods(events, state_probe=probe)
        assert pr.rank == 2 and pr.verified
        want = float(mpmath.pi / mpmath.agm(mpmath.sqrt(2), 1)) / 10
        for T in pr.periods:
            assert min(abs(T - want), abs(T - 1j * want)) < 1e-8
        assert abs(pr.ratio - 1j) < 1e-8
