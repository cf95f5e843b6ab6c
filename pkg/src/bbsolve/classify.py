"""Classification of solution germs into class-W shapes.

Exact matchers first: one-term monomial solutions c z^-n, and exponential
solutions of affine equations y^(k) = lambda y + mu (pure e^(az) modes with
a^k = lambda).  Numeric evidence second: high-order Taylor continuation of
the germ through the plane, pole crossing by matching the exact Laurent germ
near each pole, and a lattice fit on the recorded pole set.  Two independent
periods with nonreal ratio mean elliptic; one period means rational in
e^(az); a single non-recurring pole with rational tail means rational.

Numeric verdicts are labelled confidence="numeric"; only back-substituted
identities are "exact".
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (BigComplex, GR_ONE, GR_ZERO, GaussianRational, UPoly,
                      coeff_is_zero, falling, is_exact, roots_univariate,
                      DEFAULT_PREC)
from .conditions import classify_kappa
from .errors import SingularEncounter, ToleranceLoss
from .eqparse import upoly_str

DEFAULT_TRAJ_TOL = 1e-10
DEFAULT_RATIO_TOL = 1e-4


# ---------------------------------------------------------------------------
# exact monomial matcher
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialMatch:
    n: int
    defining_poly: UPoly      # vanishes exactly on the admissible c values
    roots: tuple              # coefficient values (exact or BigComplex)

    def describe(self):
        return (f"y = c*z^-{self.n} with c a root of "
                f"{upoly_str(self.defining_poly, 'c')} = 0")


def match_monomial(eq, precision=DEFAULT_PREC):
    """Exact one-term solutions c z^-n of P(y^(k), y) = 0.

    For each pole order n admitted by the Newton polygon, substitute
    y = c z^-n, group by z-exponent, and take the gcd of the resulting
    polynomials in c; its nonzero roots are exactly the monomial solutions.
    """
    from .curve import newton_polygon
    k = eq.k
    out = []
    seen_n = set()
    for edge in newton_polygon(eq.P).upper_edges:
        label, n = classify_kappa(k, edge.kappa)
        if label != "kappa_one_plus_k_over_n" or n in seen_n:
            continue
        seen_n.add(n)
        D0 = GaussianRational(falling(-n, k))
        buckets = {}
        for (i, j), a in sorted(eq.P.terms.items()):
            expo = -(n + k) * i - n * j
            cpoly = UPoly.monomial(i + j, a * (D0 ** i))
            buckets[expo] = buckets.get(expo, UPoly()) + cpoly
        g = UPoly()
        for expo in sorted(buckets):
            g = buckets[expo].gcd(g) if not g.is_zero() else buckets[expo].monic()
            if g.degree() == 0:
                break
        _v, core = g.shift_valuation()
        if core.degree() < 1:
            continue
        for expo in sorted(buckets):  # exactness assertion: gcd divides every bucket
            assert (buckets[expo] % core).is_zero()
        roots = [r for r in roots_univariate(core, precision) if not r.is_zero()]
        vals = tuple(r.exact if r.exact is not None else r for r in roots)
        if vals:
            out.append(MonomialMatch(n=n, defining_poly=core, roots=vals))
    return out


# ---------------------------------------------------------------------------
# exact exponential matcher
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentialMatch:
    a_poly: UPoly             # defining polynomial of the multiplier a
    a_values: tuple           # its roots
    R_num: UPoly              # y = R_num(w)/R_den(w) at w = e^(az)
    R_den: UPoly
    exact: bool

    def describe(self):
        body = upoly_str(self.R_num, "w")
        if self.R_den.degree() > 0 or self.R_den.lc() != GR_ONE:
            body = f"({body})/({upoly_str(self.R_den, 'w')})"
        return (f"y = {body} with w = e^(a*z), a a root of "
                f"{upoly_str(self.a_poly, 'a')} = 0")


def stirling2(k, j):
    """Stirling number of the second kind S(k, j)."""
    total = 0
    for r in range(j + 1):
        total += (-1) ** (j - r) * math.comb(j, r) * r ** k
    return total // math.factorial(j)


def theta_pow(R_num, R_den, k):
    """(w d/dw)^k applied to R = R_num/R_den, via the Stirling expansion
    Theta^k R = sum_j S(k, j) w^j R^(j)(w); returns a (num, den) pair."""
    num = UPoly()
    den = UPoly.constant(GR_ONE)
    dnum, dden = R_num, R_den
    for j in range(1, k + 1):
        dnum, dden = _dq_rat(dnum, dden)
        s = stirling2(k, j)
        if s == 0:
            continue
        wj = UPoly.monomial(j, GaussianRational(s))
        num = num * dden + den * (wj * dnum)
        den = den * dden
        num, den = _reduce_rat(num, den)
    return num, den


def _dq_rat(N, D):
    return _reduce_rat(N.derivative() * D - N * D.derivative(), D * D)


def _reduce_rat(N, D):
    if N.is_zero():
        return UPoly(), UPoly.constant(GR_ONE)
    g = N.gcd(D)
    if g.degree() >= 1:
        N, D = N // g, D // g
    lcinv = D.lc().inverse()
    return N * lcinv, D * lcinv


def match_exponential(eq, degree_cap=6, precision=DEFAULT_PREC, notes=None):
    """Exact solutions y = R(e^(az)).

    Affine right-hand sides y^(k) = lambda y + mu give the complete family of
    pure modes (R(w) = w - mu/lambda, a^k = lambda), certified exactly.  For
    nonlinear equations the identity system in (a, R) is not searched
    symbolically here; numeric period evidence may still reconstruct and
    certify an R (see reconstruct_exponential).  No match within the cap is
    reported through ``notes``, not as a failure.
    """
    out = []
    if eq.resolved is not None:
        N, D = eq.resolved
        if D.degree() == 0 and N.degree() == 1:
            lam = N[1]
            mu = N[0]
            if not lam.is_zero():
                a_poly = UPoly([-lam] + [GR_ZERO] * (eq.k - 1) + [GR_ONE])
                roots = roots_univariate(a_poly, precision)
                vals = tuple(r.exact if r.exact is not None else r for r in roots)
                shift = -(mu * lam.inverse())
                R_num = UPoly([shift, GR_ONE])
                out.append(ExponentialMatch(a_poly=a_poly, a_values=vals,
                                            R_num=R_num,
                                            R_den=UPoly.constant(GR_ONE),
                                            exact=True))
                # certification: a^k Theta^k R = lambda R + mu modulo a^k = lambda.
                # Theta R = w; both sides reduce to lambda w + (lambda shift + mu) = lambda w.
                assert (lam * shift + mu).is_zero()
    if not out and notes is not None:
        notes.append(f"no exact exponential match within degree cap {degree_cap}")
    return out


def reconstruct_exponential(eq, probe, period, degree_cap=6, precision=DEFAULT_PREC):
    """Try to certify y = R(e^(az)) from a verified period: a = 2 pi i / T.

    Samples the trajectory, fits a rational R of degree <= cap at sample
    points, recognises the coefficients exactly, and back-substitutes through
    the Stirling expansion.  Returns an ExponentialMatch or None.
    """
    a_num = 2j * cmath.pi / complex(period)
    a_g = _recognise_gaussian(a_num)
    if a_g is None:
        return None
    for deg_n in range(1, degree_cap + 1):
        for deg_d in range(0, degree_cap + 1):
            fit = _fit_rational_in_w(eq, probe, a_num, deg_n, deg_d)
            if fit is None:
                continue
            Rn, Rd = fit
            if _certify_exponential(eq, a_g, Rn, Rd):
                a_poly = UPoly([-a_g, GR_ONE])
                return ExponentialMatch(a_poly=a_poly, a_values=(a_g,),
                                        R_num=Rn, R_den=Rd, exact=True)
    return None


def _recognise_gaussian(z, bound=10 ** 6, tol=1e-9):
    fr = Fraction(z.real).limit_denominator(bound)
    fi = Fraction(z.imag).limit_denominator(bound)
    if abs(float(fr) - z.real) < tol and abs(float(fi) - z.imag) < tol:
        return GaussianRational(fr, fi)
    return None


def _fit_rational_in_w(eq, probe, a, deg_n, deg_d, nsample=None, tol=1e-8):
    """Least-structure rational interpolation y_i (w_i - ...) linear system."""
    unknowns = deg_n + 1 + deg_d  # denominator monic
    nsample = nsample or unknowns + 4
    samples = []
    base = 0.37 + 0.21j
    for idx in range(nsample):
        z = base + idx * (0.501 + 0.113j)
        st = probe(z)
        if st is None:
            return None
        w = cmath.exp(a * z)
        samples.append((w, st[0]))
    rows = []
    rhs = []
    for w, yv in samples:
        row = [w ** j for j in range(deg_n + 1)]
        row += [-yv * w ** j for j in range(deg_d)]
        rows.append(row)
        rhs.append(yv * w ** deg_d)
    sol = _lstsq_complex(rows, rhs)
    if sol is None:
        return None
    resid = max(abs(sum(r * s for r, s in zip(row, sol)) - b)
                for row, b in zip(rows, rhs))
    if resid > tol * max(1.0, max(abs(b) for b in rhs)):
        return None
    coeffs = []
    for v in sol:
        g = _recognise_gaussian(v)
        if g is None:
            return None
        coeffs.append(g)
    Rn = UPoly(coeffs[:deg_n + 1])
    Rd = UPoly(coeffs[deg_n + 1:] + [GR_ONE])
    return _reduce_rat(Rn, Rd)


def _lstsq_complex(rows, rhs):
    """Normal-equation solve in double precision; None when ill-posed."""
    m = len(rows)
    n = len(rows[0])
    ata = [[sum(rows[i][r].conjugate() * rows[i][c] for i in range(m))
            for c in range(n)] for r in range(n)]
    atb = [sum(rows[i][r].conjugate() * rhs[i] for i in range(m)) for r in range(n)]
    # Gaussian elimination with partial pivoting
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(ata[r][col]))
        if abs(ata[piv][col]) < 1e-13:
            return None
        ata[col], ata[piv] = ata[piv], ata[col]
        atb[col], atb[piv] = atb[piv], atb[col]
        inv = 1 / ata[col][col]
        ata[col] = [x * inv for x in ata[col]]
        atb[col] *= inv
        for r in range(n):
            if r != col and ata[r][col] != 0:
                f = ata[r][col]
                ata[r] = [ata[r][j] - f * ata[col][j] for j in range(n)]
                atb[r] -= f * atb[col]
    return atb


def _certify_exponential(eq, a_g, Rn, Rd):
    """Exact back-substitution of y = R(w), w = e^(az): a^k Theta^k R == F(R)."""
    tn, td = theta_pow(Rn, Rd, eq.k)
    ak = a_g ** eq.k
    lhs_n, lhs_d = tn * ak, td
    # F(R) with F = P-resolved N/D evaluated at R
    if eq.resolved is None:
        return False
    N, D = eq.resolved
    fn, fd = _compose_rat(N, Rn, Rd)
    gn, gd = _compose_rat(D, Rn, Rd)
    rhs_n, rhs_d = _reduce_rat(fn * gd, fd * gn)
    diff_n = lhs_n * rhs_d - rhs_n * lhs_d
    return diff_n.is_zero()


def _compose_rat(U, Rn, Rd):
    """U(R) for a polynomial U and rational R = Rn/Rd, as a reduced pair.

    U(R) = sum_j U_j Rn^j Rd^(d-j) / Rd^d.
    """
    d = U.degree()
    if d < 0:
        return UPoly(), UPoly.constant(GR_ONE)
    rn_pows = [UPoly.constant(GR_ONE)]
    rd_pows = [UPoly.constant(GR_ONE)]
    for _ in range(d):
        rn_pows.append(rn_pows[-1] * Rn)
        rd_pows.append(rd_pows[-1] * Rd)
    num = UPoly()
    for j in range(d + 1):
        if U[j].is_zero():
            continue
        num = num + rn_pows[j] * rd_pows[d - j] * U[j]
    return _reduce_rat(num, rd_pows[d])


# ---------------------------------------------------------------------------
# germ evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NumericGerm:
    germ_id: str
    n: int
    coeffs: tuple      # complex, index j <-> exponent j - n
    trust: float = 0.8  # offset radius where the truncated tail is negligible

    def eval(self, u):
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc * u ** (-self.n)

    def eval_derivs(self, u, count):
        """Value and the first ``count`` derivatives at offset u from the pole."""
        out = []
        coeffs = list(self.coeffs)
        start = -self.n
        for _ in range(count + 1):
            acc = 0j
            for idx in range(len(coeffs) - 1, -1, -1):
                acc = acc * u + coeffs[idx]
            out.append(acc * u ** start)
            coeffs = [coeffs[idx] * (start + idx) for idx in range(len(coeffs))]
            start -= 1
        return out


def _germ_trust(coeffs):
    """Safe evaluation radius from the coefficient growth rate.

    Coefficients of a germ with convergence radius rho grow like rho^-j
    (times slowly varying factors), so |c_j1 / c_j2|^(1/(j2-j1)) estimates
    rho, most reliably between the highest-index coefficients.  Evaluating
    inside 0.4 rho keeps the dropped tail many orders below the kept terms.
    """
    idx = [j for j, c in enumerate(coeffs) if abs(c) > 1e-280]
    ests = []
    for a in idx[-5:]:
        for b in idx[-5:]:
            if b - a >= 3:
                ests.append(abs(coeffs[a] / coeffs[b]) ** (1.0 / (b - a)))
    if not ests:
        return 0.8
    ests.sort()
    rho = ests[len(ests) // 2]
    if rho > 1e6:
        return 0.8
    return max(min(0.4 * rho, 2.0), 1e-3)


def germ_numeric(ls, germ_id=None):
    if ls.has_free_parameter():
        raise ValueError("free-parameter germ cannot be evaluated numerically; pin c")
    cs = []
    for c in ls.coeffs:
        cs.append(complex(c) if is_exact(c) else complex(c.val))
    return NumericGerm(germ_id=germ_id or ls.branch_id, n=ls.n, coeffs=tuple(cs),
                       trust=_germ_trust(cs))


# ---------------------------------------------------------------------------
# Taylor-series continuation with pole hopping
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PoleEvent:
    z: complex
    order: int
    germ_id: str
    residual: float


@dataclass(frozen=True)
class Trajectory:
    steps: tuple          # ((z, state tuple), ...)
    pole_events: tuple    # PoleEvent
    max_defect: float
    completed: bool


class _Flow:
    """Taylor stepping of the system behind P(y^(k), y) = 0 in machine complex.

    Resolved mode integrates y^(k) = N(y)/D(y) on the state
    (y, y', ..., y^(k-1)); general mode carries p along with
    p' = -(dP/dq / dP/dp) y' and projects P(p, y) ~ 0 each step.
    """

    def __init__(self, eq, tol=DEFAULT_TRAJ_TOL, order=22, first_integral=None):
        self.k = eq.k
        self.tol = tol
        self.order = max(order, eq.k + 6)
        self.resolved = None
        if eq.resolved is not None:
            N, D = eq.resolved
            self.resolved = ([complex(c) for c in N.coeffs],
                             [complex(c) for c in D.coeffs])
        self.P_terms = [(i, j, complex(c)) for (i, j), c in sorted(eq.P.terms.items())]
        Pp = eq.P.partial_p()
        Pq = eq.P.partial_q()
        self.Pp_terms = [(i, j, complex(c)) for (i, j), c in sorted(Pp.terms.items())]
        self.Pq_terms = [(i, j, complex(c)) for (i, j), c in sorted(Pq.terms.items())]
        self._fact = [math.factorial(i) for i in range(self.order + self.k + 2)]
        # first-integral projection data: (s_num, s_den) complex coefficient
        # lists for s(y); the constant is pinned per trajectory via set_fi_state
        self.fi = None
        self.fi_c = None
        if first_integral is not None and self.k % 2 == 0:
            sN, sD = first_integral
            self.fi = ([complex(c) for c in sN.coeffs] or [0j],
                       [complex(c) for c in sD.coeffs] or [1.0 + 0j])

    def phi_value(self, state):
        """Phi_k evaluated on (y, y', ..., y^(k-1))."""
        k = self.k
        half = k // 2
        acc = 0j
        for i in range(1, half):
            term = state[k - i] * state[i]
            acc += term if i % 2 == 1 else -term
        mid = state[half] * state[half]
        acc += 0.5 * mid if half % 2 == 1 else -0.5 * mid
        return acc

    def s_value(self, y):
        sN, sD = self.fi
        nv = 0j
        for c in reversed(sN):
            nv = nv * y + c
        dv = 0j
        for c in reversed(sD):
            dv = dv * y + c
        return nv / dv

    def set_fi_state(self, state):
        if self.fi is not None:
            self.fi_c = self.phi_value(state) - self.s_value(state[0])

    def project_first_integral(self, state):
        """One Newton correction of y^(k-1) onto Phi_k(state) = s(y) + c."""
        if self.fi is None or self.fi_c is None:
            return state
        yp = state[1] if self.k >= 2 else None
        if yp is None or abs(yp) < 1e-8:
            return state
        f = self.phi_value(state) - self.s_value(state[0]) - self.fi_c
        st = list(state)
        st[self.k - 1] = st[self.k - 1] - f / yp
        return tuple(st)

    # -- series helpers ---------------------------------------------------

    @staticmethod
    def _conv_at(a, b, j):
        lo = max(0, j - len(b) + 1)
        hi = min(j, len(a) - 1)
        return sum(a[i] * b[j - i] for i in range(lo, hi + 1))

    def _poly_series(self, coeffs, ypows, j):
        """Coefficient j of sum coeffs[d] * y^d given cached powers of y."""
        acc = 0j
        for d, c in enumerate(coeffs):
            if c == 0:
                continue
            acc += c * (ypows[d][j] if j < len(ypows[d]) else 0j)
        return acc

    def taylor(self, state, p0=None):
        """Taylor coefficients Y[0..order] at the current point.

        Returns (Y, Pser) where Pser is the series of p (curve mode) or None.
        """
        k, M = self.k, self.order
        Y = [state[i] / self._fact[i] for i in range(k)] + [0j] * (M - k + 1)
        if self.resolved is not None:
            Ncf, Dcf = self.resolved
            degmax = max(len(Ncf), len(Dcf)) - 1
            ypows = [[1.0 + 0j] + [0j] * M, Y] \
                + [[0j] * (M + 1) for _ in range(max(degmax - 1, 0))]
            W = [0j] * (M + 1)
            D0 = Dcf[0]
            for j in range(0, M - k + 1):
                for d in range(2, degmax + 1):
                    ypows[d][j] = self._conv_at(ypows[d - 1], Y, j)
                if j == 0 and len(Dcf) > 1:
                    D0 = self._poly_series(Dcf, ypows, 0)
                Nj = self._poly_series(Ncf, ypows, j)
                if len(Dcf) == 1:
                    Wj = Nj / Dcf[0]
                else:
                    if abs(D0) < 1e-280:
                        raise SingularEncounter(
                            "denominator of the resolved form vanishes on the path")
                    Wj = (Nj - sum(self._poly_series(Dcf, ypows, i) * W[j - i]
                                   for i in range(1, j + 1))) / D0
                W[j] = Wj
                Y[j + k] = Wj * self._fact[j] / self._fact[j + k]
            return Y, None
        # general curve mode
        if p0 is None:
            raise ValueError("curve mode needs the p component in the state")
        dp = max(i for i, _, _ in self.P_terms)
        dq = max(j for _, j, _ in self.P_terms)
        Pser = [p0] + [0j] * M
        ypows = [[1.0 + 0j] + [0j] * M, Y] \
            + [[0j] * (M + 1) for _ in range(max(dq, 1) - 1)]
        ppows = [[1.0 + 0j] + [0j] * M, Pser] \
            + [[0j] * (M + 1) for _ in range(max(dp, 1) - 1)]
        num = [0j] * (M + 1)   # series of -P_q(p, y) * y'
        den = [0j] * (M + 1)   # series of P_p(p, y)
        quo = [0j] * (M + 1)
        for j in range(0, M - k + 1):
            Y[j + k] = Pser[j] * self._fact[j] / self._fact[j + k]
            for d in range(2, max(dq, 1) + 1):
                ypows[d][j] = self._conv_at(ypows[d - 1], Y, j)
            for d in range(2, max(dp, 1) + 1):
                ppows[d][j] = self._conv_at(ppows[d - 1], Pser, j)
            den[j] = sum(c * self._conv_at(ppows[i], ypows[jq], j)
                         for i, jq, c in self.Pp_terms)
            yprime = [(idx + 1) * Y[idx + 1] for idx in range(j + 1)]
            pq_series = [sum(c * self._conv_at(ppows[i], ypows[jq], idx)
                             for i, jq, c in self.Pq_terms) for idx in range(j + 1)]
            num[j] = -sum(pq_series[idx] * yprime[j - idx] for idx in range(j + 1))
            if abs(den[0]) < 1e-280:
                raise SingularEncounter("dP/dp = 0 on the path: curve branch point")
            quo[j] = (num[j] - sum(den[i] * quo[j - i] for i in range(1, j + 1))) / den[0]
            Pser[j + 1] = quo[j] / (j + 1)
        return Y, Pser

    # -- stepping ---------------------------------------------------------

    def radius_estimate(self, Y):
        M = len(Y) - 1
        best = None
        for j in range(M, max(M - 6, 2), -1):
            if Y[j] != 0 and Y[j - 1] != 0:
                r = abs(Y[j - 1] / Y[j])
                best = r if best is None else min(best, r)
        return best if best is not None else 1e6

    def singularity_estimate(self, Y):
        """Domb-Sykes fit: location offset d and apparent order n of the
        nearest singularity, from the top Taylor ratios."""
        M = len(Y) - 1
        ratios = []
        for j in range(M - 7, M + 1):
            if 2 <= j <= M and Y[j - 1] != 0 and abs(Y[j]) > 1e-290:
                ratios.append((j, Y[j] / Y[j - 1]))
        if len(ratios) < 3:
            return None, None
        xs = [1.0 / j for j, _ in ratios]
        us = [u for _, u in ratios]
        nn = len(xs)
        sx = sum(xs); sxx = sum(x * x for x in xs)
        su = sum(us); sxu = sum(x * u for x, u in zip(xs, us))
        det = nn * sxx - sx * sx
        if abs(det) < 1e-30:
            return None, None
        slope = (nn * sxu - sx * su) / det
        intercept = (su * sxx - sx * sxu) / det
        if abs(intercept) < 1e-12:
            return None, None
        d = 1.0 / intercept
        order = (slope / intercept).real + 1.0
        return d, order

    def advance(self, z, state, p_cur, h):
        Y, Pser = self.taylor(state, p_cur)
        k = self.k
        new_state = []
        for i in range(k):
            acc = 0j
            for j in range(len(Y) - 1, i - 1, -1):
                acc = acc * h + Y[j] * self._fact[j] / self._fact[j - i]
            new_state.append(acc)
        p_new = None
        if Pser is not None:
            p_new = sum(Pser[j] * h ** j for j in range(len(Pser)))
            p_new = self._project(p_new, new_state[0])
        return tuple(new_state), p_new

    def _project(self, p, y):
        for _ in range(3):
            f = sum(c * p ** i * y ** j for i, j, c in self.P_terms)
            fp = sum(c * p ** i * y ** j for i, j, c in self.Pp_terms)
            if fp == 0:
                break
            p = p - f / fp
        return p

    def defect(self, p, y):
        val = abs(sum(c * p ** i * y ** j for i, j, c in self.P_terms))
        scale = sum(abs(c) * abs(p) ** i * abs(y) ** j for i, j, c in self.P_terms)
        return val / scale if scale > 0 else val

    def p_value(self, state):
        """p = y^(k) from the resolved form (resolved mode only)."""
        Ncf, Dcf = self.resolved
        y = state[0]
        nv = 0j
        for c in reversed(Ncf):
            nv = nv * y + c
        dv = 0j
        for c in reversed(Dcf):
            dv = dv * y + c
        if dv == 0:
            raise SingularEncounter("resolved denominator vanished")
        return nv / dv


def _unit(z):
    a = abs(z)
    return z / a if a > 0 else 1.0 + 0j


def match_pole(germs, z, state, d_est, n_est, k, p_obs=None, tol=1e-7,
               trust=None):
    """Locate the pole near z by Newton-matching the exact germ.

    Returns (z_pole, germ, residual) or None.  The germ argument u = z - z_p
    starts from the asymptotic root closest to the series-based estimate;
    matches outside the germ's trust radius are rejected, and the full state
    (plus p when supplied) must agree, which disambiguates even germs.
    """
    y_obs = state[0]
    order_pref = int(round(n_est)) if n_est is not None else None
    ranked = sorted(germs, key=lambda g: (g.n != order_pref,))
    best = None
    for g in ranked:
        g_trust = trust if trust is not None else g.trust
        c0 = g.coeffs[0]
        if y_obs == 0:
            continue
        base = c0 / y_obs
        try:
            r0 = base ** (1.0 / g.n)
        except (OverflowError, ZeroDivisionError):
            continue
        cands = [r0 * cmath.exp(2j * cmath.pi * t / g.n) for t in range(g.n)]
        if d_est is not None:
            cands.sort(key=lambda u: abs(u - (-d_est)))
        for u0 in cands:
            if abs(u0) > g_trust:
                continue
            u = u0
            ok = True
            for _ in range(60):
                vals = g.eval_derivs(u, 1)
                f = vals[0] - y_obs
                fp = vals[1]
                if fp == 0:
                    ok = False
                    break
                du = f / fp
                u = u - du
                if abs(u) > 2 * g_trust:
                    ok = False
                    break
                if abs(du) < 1e-15 * (1 + abs(u)):
                    break
            if not ok or abs(u) < 1e-12 or abs(u) > g_trust:
                continue
            depth = max(k - 1, 0) if p_obs is None else k
            vals = g.eval_derivs(u, depth)
            resid = abs(vals[0] - y_obs) / (1 + abs(y_obs))
            statedev = 0.0
            for i in range(1, min(k, len(state))):
                statedev = max(statedev,
                               abs(vals[i] - state[i]) / (1 + abs(state[i])))
            if p_obs is not None:
                statedev = max(statedev, abs(vals[k] - p_obs) / (1 + abs(p_obs)))
            score = max(resid, statedev)
            if score < tol and (best is None or score < best[2]):
                best = (z - u, g, score)
    return best


def run_segment(flow, z0, state, p0, z1, germs, events, tol=DEFAULT_TRAJ_TOL,
                max_steps=400, record=None):
    """Integrate from z0 to z1 along the straight segment, hopping poles.

    ``events``: mutable list of PoleEvent, deduplicated in place.  Returns
    (state, p, max_defect, completed).
    """
    z = z0
    p = p0
    max_defect = 0.0
    dirv = _unit(z1 - z0)
    total_len = abs(z1 - z0)
    hop_guard = 0
    passes = 0
    for _ in range(max_steps):
        remaining = ((z1 - z) / dirv).real
        if remaining < 1e-12 * (1 + total_len):
            if abs(z1 - z) < 1e-9 * (1 + total_len) or passes >= 2:
                return state, p, max_defect, True
            # hops pulled the path sideways; correct toward the exact target
            passes += 1
            dirv = _unit(z1 - z)
            continue
        Y, Pser = flow.taylor(state, p)
        rho = flow.radius_estimate(Y)
        d_est, n_est = flow.singularity_estimate(Y)
        reach = 0.75 * max(g.trust for g in germs)
        near_pole = (d_est is not None and abs(d_est) < reach
                     and rho < 1.7 * reach and abs(d_est) < 3 * rho)
        if near_pole:
            hit = match_pole(germs, z, state, d_est, n_est, flow.k, p_obs=p)
            if hit is not None:
                z_p, g, resid = hit
                _record_event(events, PoleEvent(z=z_p, order=g.n,
                                                germ_id=g.germ_id, residual=resid))
                # hop only when the pole obstructs the path ahead; poles just
                # behind (e.g. the anchor we started from) are records only
                t_along = ((z_p - z) / dirv).real
                off_path = abs((z_p - z) - t_along * dirv)
                if (-0.02 * g.trust <= t_along <= remaining + 0.1 * g.trust
                        and off_path < 0.35 * abs(d_est) + 1e-9):
                    hop_guard += 1
                    if hop_guard > 60:
                        raise ToleranceLoss("pole hopping did not progress")
                    u_new = max(abs(z - z_p), 0.06 * g.trust)
                    z_new = z_p + u_new * dirv
                    vals = g.eval_derivs(z_new - z_p, max(flow.k - 1, 0))
                    state = tuple(vals[:flow.k])
                    if flow.resolved is None:
                        pv = g.eval_derivs(z_new - z_p, flow.k)[flow.k]
                        p = flow._project(pv, state[0])
                    z = z_new
                    if record is not None:
                        record.append((z, state))
                    continue
        h_mag = min(0.35 * rho, remaining)
        # truncation control: the omitted tail behaves like |Y_M| h^M / (1 - h/rho)
        M = len(Y) - 1
        scale = max(abs(Y[0]), abs(state[-1]), 1.0)
        if Y[M] != 0:
            h_err = (0.02 * tol * scale / abs(Y[M])) ** (1.0 / M)
            h_mag = min(h_mag, max(h_err, 1e-3 * rho))
        if h_mag <= 1e-13 * (1 + abs(z)):
            raise ToleranceLoss(f"step collapsed near z={z:.6g}")
        h = h_mag * dirv
        state, p_new = flow.advance(z, state, p, h)
        state = flow.project_first_integral(state)
        z = z + h
        if flow.resolved is None:
            p = p_new
            dft = flow.defect(p, state[0])
            max_defect = max(max_defect, dft)
            if dft > max(tol, 1e-8):
                raise ToleranceLoss(f"consistency defect {dft:.2e} exceeds tolerance")
        if record is not None:
            record.append((z, state))
    raise ToleranceLoss("segment step budget exhausted")


def _record_event(events, ev):
    for i, old in enumerate(events):
        if abs(old.z - ev.z) < 3e-5 * (1 + abs(ev.z)):
            if ev.residual < old.residual:
                events[i] = ev
            return False
    events.append(ev)
    return True


def continue_trajectory(eq, seed_series, path, tol=DEFAULT_TRAJ_TOL, germs=None):
    """Continue the germ ``seed_series`` (pole at 0) along a polyline.

    ``path``: list of complex waypoints; the start must sit where the
    truncated germ still evaluates accurately (|z| well inside the first
    lattice scale).  Returns a Trajectory.
    """
    flow = _Flow(eq, tol)
    g0 = germ_numeric(seed_series, "seed")
    allg = [g0] + [g for g in (germs or []) if g.germ_id != "seed"]
    z0 = complex(path[0])
    vals = g0.eval_derivs(z0, max(eq.k, flow.k))
    state = tuple(vals[:flow.k])
    p = None
    if flow.resolved is None:
        p = flow._project(vals[flow.k], state[0])
    events = [PoleEvent(z=0j, order=g0.n, germ_id=g0.germ_id, residual=0.0)]
    record = [(z0, state)]
    max_defect = 0.0
    completed = True
    cur = z0
    for wp in path[1:]:
        state, p, dft, done = run_segment(flow, cur, state, p, complex(wp),
                                          allg, events, tol, record=record)
        max_defect = max(max_defect, dft)
        cur = complex(wp)
        if not done:
            completed = False
            break
    return Trajectory(steps=tuple(record), pole_events=tuple(events),
                      max_defect=max_defect, completed=completed)


def sweep_poles(eq, germ_family, tol=DEFAULT_TRAJ_TOL, budget=13, probe_len=8.0,
                max_segments=70, first_integral=None):
    """Breadth-first pole hunt around the seed pole at 0.

    Probes 8 rays from every discovered pole; each ray is integrated with
    pole hopping and every crossing recorded.  Deterministic processing
    order.  Returns (events, flow) with events sorted by (|z|, arg).
    """
    flow = _Flow(eq, tol, first_integral=first_integral)
    germs = [germ_numeric(ls, f"g{i}") for i, ls in enumerate(germ_family)]
    if flow.fi is not None:
        u_fi = 0.55 * germs[0].trust * (0.902 + 0.431j)
        v0 = germs[0].eval_derivs(u_fi, max(flow.k - 1, 1))
        flow.set_fi_state(tuple(v0[:flow.k]))
    # detuned off the symmetry axes: straight rays through curve branch
    # points (dP/dp = 0) would stall the continuation
    dirs = [cmath.exp(1j * (cmath.pi * t / 4 + 0.0537)) for t in range(8)]
    events = [PoleEvent(z=0j, order=germs[0].n, germ_id=germs[0].germ_id,
                        residual=0.0)]
    processed = set()
    segments = 0
    scale = None
    while segments < max_segments and len(events) < budget:
        todo = sorted((ev for ev in events if _zkey(ev.z) not in processed),
                      key=lambda ev: (abs(ev.z), cmath.phase(ev.z + 1e-12)))
        if not todo:
            break
        ev = todo[0]
        processed.add(_zkey(ev.z))
        g = next(gg for gg in germs if gg.germ_id == ev.germ_id)
        # the trust radius is ~0.4x the nearest-pole distance, so 6.5 trust
        # spans two or three cells of the (still unknown) lattice
        reach = min(probe_len, 6.5 * g.trust) if scale is None else 2.6 * scale
        start_off = min(0.31, 0.4 * g.trust)
        if scale is not None:
            start_off = min(start_off, 0.18 * scale)
        for dirv in dirs:
            if segments >= max_segments or len(events) >= budget + 3:
                break
            segments += 1
            z_s = ev.z + start_off * dirv
            vals = g.eval_derivs(z_s - ev.z, max(flow.k, eq.k))
            state = tuple(vals[:flow.k])
            p = None
            if flow.resolved is None:
                p = flow._project(vals[flow.k], state[0])
            try:
                run_segment(flow, z_s, state, p, ev.z + reach * dirv, germs,
                            events, tol, max_steps=500)
            except (ToleranceLoss, SingularEncounter, OverflowError):
                continue
        if scale is None:
            others = [abs(e.z - events[0].z) for e in events[1:]]
            if others:
                scale = min(others)
    events.sort(key=lambda e: (round(abs(e.z), 9), round(cmath.phase(e.z + 1e-12), 9)))
    return events, flow, germs


def _zkey(z):
    return (round(z.real, 7), round(z.imag, 7))


# ---------------------------------------------------------------------------
# period detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodResult:
    rank: int                 # 0, 1, or 2
    periods: tuple            # () | (T,) | (T1, T2)
    ratio: complex | None     # T2/T1 for rank 2
    verified: bool
    detail: str


def detect_periods(pole_events, tol=DEFAULT_RATIO_TOL, state_probe=None,
                   state_tol=1e-6):
    """Fit the pole set to a rank-1 or rank-2 lattice and verify by state match.

    Distances are fit by integer-relation on pairwise differences; candidate
    periods are confirmed only when the full trajectory state agrees at
    z and z + T for three test points (when a probe is available).
    """
    pts = [ev.z for ev in pole_events]
    if len(pts) < 2:
        return PeriodResult(0, (), None, False, "fewer than two poles")
    seen = {}
    for a in pts:
        for b in pts:
            if abs(a - b) > 1e-9:
                seen.setdefault(_ckey(a - b), a - b)
    diffs = sorted(seen.values(), key=lambda d: (abs(d), cmath.phase(d)))
    T1 = diffs[0]
    # rank-1 test
    rank1 = all(_near_int_multiple(d, T1, tol) for d in diffs)
    if rank1:
        T1 = _canon_sign(T1)
        ok = _verify_period(state_probe, pts, T1, state_tol)
        return PeriodResult(1, (T1,), None, ok,
                            "all pole differences are integer multiples of one period")
    T2 = None
    for d in diffs[1:]:
        r = d / T1
        if abs(r.imag) > 0.02:
            T2 = d
            break
    if T2 is None:
        return PeriodResult(0, (), None, False, "no independent second difference")
    T1, T2 = _gauss_reduce(T1, T2)
    fit_ok = all(_lattice_fits(d, T1, T2, tol) for d in diffs)
    if not fit_ok:
        return PeriodResult(0, (), None, False,
                            "pole set does not fit a rank-2 lattice within tolerance")
    T1 = _canon_sign(T1)
    T2 = _canon_sign(T2)
    if _basis_key(T2) < _basis_key(T1):
        T1, T2 = T2, T1
    if (T2 / T1).imag < 0:
        T2 = -T2
    ok = (_verify_period(state_probe, pts, T1, state_tol)
          and _verify_period(state_probe, pts, T2, state_tol))
    return PeriodResult(2, (T1, T2), T2 / T1, ok,
                        "pole set fits a rank-2 lattice")


def _basis_key(T):
    return (round(abs(T), 9), round(abs(cmath.phase(T)), 9))


def _ckey(z):
    return (round(z.real, 8), round(z.imag, 8))


def _near_int_multiple(d, T, tol):
    r = d / T
    return abs(r.imag) <= tol and abs(r.real - round(r.real)) <= tol


def _lattice_fits(d, T1, T2, tol):
    det = T1.real * T2.imag - T1.imag * T2.real
    if abs(det) < 1e-12:
        return False
    a = (d.real * T2.imag - d.imag * T2.real) / det
    b = (T1.real * d.imag - T1.imag * d.real) / det
    return abs(a - round(a)) <= tol and abs(b - round(b)) <= tol


def _gauss_reduce(T1, T2):
    for _ in range(64):
        if abs(T2) < abs(T1):
            T1, T2 = T2, T1
        mu = round((T2 * T1.conjugate()).real / abs(T1) ** 2)
        T2n = T2 - mu * T1
        if T2n == T2:
            break
        T2 = T2n
    return T1, T2


def _canon_sign(T):
    thresh = 1e-7 * abs(T)
    if T.real < -thresh or (abs(T.real) <= thresh and T.imag < 0):
        return -T
    return T


def _verify_period(state_probe, pts, T, state_tol):
    if state_probe is None:
        return False
    base = pts[0]
    s = min(1.0, abs(T))
    tests = [base + s * (0.31 + 0.17j), base + s * (0.52 - 0.11j),
             base + s * (-0.23 + 0.41j)]
    checked = 0
    for z in tests:
        s1 = state_probe(z)
        s2 = state_probe(z + T)
        if s1 is None or s2 is None:
            continue
        dev = max(abs(a - b) / (1 + abs(a)) for a, b in zip(s1, s2))
        if dev > state_tol:
            return False
        checked += 1
    return checked >= 2


def make_probe(eq, events, germs, tol=DEFAULT_TRAJ_TOL, first_integral=None):
    """State evaluator z -> (y, y', ..., y^(k-1)) via germ-anchored continuation."""
    flow = _Flow(eq, tol, first_integral=first_integral)
    if flow.fi is not None:
        u_fi = 0.55 * germs[0].trust * (0.902 + 0.431j)
        v0 = germs[0].eval_derivs(u_fi, max(flow.k - 1, 1))
        flow.set_fi_state(tuple(v0[:flow.k]))

    def probe(z):
        z = complex(z)
        ev = min(events, key=lambda e: abs(z - e.z))
        g = next(gg for gg in germs if gg.germ_id == ev.germ_id)
        r = abs(z - ev.z)
        if r < 1e-6:
            return None
        off = min(0.31, 0.4 * g.trust, max(0.9 * r, 1e-3))
        z_s = ev.z + off * _unit(z - ev.z)
        vals = g.eval_derivs(z_s - ev.z, max(flow.k, eq.k))
        state = tuple(vals[:flow.k])
        p = None
        if flow.resolved is None:
            p = flow._project(vals[flow.k], state[0])
        if abs(z_s - z) < 1e-12:
            return state
        try:
            scratch = list(events)
            state, p, _, done = run_segment(flow, z_s, state, p, z, germs,
                                            scratch, tol, max_steps=300)
        except (ToleranceLoss, SingularEncounter, OverflowError):
            return None
        return state if done else None

    return probe


# ---------------------------------------------------------------------------
# verdict assembly
# ---------------------------------------------------------------------------

LABELS = ("rational", "rational_in_exponential", "elliptic", "entire_only",
          "none_with_pole", "undetermined")


@dataclass(frozen=True)
class ClassificationVerdict:
    label: str
    confidence: str            # "exact" | "numeric" | "heuristic"
    evidence: tuple            # human-readable findings, ordered
    degree_bound: int | None = None
    periods: tuple = ()

    def __post_init__(self):
        assert self.label in LABELS


def assemble_verdict(report, series_list, mono_matches=(), exp_matches=(),
                     period_result=None, pole_events=(), notes=()):
    """Combine screening, exact matches, and numeric period evidence.

    Priority: screening failures; then exact closed forms valid at the
    analysed first-integral constant; then verified periods (numeric); then
    a single non-recurring pole (rational, numeric); else undetermined.
    """
    evidence = list(notes)
    for m in mono_matches:
        evidence.append("exact monomial solution: " + m.describe())
    for m in exp_matches:
        evidence.append("exact exponential solution: " + m.describe())
    if not report.pole_solutions_possible:
        label = "none_with_pole" if (report.residue_obstruction
                                     or not report.integrality_ok) else "entire_only"
        if label == "entire_only" and report.admissible_n:
            label = "none_with_pole"
        conf = "exact"
        return ClassificationVerdict(label=label, confidence=conf,
                                     evidence=tuple(evidence),
                                     degree_bound=report.degree_bound)
    if period_result is not None and period_result.rank == 2 and period_result.verified:
        evidence.append(
            f"rank-2 pole lattice: T1={period_result.periods[0]:.9g}, "
            f"T2={period_result.periods[1]:.9g}, ratio={period_result.ratio:.9g}")
        return ClassificationVerdict(label="elliptic", confidence="numeric",
                                     evidence=tuple(evidence),
                                     degree_bound=report.degree_bound,
                                     periods=period_result.periods)
    if period_result is not None and period_result.rank == 1 and period_result.verified:
        exact_exp = any(m.exact for m in exp_matches)
        evidence.append(f"rank-1 pole lattice: T={period_result.periods[0]:.9g}")
        return ClassificationVerdict(label="rational_in_exponential",
                                     confidence="exact" if exact_exp else "numeric",
                                     evidence=tuple(evidence),
                                     degree_bound=report.degree_bound,
                                     periods=period_result.periods)
    if mono_matches:
        evidence.append("single-term pole germ solves the equation exactly")
        return ClassificationVerdict(label="rational", confidence="exact",
                                     evidence=tuple(evidence),
                                     degree_bound=report.degree_bound)
    if len(pole_events) == 1:
        evidence.append("continuation found a single non-recurring pole")
        return ClassificationVerdict(label="rational", confidence="numeric",
                                     evidence=tuple(evidence),
                                     degree_bound=report.degree_bound)
    return ClassificationVerdict(label="undetermined", confidence="heuristic",
                                 evidence=tuple(evidence),
                                 degree_bound=report.degree_bound)


def trajectory_to_jsonl(traj):
    """JSON-lines dump: one record per step, then one per pole event."""
    import json
    lines = []
    for z, state in traj.steps:
        lines.append(json.dumps({"z": [z.real, z.imag],
                                 "state": [[s.real, s.imag] for s in state],
                                 "defect": traj.max_defect}))
    for ev in traj.pole_events:
        lines.append(json.dumps({"z": [ev.z.real, ev.z.imag], "order": ev.order,
                                 "germ": ev.germ_id, "residual": ev.residual}))
    return "\n".join(lines)
