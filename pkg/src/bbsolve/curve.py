"""Geometry of the curve P(p, q) = 0 over q = infinity.

Newton polygon of P, Newton-Puiseux expansion of every place of the curve
lying over q = infinity, residues of the differential p dq at those places,
and the exactness verdict for p dq.

Local coordinates: t = 1/q, and u = t^(1/m) at a place of ramification m, so
q = u^(-m).  A branch is stored once per place; its m conjugates are the
substitutions u -> zeta u.  Branch expansions are exact Gaussian rationals
whenever every edge-polynomial root along the way is, and certified
BigComplex values otherwise.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

from .algebra import (BigComplex, GR_ONE, GR_ZERO, GaussianRational,
                      UPoly, all_nth_roots, as_gaussian, coeff_is_zero,
                      is_exact, roots_univariate, solve_linear, DEFAULT_PREC)
from .errors import DegenerateInput, InsufficientDepth, PrecisionExhausted

_MAX_NP_RECURSION = 64


# ---------------------------------------------------------------------------
# fractional-exponent Laurent series in one local variable
# ---------------------------------------------------------------------------

class FracSeries:
    """Truncated series sum coeff * t^exp with rational exponents.

    ``valid_to`` is the inclusive exponent bound through which coefficients
    are complete; absent exponents below it are exact zeros.
    """

    __slots__ = ("terms", "valid_to")

    def __init__(self, terms, valid_to):
        cleaned = {}
        vt = Fraction(valid_to)
        for e, c in (terms.items() if isinstance(terms, dict) else terms):
            e = Fraction(e)
            if e > vt or coeff_is_zero(c):
                continue
            cleaned[e] = cleaned[e] + c if e in cleaned else c
            if coeff_is_zero(cleaned[e]):
                del cleaned[e]
        self.terms = cleaned
        self.valid_to = vt

    def items(self):
        return sorted(self.terms.items())

    def lead(self):
        """(exponent, coeff) of the lowest term; None for (truncation-)zero."""
        if not self.terms:
            return None
        e = min(self.terms)
        return e, self.terms[e]

    def coeff(self, e):
        return self.terms.get(Fraction(e), GR_ZERO)

    def truncate(self, bound):
        b = min(self.valid_to, Fraction(bound))
        return FracSeries({e: c for e, c in self.terms.items() if e <= b}, b)

    def __add__(self, other):
        vt = min(self.valid_to, other.valid_to)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return FracSeries(out, vt)

    def __neg__(self):
        return FracSeries({e: -c for e, c in self.terms.items()}, self.valid_to)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c, dexp=0):
        d = Fraction(dexp)
        return FracSeries({e + d: x * c for e, x in self.terms.items()},
                          self.valid_to + d)

    def __mul__(self, other):
        la = self.lead()
        lb = other.lead()
        if la is None or lb is None:
            a_lead = self.valid_to if la is None else la[0]
            b_lead = other.valid_to if lb is None else lb[0]
            return FracSeries({}, min(self.valid_to + b_lead, other.valid_to + a_lead))
        vt = min(self.valid_to + lb[0], other.valid_to + la[0])
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if e > vt:
                    continue
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return FracSeries(out, vt)

    _BIG = Fraction(10 ** 9)

    def pow_int(self, n):
        if n < 0:
            return self.inverse().pow_int(-n)
        out = FracSeries({Fraction(0): GR_ONE}, self._BIG)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def inverse(self):
        lead = self.lead()
        if lead is None:
            raise ZeroDivisionError("inverting a series with no visible terms")
        e0, c0 = lead
        rel = self.valid_to - e0
        # r = tail / lead term, r has positive leading exponent
        r = FracSeries({e - e0: c * (GR_ONE / c0 if isinstance(c0, GaussianRational)
                                     else c0 ** -1)
                        for e, c in self.terms.items() if e != e0}, rel)
        inv_c0 = (c0.inverse() if isinstance(c0, GaussianRational) else 1 / c0)
        acc = FracSeries({Fraction(0): GR_ONE}, rel)
        term = FracSeries({Fraction(0): GR_ONE}, rel)
        r_lead = r.lead()
        if r_lead is not None:
            steps = int(rel / r_lead[0]) + 1
            for _ in range(steps):
                term = (term * r).scale(GaussianRational(-1))
                if term.lead() is None:
                    break
                acc = acc + term
        return acc.scale(inv_c0, -e0)


# ---------------------------------------------------------------------------
# Newton polygon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Edge:
    i1: int
    j1: int
    i2: int
    j2: int
    slope: Fraction
    kappa: Fraction  # branch exponent candidate for places over q = infinity

    def width(self):
        return self.i2 - self.i1


@dataclass(frozen=True)
class NewtonPolygon:
    support: tuple
    upper_edges: tuple

    def kappa_candidates(self):
        return [e.kappa for e in self.upper_edges]


def newton_polygon(P):
    """Concave upper hull of the support of P, each edge annotated with kappa.

    kappa = (delta deg_q)/(-delta deg_p) is the exponent of p ~ A q^kappa on
    the branches over q = infinity induced by that edge.
    """
    if P.deg_p() < 1 or P.deg_q() < 1:
        raise DegenerateInput("P must be nonconstant in both p and q")
    support = P.support()
    top = {}
    for i, j in support:
        top[i] = max(top.get(i, j), j)
    pts = sorted(top.items())
    hull = []
    for i, j in pts:
        while len(hull) >= 2:
            (ia, ja), (ib, jb) = hull[-2], hull[-1]
            # keep strictly decreasing slopes: drop middle if not a right turn
            if (jb - ja) * (i - ib) <= (j - jb) * (ib - ia):
                hull.pop()
            else:
                break
        hull.append((i, j))
    edges = []
    for (i1, j1), (i2, j2) in zip(hull, hull[1:]):
        slope = Fraction(j2 - j1, i2 - i1)
        edges.append(Edge(i1, j1, i2, j2, slope, -slope))
    return NewtonPolygon(support=tuple(support), upper_edges=tuple(edges))


# ---------------------------------------------------------------------------
# Puiseux branches over q = infinity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PuiseuxBranch:
    """One place of the curve over q = infinity.

    p = sum of coeff * q^exp over ``terms`` (exponents kappa - i/m, strictly
    decreasing), valid through q-exponent >= valid_q_to.  ``residue`` is the
    residue of p dq at this place: -m * (coefficient of q^-1).
    """

    id: str
    m: int
    kappa: Fraction
    lead: object
    terms: tuple                # ((q_exponent, coeff), ...) descending
    p_unbounded: bool
    valid_q_to: Fraction
    depth: int

    def coeff_at_qexp(self, e):
        e = Fraction(e)
        for ee, c in self.terms:
            if ee == e:
                return c
        return GR_ZERO

    def is_exact(self):
        return all(is_exact(c) for _, c in self.terms)


def residue_pdq(branch):
    """Residue of p dq at the branch place: -m * [q^-1] p.

    Raises InsufficientDepth when the expansion stops above exponent -1.
    """
    if branch.valid_q_to > Fraction(-1):
        raise InsufficientDepth(
            f"branch {branch.id} expanded only to q-exponent {branch.valid_q_to}; "
            "the residue needs exponent -1")
    c = branch.coeff_at_qexp(-1)
    return c * GaussianRational(-branch.m) if is_exact(c) else c * (-branch.m)


def residue_is_certified_zero(branch):
    r = residue_pdq(branch)
    return coeff_is_zero(r)


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def branches_at_infinity(P, depth, precision=DEFAULT_PREC):
    """All places of P(p, q) = 0 over q = infinity, expanded to ``depth`` terms.

    Terms are counted on the u-grid (exponents kappa - i/m, i = 0..depth).
    Places where p stays bounded are included and flagged.
    """
    if P.deg_p() < 1 or P.deg_q() < 1:
        raise DegenerateInput("P must be nonconstant in both p and q")
    d = P.deg_p()
    dq = P.deg_q()
    kappa_max = max((e.kappa for e in newton_polygon(P).upper_edges
                     if e.kappa > 0), default=Fraction(0))
    raw = []
    if d == 1:
        raw.extend(_branches_linear(P, depth, kappa_max))
    else:
        # P~(p, t) = t^dq P(p, 1/t)
        Ptilde = {(i, dq - j): c for (i, j), c in P.terms.items()}
        raw.extend(_branches_unbounded(Ptilde, d, depth, kappa_max, precision))
        raw.extend(_branches_finite(Ptilde, d, depth, precision))
    # deterministic ids: sort by kappa descending, then lead coeff key
    def sort_key(item):
        kappa, series, m = item
        lead = series.lead()
        c = lead[1] if lead else GR_ZERO
        cx = complex(c) if not isinstance(c, BigComplex) else complex(c.val)
        return (-kappa, round(cx.real, 9), round(cx.imag, 9))
    raw.sort(key=sort_key)
    out = []
    for n_id, (kappa, pser, m) in enumerate(raw):
        terms = []
        cut = kappa - Fraction(depth, m)
        for e_t, c in pser.items():
            q_exp = -e_t
            if q_exp < cut:
                continue
            i_grid = (kappa - q_exp) * m
            if i_grid.denominator != 1 or i_grid < 0:
                raise PrecisionExhausted(
                    f"exponent {q_exp} off the u-grid of ramification {m}")
            terms.append((q_exp, c))
        terms.sort(key=lambda tc: tc[0], reverse=True)
        valid_q = max(-pser.valid_to, cut)
        lead = terms[0][1] if terms else GR_ZERO
        out.append(PuiseuxBranch(
            id=f"b{n_id}", m=m, kappa=kappa, lead=lead, terms=tuple(terms),
            p_unbounded=kappa > 0, valid_q_to=valid_q, depth=depth))
    _check_branch_count(out, d)
    return out


def _check_branch_count(branches, deg_p):
    total = sum(b.m for b in branches)
    if total != deg_p:
        raise PrecisionExhausted(
            f"found places of total ramification {total}, expected {deg_p}; "
            "raise precision")


def _branches_linear(P, depth, kappa_max):
    """deg_p = 1: p = N/D expanded at infinity by exact series division."""
    D = P.coeff_in_p(1)
    N = -P.coeff_in_p(0)
    vt = Fraction(int(math.ceil(kappa_max)) + depth + 3)
    num = FracSeries({Fraction(-j): c for j, c in enumerate(N.coeffs)}, vt)
    den = FracSeries({Fraction(-j): c for j, c in enumerate(D.coeffs)}, vt)
    if den.lead() is None:
        raise DegenerateInput("zero denominator in resolved form")
    pser = num * den.inverse()
    lead = pser.lead()
    if lead is None:
        kappa = Fraction(0)
    else:
        kappa = -lead[0]
    return [(kappa, pser, 1)]


def _branches_unbounded(Ptilde, d, depth, kappa_max, precision):
    """Places with p -> infinity: invert p = 1/v, expand v -> 0."""
    Phat = {(d - i, b): c for (i, b), c in Ptilde.items()}
    tau = Fraction(int(math.ceil(kappa_max)) + depth + 3)
    out = []
    for vser, m in _np_branches(Phat, tau, _MAX_NP_RECURSION, precision):
        pser = vser.inverse()
        lead = pser.lead()
        kappa = -lead[0]
        if kappa <= 0:
            continue  # not a p-unbounded place; covered by the finite scan
        out.append((kappa, pser, m))
    return out


def _branches_finite(Ptilde, d, depth, precision):
    """Places with p bounded: p = c + w(t), c a root of the top coefficient."""
    top_terms = [GR_ZERO] * (d + 1)
    for (i, b), c in Ptilde.items():
        if b == 0:
            top_terms[i] = top_terms[i] + c
    top = UPoly(top_terms)
    out = []
    if top.degree() < 1:
        return out
    tau = Fraction(depth + 3)
    roots = roots_univariate(top, precision)
    grouped = _group_roots(roots)
    for c_root, _mult in grouped:
        cval = c_root.exact if c_root.exact is not None else c_root
        Hc = _shift_p(Ptilde, cval)
        for wser, m in _np_branches(Hc, tau, _MAX_NP_RECURSION, precision):
            pser = wser + FracSeries({Fraction(0): cval}, wser.valid_to)
            lead = pser.lead()
            kappa = Fraction(0) if (lead and lead[0] == 0) else -(lead[0] if lead else 0)
            out.append((kappa, pser, m))
    return out


def _shift_p(H, c):
    out = {}
    for (a, b), coeff in H.items():
        for r in range(a + 1):
            key = (r, b)
            add = coeff * _binom(a, r) * (c ** (a - r)) if a - r else coeff * _binom(a, r)
            out[key] = out[key] + add if key in out else add
    return {k: v for k, v in out.items() if not coeff_is_zero(v)}


def _binom(n, r):
    return math.comb(n, r)


def _group_roots(roots):
    """Collapse the multiplicity-repeated output of roots_univariate."""
    groups = []
    for r in roots:
        placed = False
        for g in groups:
            r0 = g[0]
            if r.exact is not None and r0.exact is not None:
                same = r.exact == r0.exact
            else:
                same = abs(r.val - r0.val) <= (r.err + r0.err)
                if same and (r.err + r0.err) == 0:
                    same = r.val == r0.val
            if same:
                g[1] += 1
                placed = True
                break
        if not placed:
            groups.append([r, 1])
    # overlapping but unequal numeric roots cannot be told apart
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            ra, rb = groups[a][0], groups[b][0]
            if ra.exact is not None and rb.exact is not None:
                continue
            if abs(ra.val - rb.val) <= 2 * (ra.err + rb.err) and abs(ra.val - rb.val) != 0:
                raise PrecisionExhausted("root clusters overlap; raise precision")
    return [(g[0], g[1]) for g in groups]


# ---------------------------------------------------------------------------
# Newton-Puiseux recursion at the origin
# ---------------------------------------------------------------------------

def _np_substitute(H, c, s, m):
    """H(t^s (c + w), t^m), i.e. recenter on the chosen edge root."""
    out = {}
    for (a, b), coeff in H.items():
        base_t = s * a + m * b
        for r in range(a + 1):
            key = (r, base_t)
            add = coeff * _binom(a, r)
            if a - r:
                add = add * (c ** (a - r))
            out[key] = out[key] + add if key in out else add
    return {k: v for k, v in out.items() if not coeff_is_zero(v)}


def _np_branches(H, tau, fuel, precision):
    """Branches w(t) -> 0 of H(w, t) = 0 with exponents <= tau computed.

    H: dict {(deg_w, deg_t): coeff}.  Returns list of (FracSeries, m).
    """
    if fuel <= 0:
        raise PrecisionExhausted("branch separation did not terminate")
    H = _strip_t(H)
    H, _wmult = _strip_w(H)
    if not H:
        return []
    by_a = {}
    for (a, b), c in H.items():
        by_a[a] = min(by_a.get(a, b), b)
    pts = sorted(by_a.items())
    hull = _lower_hull(pts)
    out = []
    for (a1, b1), (a2, b2) in zip(hull, hull[1:]):
        if b2 >= b1:
            continue  # gamma <= 0: not a w -> 0 continuation
        gamma = Fraction(b1 - b2, a2 - a1)
        s, m = gamma.numerator, gamma.denominator
        line_val = s * a1 + m * b1
        comp = {}
        for (a, b), c in H.items():
            if s * a + m * b == line_val and a1 <= a <= a2:
                idx = (a - a1) // m
                if (a - a1) % m:
                    continue
                comp[idx] = comp[idx] + c if idx in comp else c
        Ex = [comp.get(i, GR_ZERO) for i in range(max(comp) + 1)]
        roots = _edge_roots(Ex, precision)
        for Xroot, r in roots:
            c = _pick_mth_root(Xroot, m, precision)
            Hs = _strip_t(_np_substitute(H, c, s, m))
            tau_child = m * tau - s
            prefix = FracSeries({gamma: c}, tau)
            if tau_child < 0:
                out.append((prefix, m))
                continue
            if _is_zero_at_w0(Hs):
                out.append((prefix, m))
                if r != 1:
                    raise PrecisionExhausted(
                        "terminating branch of multiplicity > 1: input not squarefree")
                continue
            if r == 1:
                tail = _newton_lift(Hs, tau_child)
                out.append((_compose(prefix, tail, gamma, m, tau), m))
            else:
                for sub, msub in _np_branches(Hs, tau_child, fuel - 1, precision):
                    out.append((_compose(prefix, sub, gamma, m, tau), m * msub))
    return out


def _compose(prefix, sub, gamma, m, tau):
    """w = t^gamma * (c + sub(t^(1/m))) given prefix = {gamma: c}."""
    terms = dict(prefix.terms)
    for e, c in sub.terms.items():
        ee = gamma + e / m
        if ee <= tau:
            terms[ee] = terms[ee] + c if ee in terms else c
    vt = min(tau, gamma + sub.valid_to / m)
    return FracSeries(terms, vt)


def _strip_t(H):
    if not H:
        return H
    c = min(b for (_, b) in H)
    if c == 0:
        return dict(H)
    return {(a, b - c): v for (a, b), v in H.items()}


def _strip_w(H):
    if not H:
        return H, 0
    e = min(a for (a, _) in H)
    if e == 0:
        return dict(H), 0
    return {(a - e, b): v for (a, b), v in H.items()}, e


def _lower_hull(pts):
    hull = []
    for a, b in pts:
        while len(hull) >= 2:
            (aa, ba), (ab, bb) = hull[-2], hull[-1]
            if (bb - ba) * (a - ab) >= (b - bb) * (ab - aa):
                hull.pop()
            else:
                break
        hull.append((a, b))
    return hull


def _edge_roots(Ex, precision):
    """Nonzero roots of the ramification-compressed edge polynomial, grouped."""
    while Ex and coeff_is_zero(Ex[0]):
        Ex = Ex[1:]
    roots = roots_univariate(Ex, precision)
    grouped = _group_roots([r for r in roots if not r.is_zero()])
    return grouped


def _pick_mth_root(X, m, precision):
    """Deterministic representative among the conjugate leading coefficients."""
    val = X.exact if (isinstance(X, BigComplex) and X.exact is not None) else X
    if m == 1:
        return val if is_exact(val) else val
    cands = all_nth_roots(val, m, precision)
    for c in cands:
        if isinstance(c, BigComplex) and c.exact is not None:
            return c.exact
    return cands[0]


def _is_zero_at_w0(H):
    return all(a > 0 for (a, _b) in H)


def _newton_lift(H, tau):
    """Unique power-series root w(t) -> 0 of H with dH/dw(0,0) != 0.

    Correct coefficients double per Newton step; validity bookkeeping is
    managed through the step order pi, not through the intermediate series.
    """
    tau = Fraction(tau)
    big = FracSeries._BIG
    by_a = {}
    for (a, b), c in H.items():
        by_a.setdefault(a, {})[Fraction(b)] = c
    amax = max(by_a)
    coeff_series = {a: FracSeries(bs, big) for a, bs in by_a.items()}
    dcoeff_series = {a: s.scale(GaussianRational(a))
                     for a, s in coeff_series.items() if a >= 1}
    x = FracSeries({}, big)
    pi = Fraction(0)
    guard = 0
    while pi < tau:
        pi = min(2 * pi + 1, tau)
        guard += 1
        if guard > 64:
            raise PrecisionExhausted("Newton lifting failed to converge")
        hv = _bihorner(coeff_series, amax, x, big, cap=pi + 1).truncate(pi + 1)
        hw = _bihorner(dcoeff_series, amax, x, big, shift=1, cap=pi + 1).truncate(pi + 1)
        x = FracSeries((x - hv * hw.inverse()).truncate(pi).terms, big)
    return x.truncate(tau)


def _bihorner(coeff_series, amax, x, valid, shift=0, cap=None):
    acc = None
    for a in range(amax, shift - 1, -1):
        cs = coeff_series.get(a)
        if acc is None:
            acc = cs if cs is not None else FracSeries({}, valid)
            continue
        acc = acc * x
        if cap is not None:
            acc = FracSeries({e: c for e, c in acc.terms.items() if e <= cap},
                             acc.valid_to)
        if cs is not None:
            acc = acc + cs
    return acc if acc is not None else FracSeries({}, valid)


# ---------------------------------------------------------------------------
# exactness of p dq
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidueRow:
    place: str            # "q=<value>" or "infinity" or branch id
    value: object         # residue (exact or BigComplex)
    certified_zero: bool


@dataclass(frozen=True)
class ExactnessVerdict:
    residues: tuple       # of ResidueRow
    exact: bool
    s_rational: object    # (N, D) UPoly pair for s = integral of p dq, or None
    mode: str             # "resolved" | "general"
    notes: tuple

    def s_string(self):
        if self.s_rational is None:
            return None
        from .eqparse import ratfunc_str
        return ratfunc_str(*self.s_rational)


def hermite_ostrogradsky(N, D):
    """Split N/D (proper or not) as  d/dq(P1/D1) + poly + P2/D2,  D2 squarefree.

    Returns (poly_part: UPoly, P1: UPoly, D1: UPoly, P2: UPoly, D2: UPoly).
    The logarithmic part P2/D2 carries exactly the finite residues.
    """
    if D.is_zero():
        raise ZeroDivisionError("zero denominator")
    lcinv = D.lc().inverse()
    N, D = N * lcinv, D * lcinv
    Qp, A = divmod(N, D)
    if A.is_zero():
        return Qp, UPoly(), UPoly.constant(GR_ONE), UPoly(), UPoly.constant(GR_ONE)
    D1 = D.gcd(D.derivative())
    D2 = D // D1
    n1, n2 = D1.degree(), D2.degree()
    if n1 == 0:
        return Qp, UPoly(), UPoly.constant(GR_ONE), A, D
    # A = P1' D2 - P1 H + P2 D1,  H = D1' D2 / D1
    H = (D1.derivative() * D2) // D1
    n = n1 + n2
    rows = [[GR_ZERO] * n for _ in range(n)]
    rhs = [A[i] for i in range(n)]
    for jcol in range(n1):  # P1 coefficient j
        dP = UPoly.monomial(jcol - 1, GaussianRational(jcol)) if jcol >= 1 else UPoly()
        col = dP * D2 - UPoly.monomial(jcol) * H
        for i in range(n):
            rows[i][jcol] = col[i]
    for jcol in range(n2):  # P2 coefficient j
        col = UPoly.monomial(jcol) * D1
        for i in range(n):
            rows[i][n1 + jcol] = col[i]
    sol = solve_linear(rows, rhs)
    P1 = UPoly(sol[:n1])
    P2 = UPoly(sol[n1:])
    return Qp, P1, D1, P2, D2


def laurent_at_infinity(N, D, down_to):
    """Expansion of N/D in powers of q down to exponent ``down_to``, exact.

    Returns FracSeries in t = 1/q (so q^j appears at t-exponent -j).
    """
    if D.is_zero():
        raise ZeroDivisionError("zero denominator")
    vt = Fraction(-down_to + 1)
    num = FracSeries({Fraction(-j): c for j, c in enumerate(N.coeffs)}, vt)
    den = FracSeries({Fraction(-j): c for j, c in enumerate(D.coeffs)}, vt)
    return num * den.inverse()


def residue_at_infinity_resolved(N, D):
    """Exact residue of (N/D) dq at q = infinity: -[q^-1](N/D)."""
    ser = laurent_at_infinity(N, D, down_to=-2)
    c = ser.coeff(Fraction(1))
    return -c if not coeff_is_zero(c) else GR_ZERO


def exactness_check(branches, resolved=None, precision=DEFAULT_PREC):
    """Is the differential p dq exact?

    Resolved mode: exact iff the logarithmic part of the Ostrogradsky
    decomposition vanishes and the residue at infinity is zero; the explicit
    rational integral s is returned.  General mode: only the places over
    q = infinity are checked (genus-0 assumed; finite places not examined).
    """
    rows = []
    notes = []
    if resolved is not None:
        N, D = resolved
        Qp, P1, D1, P2, D2 = hermite_ostrogradsky(N, D)
        exact = P2.is_zero()
        if D2.degree() >= 1:
            D2p = D2.derivative()
            for root in roots_univariate(D2, precision):
                alpha = root.exact if root.exact is not None else root
                if P2.is_zero():
                    rows.append(ResidueRow(_place_label(alpha), GR_ZERO, True))
                    continue
                dval = D2p.eval(alpha)
                rval = P2.eval(alpha)
                res = rval * (dval.inverse() if isinstance(dval, GaussianRational)
                              else 1 / dval)
                rows.append(ResidueRow(_place_label(alpha), res, coeff_is_zero(res)))
        res_inf = residue_at_infinity_resolved(N, D)
        rows.append(ResidueRow("infinity", res_inf, coeff_is_zero(res_inf)))
        exact = exact and coeff_is_zero(res_inf)
        s_rat = None
        if exact:
            SP = Qp.integrate()
            s_num = SP * D1 + P1
            s_rat = (s_num, D1)
        return ExactnessVerdict(residues=tuple(rows), exact=exact,
                                s_rational=s_rat, mode="resolved", notes=tuple(notes))
    # general mode
    allzero = True
    for b in branches:
        r = residue_pdq(b)
        z = coeff_is_zero(r)
        allzero = allzero and z
        rows.append(ResidueRow(b.id, r, z))
    notes.append("general mode: residues checked at places over q=infinity only; "
                 "genus-0 assumed, finite places not examined")
    return ExactnessVerdict(residues=tuple(rows), exact=allzero,
                            s_rational=None, mode="general", notes=tuple(notes))


def _place_label(alpha):
    if is_exact(alpha):
        from .eqparse import gaussian_str
        return f"q={gaussian_str(as_gaussian(alpha))}"
    return f"q~{complex(alpha.val):.6g}"


def first_integral_series(branch):
    """Termwise integral s of p dq along the branch: s = sum c/(e+1) q^(e+1).

    Requires the residue term (q-exponent -1) to vanish.
    """
    out = []
    for e, c in branch.terms:
        if e == Fraction(-1):
            if coeff_is_zero(c):
                continue
            raise InsufficientDepth(
                "p dq has a nonzero residue on this branch; no termwise integral")
        factor = Fraction(1) / (e + 1)
        out.append((e + 1, c * GaussianRational(factor) if is_exact(c) else c * factor))
    return tuple(out)
