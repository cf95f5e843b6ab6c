"""Exact and arbitrary-precision arithmetic kernel.

Number types
------------
Exact rationals are stdlib ``fractions.Fraction`` (already reduced, positive
denominator).  ``GaussianRational`` pairs two Fractions as an exact complex
rational.  ``BigComplex`` is an mpmath-backed complex float of configurable
binary precision carrying a conservative absolute error bound; when a value
is recognised as exactly rational the witness is kept on the ``exact``
attribute.

Polynomials
-----------
``UPoly`` is a univariate polynomial with GaussianRational coefficients
(ascending coefficient tuple, no trailing zeros).  ``BiPoly`` is a bivariate
polynomial in (p, q) stored as a sparse map (deg_p, deg_q) -> coefficient
with no zero entries.

Root finding is simultaneous Aberth-Ehrlich iteration seeded on a circle,
followed by Newton polishing, with a-posteriori error disks from the
Weierstrass correction; exact rational/Gaussian-rational roots are
recognised and certified by exact back-substitution.
"""

from fractions import Fraction
import math

import mpmath
from mpmath import mp

from .errors import DegenerateInput, PrecisionExhausted

DEFAULT_PREC = 256  # bits


def pochhammer(n, k):
    """Rising factorial n (n+1) ... (n+k-1); equals (k+n-1)!/(n-1)!.  k=0 gives 1."""
    if n < 1 or k < 0:
        raise ValueError("pochhammer requires n >= 1, k >= 0")
    out = 1
    for i in range(k):
        out *= n + i
    return out


def falling(e, k):
    """Falling factorial e (e-1) ... (e-k+1) of an integer exponent e."""
    out = 1
    for i in range(k):
        out *= e - i
    return out


def binom_frac(alpha, r):
    """Binomial coefficient C(alpha, r) for rational alpha, integer r >= 0."""
    alpha = Fraction(alpha)
    num = Fraction(1)
    for i in range(r):
        num *= (alpha - i) / (i + 1)
    return num


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussianRational is immutable")

    # -- predicates ------------------------------------------------------
    def is_zero(self):
        return self.re == 0 and self.im == 0

    def is_rational(self):
        return self.im == 0

    def is_integer(self):
        return self.im == 0 and self.re.denominator == 1

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by exact zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    # -- conversions -----------------------------------------------------
    def to_mpc(self, prec=DEFAULT_PREC):
        with mp.workprec(prec):
            return mpmath.mpc(mpmath.mpf(self.re.numerator) / self.re.denominator,
                              mpmath.mpf(self.im.numerator) / self.im.denominator)

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*i)"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


def _rnd(mag, prec):
    # conservative per-operation rounding slack: a few ulps of the magnitude
    return mag * mpmath.mpf(2) ** (4 - prec)


class BigComplex:
    """Arbitrary-precision complex value with a conservative absolute error bound.

    ``err`` bounds the distance to the represented exact value; every
    operation propagates it outward (never shrinks it).  ``exact`` optionally
    carries a GaussianRational witness when the value is known exactly.
    """

    __slots__ = ("val", "err", "prec", "exact")

    def __init__(self, val, err=0, prec=DEFAULT_PREC, exact=None):
        # never reconstruct an existing mpc/mpf: mpmath would re-round it to
        # the ambient context precision
        if not isinstance(val, mpmath.mpc):
            with mp.workprec(int(prec) + 8):
                val = mpmath.mpc(val)
        if not isinstance(err, mpmath.mpf):
            with mp.workprec(64):
                err = mpmath.mpf(err)
        object.__setattr__(self, "val", val)
        object.__setattr__(self, "err", err)
        object.__setattr__(self, "prec", int(prec))
        object.__setattr__(self, "exact", exact)
        if self.err < 0:
            raise ValueError("error bound must be nonnegative")

    def __setattr__(self, *a):
        raise AttributeError("BigComplex is immutable")

    @staticmethod
    def from_exact(x, prec=DEFAULT_PREC):
        g = x if isinstance(x, GaussianRational) else GaussianRational(x)
        with mp.workprec(prec + 8):
            v = g.to_mpc(prec + 8)
            e = _rnd(abs(v), prec) if not _fraction_fits(g, prec) else mpmath.mpf(0)
        return BigComplex(v, e, prec, exact=g)

    # -- coercion --------------------------------------------------------
    @staticmethod
    def _coerce(x, prec):
        if isinstance(x, BigComplex):
            return x
        if isinstance(x, (int, Fraction, GaussianRational)):
            return BigComplex.from_exact(x, prec)
        if isinstance(x, (float, complex, mpmath.mpf, mpmath.mpc)):
            return BigComplex(mpmath.mpc(x), 0, prec)
        return None

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other, self.prec)
        if o is None:
            return NotImplemented
        prec = max(self.prec, o.prec)
        with mp.workprec(prec + 8):
            v = self.val + o.val
            e = self.err + o.err + _rnd(abs(v), prec)
        return BigComplex(v, e, prec)

    __radd__ = __add__

    def __neg__(self):
        return BigComplex(-self.val, self.err, self.prec)

    def __sub__(self, other):
        o = self._coerce(other, self.prec)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other, self.prec)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other, self.prec)
        if o is None:
            return NotImplemented
        prec = max(self.prec, o.prec)
        with mp.workprec(prec + 8):
            v = self.val * o.val
            e = (abs(self.val) * o.err + abs(o.val) * self.err
                 + self.err * o.err + _rnd(abs(v), prec))
        return BigComplex(v, e, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other, self.prec)
        if o is None:
            return NotImplemented
        prec = max(self.prec, o.prec)
        with mp.workprec(prec + 8):
            denom_low = abs(o.val) - o.err
            if denom_low <= 0:
                raise PrecisionExhausted("division by a value not certified nonzero")
            v = self.val / o.val
            e = (self.err + abs(v) * o.err) / denom_low + _rnd(abs(v), prec)
        return BigComplex(v, e, prec)

    def __rtruediv__(self, other):
        o = self._coerce(other, self.prec)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (BigComplex(1, 0, self.prec) / self) ** (-n)
        out = BigComplex(1, 0, self.prec)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def root(self, b, index=0):
        """One b-th root (mpmath determination rotated by the index-th unit root)."""
        prec = self.prec
        with mp.workprec(prec + 16):
            if abs(self.val) == 0:
                return BigComplex(0, self.err, prec)
            if 2 * self.err >= abs(self.val):
                raise PrecisionExhausted("radicand not certified away from zero")
            r = mpmath.root(self.val, b, k=index)
            e = abs(r) * (self.err / abs(self.val)) / b + _rnd(abs(r), prec)
        return BigComplex(r, e, prec)

    def conjugate(self):
        return BigComplex(mpmath.conj(self.val), self.err, self.prec, exact=None)

    # -- predicates ------------------------------------------------------
    def abs_upper(self):
        return abs(self.val) + self.err

    def abs_lower(self):
        lo = abs(self.val) - self.err
        return lo if lo > 0 else mpmath.mpf(0)

    def is_zero(self):
        """Certified-zero flag: exactly zero, or indistinguishable from zero."""
        if self.exact is not None:
            return self.exact.is_zero()
        return abs(self.val) <= self.err

    def is_nonzero(self):
        return abs(self.val) > self.err

    def __complex__(self):
        return complex(self.val)

    def __repr__(self):
        return f"BigComplex({mpmath.nstr(self.val, 17)}, err={mpmath.nstr(self.err, 3)})"


def _fraction_fits(g, prec):
    # a Gaussian rational converts exactly when num/den are representable
    def fits(fr):
        d = fr.denominator
        return d & (d - 1) == 0 and fr.numerator.bit_length() <= prec
    return fits(g.re) and fits(g.im)


def is_exact(x):
    return isinstance(x, (int, Fraction, GaussianRational))


def as_gaussian(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, BigComplex) and x.exact is not None:
        return x.exact
    raise TypeError(f"not an exact value: {x!r}")


def coeff_is_zero(x):
    """Certified-zero test across the coefficient union type."""
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, GaussianRational):
        return x.is_zero()
    if isinstance(x, BigComplex):
        return x.is_zero()
    raise TypeError(f"unsupported coefficient {x!r}")


def coeff_to_mpc(x, prec=DEFAULT_PREC):
    if isinstance(x, BigComplex):
        return x.val
    if isinstance(x, GaussianRational):
        return x.to_mpc(prec)
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x).to_mpc(prec)
    return mpmath.mpc(x)


def coeff_err(x):
    return x.err if isinstance(x, BigComplex) else mpmath.mpf(0)


# ---------------------------------------------------------------------------
# univariate polynomials over the Gaussian rationals
# ---------------------------------------------------------------------------

class UPoly:
    """Univariate polynomial with exact GaussianRational coefficients.

    Coefficients ascending; no stored trailing zeros; () is the zero
    polynomial.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [c if isinstance(c, GaussianRational) else GaussianRational(c)
              for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("UPoly is immutable")

    @staticmethod
    def monomial(deg, coeff=GR_ONE):
        return UPoly([GR_ZERO] * deg + [coeff])

    @staticmethod
    def constant(c):
        return UPoly([c])

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -1

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else GR_ZERO

    def lc(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        if not isinstance(other, UPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, UPoly):
            other = UPoly.constant(GaussianRational._coerce(other))
        n = max(len(self.coeffs), len(other.coeffs))
        return UPoly([self[i] + other[i] for i in range(n)])

    def __neg__(self):
        return UPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, UPoly):
            other = UPoly.constant(GaussianRational._coerce(other))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            g = GaussianRational._coerce(other)
            return UPoly([c * g for c in self.coeffs])
        if not isinstance(other, UPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return UPoly()
        out = [GR_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UPoly(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        quo = [GR_ZERO] * max(0, len(rem) - len(other.coeffs) + 1)
        dlc = other.lc().inverse()
        db = other.degree()
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c.is_zero():
                continue
            f = c * dlc
            quo[i - db] = f
            for j, b in enumerate(other.coeffs):
                rem[i - db + j] = rem[i - db + j] - f * b
        return UPoly(quo), UPoly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self):
        if self.is_zero():
            return self
        inv = self.lc().inverse()
        return UPoly([c * inv for c in self.coeffs])

    def derivative(self):
        return UPoly([self.coeffs[i] * i for i in range(1, len(self.coeffs))])

    def integrate(self):
        """Antiderivative with zero constant term."""
        return UPoly([GR_ZERO] + [c * Fraction(1, i + 1)
                                  for i, c in enumerate(self.coeffs)])

    def eval(self, x):
        """Horner evaluation; works for exact and BigComplex arguments."""
        if not self.coeffs:
            return GR_ZERO if is_exact(x) else BigComplex(0, 0)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def xgcd(self, other):
        """Extended gcd: returns (g, u, v) monic g with u*self + v*other = g."""
        r0, r1 = self, other
        s0, s1 = UPoly.constant(GR_ONE), UPoly()
        t0, t1 = UPoly(), UPoly.constant(GR_ONE)
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        inv = r0.lc().inverse()
        return r0.monic(), s0 * inv, t0 * inv

    def squarefree_decomposition(self):
        """Yun's algorithm: list of (factor, multiplicity), factors monic squarefree."""
        if self.degree() < 1:
            return []
        f = self.monic()
        fp = f.derivative()
        a = f.gcd(fp)
        if a.degree() == 0:
            return [(f, 1)]
        out = []
        b = f // a
        c = fp // a
        d = c - b.derivative()
        i = 1
        while b.degree() >= 1:
            a_i = b.gcd(d)
            if a_i.degree() >= 1:
                out.append((a_i.monic(), i))
            b = b // a_i
            c = d // a_i
            d = c - b.derivative()
            i += 1
        return out

    def shift_valuation(self):
        """Split x^v: returns (v, self // x^v)."""
        v = 0
        while v < len(self.coeffs) and self.coeffs[v].is_zero():
            v += 1
        if v == 0:
            return 0, self
        return v, UPoly(self.coeffs[v:])

    def rational_normalize(self):
        """Scale by a positive rational so coefficients are Gaussian integers with gcd 1."""
        if self.is_zero():
            return self
        den = 1
        for c in self.coeffs:
            den = den * c.re.denominator // math.gcd(den, c.re.denominator)
            den = den * c.im.denominator // math.gcd(den, c.im.denominator)
        num = 0
        for c in self.coeffs:
            num = math.gcd(num, abs(c.re.numerator * (den // c.re.denominator)))
            num = math.gcd(num, abs(c.im.numerator * (den // c.im.denominator)))
        if num == 0:
            return self
        return self * Fraction(den, num)

    def __repr__(self):
        return f"UPoly({list(self.coeffs)!r})"


def upoly_from_roots(roots):
    out = UPoly.constant(GR_ONE)
    for r in roots:
        out = out * UPoly([-GaussianRational._coerce(r), GR_ONE])
    return out


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def _aberth(coeffs_mpc, prec, coeff_err_bound):
    """All roots of a (near-)squarefree monic polynomial given by mpc coefficients.

    Returns list of (mpc root, mpf error radius).  Raises PrecisionExhausted
    if the a-posteriori disks cannot be separated.
    """
    d = len(coeffs_mpc) - 1
    with mp.workprec(prec + 32):
        lc = coeffs_mpc[-1]
        cs = [c / lc for c in coeffs_mpc]
        if d == 1:
            r = -cs[0]
            return [(r, _rnd(abs(r) + 1, prec) + coeff_err_bound)]
        radius = 1 + max(abs(c) for c in cs[:-1])
        # deterministic start: slightly detuned circle to break symmetries
        z = [radius * mpmath.expjpi(2 * (mpmath.mpf(k) / d + mpmath.mpf(1) / (2 * d)
                                         + mpmath.mpf(1) / 257))
             for k in range(d)]
        dcs = [cs[i] * i for i in range(1, d + 1)]

        def horner(c, x):
            acc = c[-1]
            for cc in reversed(c[:-1]):
                acc = acc * x + cc
            return acc

        target = mpmath.mpf(2) ** (-(prec + 8))
        for _ in range(400):
            moved = mpmath.mpf(0)
            for i in range(d):
                f = horner(cs, z[i])
                fp = horner(dcs, z[i])
                if fp == 0:
                    z[i] = z[i] * (1 + mpmath.mpf(1) / 1000)
                    moved = max(moved, abs(z[i]) / 1000)
                    continue
                w = f / fp
                s = mpmath.mpc(0)
                for j in range(d):
                    if j != i:
                        dz = z[i] - z[j]
                        if dz == 0:
                            dz = mpmath.mpf(2) ** (-prec) * (1 + abs(z[i]))
                        s += 1 / dz
                den = 1 - w * s
                delta = w if den == 0 else w / den
                z[i] = z[i] - delta
                moved = max(moved, abs(delta))
            if moved < target * radius:
                break
        # Newton polishing at doubled working precision
        with mp.workprec(2 * prec + 32):
            for i in range(d):
                x = z[i]
                for _ in range(3):
                    f = horner(cs, x)
                    fp = horner(dcs, x)
                    if fp == 0:
                        break
                    x = x - f / fp
                z[i] = x
            out = []
            for i in range(d):
                f = horner(cs, z[i])
                prod = mpmath.mpc(1)
                for j in range(d):
                    if j != i:
                        prod *= z[i] - z[j]
                if prod == 0:
                    raise PrecisionExhausted("coincident root estimates")
                wdk = abs(f / prod)
                e = d * wdk
                if coeff_err_bound > 0:
                    fp = horner(dcs, z[i])
                    if abs(fp) > 0:
                        e += coeff_err_bound * (1 + abs(z[i])) ** d / abs(fp)
                out.append((z[i], e + _rnd(abs(z[i]) + 1, 2 * prec)))
        return out


def _try_exactify(root_mpc, radius, upoly):
    """Recognise a numeric root as an exact Gaussian rational root of upoly."""
    with mp.workprec(mp.prec + 16):
        window = radius * 4 + mpmath.mpf(2) ** (-40)
        re_f = _mpf_to_fraction(root_mpc.real)
        im_f = _mpf_to_fraction(root_mpc.imag)
        for bound in (1, 2, 6, 12, 60, 720, 10 ** 4, 10 ** 6, 10 ** 9, 10 ** 12):
            cand = GaussianRational(re_f.limit_denominator(bound),
                                    im_f.limit_denominator(bound))
            delta = cand.to_mpc(mp.prec) - root_mpc
            if abs(delta) <= window and upoly.eval(cand).is_zero():
                return cand
    return None


def _mpf_to_fraction(x):
    if x == 0:
        return Fraction(0)
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    man = -man if sign else man
    if exp >= 0:
        return Fraction(int(man) << exp)
    return Fraction(int(man), 1 << (-exp))


def roots_univariate(poly, precision=DEFAULT_PREC):
    """All complex roots with multiplicity, certified error <= 2^(-precision/2).

    Accepts a UPoly (exact coefficients) or a list of coefficients (ascending;
    exact values and/or BigComplex).  Roots come back as BigComplex sorted
    lexicographically by (real, imag); exact roots carry their witness.
    """
    if isinstance(poly, UPoly):
        exact_poly = poly
        coeffs = list(poly.coeffs)
    else:
        coeffs = list(poly)
        while coeffs and coeff_is_zero(coeffs[-1]):
            coeffs.pop()
        exact_poly = None
        if coeffs and all(is_exact(c) for c in coeffs):
            exact_poly = UPoly([as_gaussian(c) for c in coeffs])
    if exact_poly is not None:
        if exact_poly.is_zero():
            raise DegenerateInput("zero polynomial has every number as a root")
        if exact_poly.degree() == 0:
            return []
        return _roots_exact(exact_poly, precision)
    if not coeffs:
        raise DegenerateInput("zero polynomial has every number as a root")
    if len(coeffs) == 1:
        return []
    return _roots_numeric(coeffs, precision)


def _roots_exact(poly, precision):
    v, core = poly.shift_valuation()
    out = []
    for _ in range(v):
        out.append(BigComplex(0, 0, precision, exact=GR_ZERO))
    if core.degree() >= 1:
        for factor, mult in core.squarefree_decomposition():
            roots = _roots_squarefree(factor, precision)
            for r in roots:
                for _ in range(mult):
                    out.append(r)
    return _sort_roots(out)


def _roots_squarefree(factor, precision):
    if factor.degree() == 1:
        g = (-factor[0]) / factor[1]
        return [BigComplex(g.to_mpc(precision + 16), 0, precision, exact=g)]
    target = mpmath.mpf(2) ** (-(precision // 2))
    work = precision + 32
    for _ in range(4):
        with mp.workprec(work):
            cs = [c.to_mpc(work) for c in factor.coeffs]
            pairs = _aberth(cs, work, mpmath.mpf(0))
            if all(e <= target for _, e in pairs):
                out = []
                for val, e in pairs:
                    exact = _try_exactify(val, e, factor)
                    if exact is not None:
                        out.append(BigComplex(exact.to_mpc(work), 0, precision, exact=exact))
                    else:
                        out.append(BigComplex(val, e, precision))
                return out
        work *= 2
    raise PrecisionExhausted(
        f"root disks did not shrink below 2^-{precision // 2} at {work // 2} bits")


def _roots_numeric(coeffs, precision):
    err_bound = mpmath.mpf(0)
    for c in coeffs:
        err_bound = max(err_bound, coeff_err(c))
    target = mpmath.mpf(2) ** (-(precision // 2))
    work = precision + 32
    with mp.workprec(work):
        cs = [coeff_to_mpc(c, work) for c in coeffs]
        pairs = _aberth(cs, work, err_bound)
    out = [BigComplex(v, e, precision) for v, e in pairs]
    if any(r.err > target for r in out) and err_bound > target:
        # inherited coefficient uncertainty; report as-is, caller sees bounds
        pass
    return _sort_roots(out)


def _sort_roots(roots):
    def key(r):
        with mp.workprec(64):
            grid = mpmath.mpf(2) ** 40
            return (int(mpmath.floor(r.val.real * grid)),
                    int(mpmath.floor(r.val.imag * grid)))
    return sorted(roots, key=key)


def all_nth_roots(value, b, precision=DEFAULT_PREC):
    """All b-th roots of a coefficient value, exact when recognisable."""
    if is_exact(value):
        g = as_gaussian(value)
        poly = UPoly([-g] + [GR_ZERO] * (b - 1) + [GR_ONE])
        return roots_univariate(poly, precision)
    xs = []
    for k in range(b):
        xs.append(value.root(b, index=k))
    return _sort_roots(xs)


# ---------------------------------------------------------------------------
# bivariate polynomials in (p, q)
# ---------------------------------------------------------------------------

class BiPoly:
    """Sparse bivariate polynomial: {(deg_p, deg_q): GaussianRational}, no zeros."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        d = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for (i, j), c in items:
            g = c if isinstance(c, GaussianRational) else GaussianRational(c)
            if g.is_zero():
                continue
            key = (int(i), int(j))
            if key in d:
                g = d[key] + g
                if g.is_zero():
                    del d[key]
                    continue
            d[key] = g
        object.__setattr__(self, "terms", d)

    def __setattr__(self, *a):
        raise AttributeError("BiPoly is immutable")

    def is_zero(self):
        return not self.terms

    def support(self):
        return sorted(self.terms.keys())

    def deg_p(self):
        return max((i for i, _ in self.terms), default=-1)

    def deg_q(self):
        return max((j for _, j in self.terms), default=-1)

    def coeff(self, i, j):
        return self.terms.get((i, j), GR_ZERO)

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kv: kv[0])))

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, GR_ZERO) + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return BiPoly(out)

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            g = GaussianRational._coerce(other)
            if g.is_zero():
                return BiPoly()
            return BiPoly({k: c * g for k, c in self.terms.items()})
        out = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                s = out.get(k, GR_ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return BiPoly(out)

    __rmul__ = __mul__

    def partial_p(self):
        return BiPoly({(i - 1, j): c * i for (i, j), c in self.terms.items() if i > 0})

    def partial_q(self):
        return BiPoly({(i, j - 1): c * j for (i, j), c in self.terms.items() if j > 0})

    def coeff_in_p(self, i):
        """Coefficient of p^i as a UPoly in q."""
        if self.is_zero():
            return UPoly()
        n = self.deg_q() + 1
        cs = [GR_ZERO] * n
        for (ii, j), c in self.terms.items():
            if ii == i:
                cs[j] = c
        return UPoly(cs)

    def as_ppoly(self):
        """List of UPoly-in-q coefficients indexed by p-degree."""
        return [self.coeff_in_p(i) for i in range(self.deg_p() + 1)]

    @staticmethod
    def from_ppoly(ps):
        terms = {}
        for i, up in enumerate(ps):
            for j, c in enumerate(up.coeffs):
                if not c.is_zero():
                    terms[(i, j)] = c
        return BiPoly(terms)

    def eval(self, p, q):
        """Evaluate at coefficient-like values (exact or BigComplex or complex)."""
        acc = None
        for (i, j), c in sorted(self.terms.items()):
            term = c * (p ** i) * (q ** j) if i or j else c
            acc = term if acc is None else acc + term
        if acc is None:
            return GR_ZERO
        return acc

    def leading_term_pmajor(self):
        """((i, j), coeff) for the lex-greatest term with p-degree major."""
        key = max(self.terms.keys())
        return key, self.terms[key]

    def normalized_pmajor(self):
        """Scale so the p-major lex leading coefficient is exactly 1."""
        if self.is_zero():
            return self
        _, lc = self.leading_term_pmajor()
        return self * lc.inverse()

    def __repr__(self):
        return f"BiPoly({dict(sorted(self.terms.items()))!r})"


def squarefree_in_p(P):
    """True iff gcd(P, dP/dp) over the rational-function field in q is constant in p.

    Primitive pseudo-remainder sequence; exact throughout.
    """
    if P.deg_p() < 1:
        raise DegenerateInput("P is constant in p")
    A = P.as_ppoly()
    B = P.partial_p().as_ppoly()
    g = _ppoly_gcd_degree(A, B)
    return g == 0


class RatQ:
    """Rational function in q: reduced UPoly pair with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        den = den if den is not None else UPoly.constant(GR_ONE)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if reduce and not num.is_zero():
            g = num.gcd(den)
            if g.degree() >= 1:
                num, den = num // g, den // g
        if num.is_zero():
            den = UPoly.constant(GR_ONE)
        lcinv = den.lc().inverse()
        self.num = num * lcinv
        self.den = den * lcinv

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, o):
        return RatQ(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        return RatQ(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o):
        return RatQ(self.num * o.num, self.den * o.den)

    def __truediv__(self, o):
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatQ(self.num * o.den, self.den * o.num)


def _rq_poly_divmod(A, B):
    """Division in RatQ[p]: A, B lists of RatQ ascending; B nonzero."""
    rem = list(A)
    while rem and rem[-1].is_zero():
        rem.pop()
    db = len(B) - 1
    quo = [RatQ(UPoly())] * max(0, len(rem) - db)
    binv = RatQ(B[-1].den, B[-1].num)
    while len(rem) - 1 >= db and rem:
        dr = len(rem) - 1
        f = rem[-1] * binv
        quo[dr - db] = f
        for i in range(db + 1):
            rem[dr - db + i] = rem[dr - db + i] - f * B[i]
        while rem and rem[-1].is_zero():
            rem.pop()
    return quo, rem


def squarefree_part_in_p(P):
    """P divided by gcd(P, dP/dp) over the rational-function field, as a BiPoly.

    Returns P itself when already squarefree.
    """
    if squarefree_in_p(P):
        return P
    A = [RatQ(u) for u in P.as_ppoly()]
    B = [RatQ(u) for u in P.partial_p().as_ppoly()]
    a, b = A, B
    while any(not x.is_zero() for x in b):
        _q, r = _rq_poly_divmod(a, b)
        a, b = b, r
    quo, rem = _rq_poly_divmod(A, a)
    assert not rem, "gcd does not divide P"
    # clear denominators to an exact BiPoly
    den_lcm = UPoly.constant(GR_ONE)
    for f in quo:
        g = den_lcm.gcd(f.den)
        den_lcm = den_lcm * (f.den // g)
    cleared = [(f.num * (den_lcm // f.den)) for f in quo]
    return BiPoly.from_ppoly(cleared).normalized_pmajor()


def _ppoly_content(ps):
    g = UPoly()
    for up in ps:
        g = up.gcd(g) if not g.is_zero() else up.monic() if not up.is_zero() else g
        if g.degree() == 0:
            return g
    return g


def _ppoly_primitive(ps):
    c = _ppoly_content(ps)
    if c.is_zero() or c.degree() < 1:
        return ps
    return [up // c for up in ps]


def _ppoly_trim(ps):
    while ps and ps[-1].is_zero():
        ps = ps[:-1]
    return ps


def _ppoly_prem(A, B):
    """Pseudo-remainder of A by B, coefficients UPoly in q."""
    r = _ppoly_trim(list(A))
    db = len(B) - 1
    lb = B[-1]
    while r and len(r) - 1 >= db:
        dr = len(r) - 1
        lr = r[-1]
        r = [c * lb for c in r]
        for i in range(db + 1):
            r[dr - db + i] = r[dr - db + i] - lr * B[i]
        r = _ppoly_trim(r)
    return r


def _ppoly_gcd_degree(A, B):
    A = _ppoly_trim(list(A))
    B = _ppoly_trim(list(B))
    if not A:
        return len(B) - 1
    if not B:
        return len(A) - 1
    while B:
        R = _ppoly_prem(A, B)
        R = _ppoly_primitive(R)
        A, B = B, R
    return len(A) - 1


def solve_linear(rows, rhs):
    """Solve a square exact linear system by Gaussian elimination.

    rows: list of lists of GaussianRational-coercible entries; rhs likewise.
    Returns the unique solution or raises ValueError if singular.
    """
    n = len(rows)
    a = [[GaussianRational._coerce(x) for x in row] + [GaussianRational._coerce(rhs[i])]
         for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("singular linear system")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [a[r][j] - f * a[col][j] for j in range(n + 1)]
    return [a[r][n] for r in range(n)]
