"""Truncated Laurent series over a Galois ring, with precision windows.

A series x is stored as a window [lo, hi) together with the coefficient
list for exponents lo, lo+1, ..., hi-1.  The meaning of the window:

* coefficients below lo are exactly zero (poles are tracked exactly),
* coefficients in [lo, hi) are known exactly,
* coefficients at hi and above are unknown.

Series are normalized on construction: leading zero coefficients are
stripped so that lo is the exact order of the lowest nonzero tracked term,
and the zero series is represented with lo == hi.

Window propagation rules (part of the operation contract, and relied on
by the test suite):

* add/sub:  hi = min(x.hi, y.hi)
* mul:      hi = min(x.hi + y.lo, y.hi + x.lo)
* scalar:   window unchanged
* shift(k): lo, hi both shifted by k
* inv:      hi = min(x.hi, x.hi + 2 * lo(inv(x)))
* eth_root: hi = min(w.hi, w.hi + lo(root) + lo(inv(w)))
* compose(f, g) with unit degree d = d(g) >= 1:
            hi = min over the partial sums of the per-term windows of
            c_n * g^n (computed with the rules above, powers of g formed
            by binary powering), further capped by the tail guard
            d * f.hi - (a - 1) * max(0, d - lo(g))
            which bounds the lowest exponent reachable by the unknown
            coefficients of f.

Rationale for inv: if x is known mod u^hi then perturbing x by
delta = O(u^hi) perturbs the inverse by x^{-1} delta x^{-1} + ..., whose
order is at least hi + 2 lo(x^{-1}).  The eth_root rule is the same
argument applied to r' = r (1 + delta/w)^{1/e}.
"""

import math
from collections import namedtuple

from .errors import (BadIndex, Divergent, EmptyWindow, InsufficientWindow,
                     NotAUnit, NotPrincipalForm)

UnitDegree = namedtuple("UnitDegree", ["d", "pole"])


class LaurentSeries:
    """A truncated Laurent series over a CoeffRing."""

    __slots__ = ("ring", "lo", "hi", "coeffs")

    def __init__(self, ring, lo, hi, coeffs):
        if hi < lo:
            raise EmptyWindow(f"window [{lo}, {hi}) is empty")
        if len(coeffs) != hi - lo:
            raise ValueError("coefficient list does not match window")
        # normalize: strip exact leading zeros
        i = 0
        n = len(coeffs)
        while i < n and ring.is_zero(coeffs[i]):
            i += 1
        if i == n:
            lo, coeffs = hi, []
        elif i:
            lo, coeffs = lo + i, coeffs[i:]
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self.coeffs = list(coeffs)

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, ring, hi):
        return cls(ring, hi, hi, [])

    @classmethod
    def from_terms(cls, ring, terms, hi):
        """Build a series from {exponent: coefficient}; ints are lifted."""
        if not terms:
            return cls.zero(ring, hi)
        lo = min(terms)
        coeffs = [ring.zero] * (hi - lo)
        for e, c in terms.items():
            if e >= hi:
                continue
            coeffs[e - lo] = _as_coords(ring, c)
        return cls(ring, lo, hi, coeffs)

    @classmethod
    def constant(cls, ring, c, hi):
        return cls.from_terms(ring, {0: c}, hi)

    @classmethod
    def monomial(cls, ring, exp, c, hi):
        return cls.from_terms(ring, {exp: c}, hi)

    # -- inspection ---------------------------------------------------------

    def is_zero(self):
        """True when every tracked coefficient vanishes (window-relative)."""
        return self.lo == self.hi

    def coeff(self, e):
        if e < self.lo:
            return self.ring.zero
        if e >= self.hi:
            raise InsufficientWindow(f"exponent {e} is outside window [<{self.hi})")
        return self.coeffs[e - self.lo]

    def terms(self):
        for i, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                yield self.lo + i, c

    def unit_degree(self):
        """First exponent whose coefficient is a unit, with the exact pole.

        Raises InsufficientWindow when no unit appears in the window: the
        series may acquire a unit coefficient beyond hi, so neither a
        positive nor a negative answer is safe.
        """
        for i, c in enumerate(self.coeffs):
            if self.ring.is_unit(c):
                return UnitDegree(d=self.lo + i, pole=self.lo)
        raise InsufficientWindow("no unit coefficient within the window")

    def in_lattice(self, m):
        """Decide membership in u^{-m} * (power series), i.e. lo >= -m."""
        if self.is_zero():
            if self.hi < -m:
                raise InsufficientWindow("window lies entirely below u^{-m}")
            return True
        return self.lo >= -m

    def in_power_series(self):
        return self.in_lattice(0)

    def agrees(self, other):
        """Coefficient-wise equality on the common window."""
        hi = min(self.hi, other.hi)
        lo = min(self.lo, other.lo)
        for e in range(lo, hi):
            if self._at(e) != other._at(e):
                return False
        return True

    def _at(self, e):
        if e < self.lo or e >= self.lo + len(self.coeffs):
            return self.ring.zero
        return self.coeffs[e - self.lo]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        ring = self.ring
        hi = min(self.hi, other.hi)
        lo = min(self.lo, other.lo, hi)
        coeffs = [ring.add(self._at(e), other._at(e)) for e in range(lo, hi)]
        return LaurentSeries(ring, lo, hi, coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        ring = self.ring
        return LaurentSeries(ring, self.lo, self.hi,
                             [ring.neg(c) for c in self.coeffs])

    def __mul__(self, other):
        ring = self.ring
        hi = min(self.hi + other.lo, other.hi + self.lo)
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero(ring, hi)
        lo = self.lo + other.lo
        if hi <= lo:
            raise EmptyWindow("product window retains no exponent")
        out = [ring.zero] * (hi - lo)
        for i, ci in enumerate(self.coeffs):
            if ring.is_zero(ci):
                continue
            ei = self.lo + i
            jmax = min(len(other.coeffs), hi - ei - other.lo)
            for j in range(jmax):
                cj = other.coeffs[j]
                if ring.is_zero(cj):
                    continue
                k = ei + other.lo + j - lo
                out[k] = ring.add(out[k], ring.mul(ci, cj))
        return LaurentSeries(ring, lo, hi, out)

    def scale(self, c):
        """Multiply by an exactly known ring constant; window unchanged."""
        ring = self.ring
        c = _as_coords(ring, c)
        return LaurentSeries(ring, self.lo, self.hi,
                             [ring.mul(c, x) for x in self.coeffs])

    def shift(self, k):
        """Multiply by u^k."""
        return LaurentSeries(self.ring, self.lo + k, self.hi + k, list(self.coeffs))

    def truncate(self, hi):
        """Forget coefficients at and above hi (hi must not exceed self.hi)."""
        if hi > self.hi:
            raise InsufficientWindow("cannot extend a window by truncation")
        if hi <= self.lo:
            return LaurentSeries.zero(self.ring, hi)
        return LaurentSeries(self.ring, self.lo, hi, self.coeffs[:hi - self.lo])

    def map_coeffs(self, fn):
        return LaurentSeries(self.ring, self.lo, self.hi,
                             [fn(c) for c in self.coeffs])

    def frob_coeffs(self, power=1):
        if power % self.ring.f == 0:
            return self
        return self.map_coeffs(lambda c: self.ring.frob(c, power))

    def inv(self):
        """Inverse in the truncated Laurent ring.

        Requires a unit degree d within the window; all coefficients below
        d are then automatically nilpotent.  Computed by a geometric series
        against the leading unit term, on an internally padded window, then
        clamped to hi = min(x.hi, x.hi + 2 * lo(result)).
        """
        ring = self.ring
        try:
            ud = self.unit_degree()
        except InsufficientWindow:
            raise NotAUnit("no unit coefficient within the window")
        d, pole = ud.d, ud.pole
        a = ring.a
        spread = d - pole
        pad = (a + 1) * (spread + 1) + 2
        work_hi = self.hi + pad
        # m = c_d^{-1} u^{-d}; w = m*x - 1 has positive or nilpotent terms
        cd_inv = ring.inv(self.coeff(d))
        w_terms = {}
        for e, c in self.terms():
            if e == d:
                continue
            w_terms[e - d] = ring.mul(cd_inv, c)
        # truncated geometric series sum (-w)^k, exact on the padded window
        acc = {0: ring.one}
        res = {0: ring.one}
        kmax = work_hi + (a - 1) * (spread + 1) + 1
        for _ in range(kmax):
            acc = _dict_mul(ring, acc, w_terms, work_hi)
            if not acc:
                break
            acc = {e: ring.neg(c) for e, c in acc.items()}
            for e, c in acc.items():
                res[e] = ring.add(res.get(e, ring.zero), c)
            res = {e: c for e, c in res.items() if not ring.is_zero(c)}
        out_terms = {}
        for e, c in res.items():
            out_terms[e - d] = ring.mul(c, cd_inv)
        raw = LaurentSeries.from_terms(ring, out_terms, work_hi)
        hi = min(self.hi, self.hi + 2 * raw.lo)
        return raw.truncate(hi)

    def to_json(self):
        return {"lo": self.lo, "hi": self.hi,
                "coeffs": [list(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, ring, data):
        coeffs = [tuple(v % ring.q for v in c) for c in data["coeffs"]]
        return cls(ring, data["lo"], data["hi"], coeffs)

    def __repr__(self):
        parts = [f"{c}*u^{e}" for e, c in self.terms()]
        body = " + ".join(parts) if parts else "0"
        return f"<{body} mod u^{self.hi}>"


def _as_coords(ring, c):
    if isinstance(c, int):
        return ring.from_int(c)
    if hasattr(c, "coords"):
        return c.coords
    return tuple(v % ring.q for v in c)


def _dict_mul(ring, x, y, hi):
    """Sparse product of exponent->coefficient dicts, dropping exps >= hi."""
    out = {}
    for ex, cx in x.items():
        for ey, cy in y.items():
            e = ex + ey
            if e >= hi:
                continue
            v = ring.mul(cx, cy)
            if ring.is_zero(v):
                continue
            prev = out.get(e)
            if prev is None:
                out[e] = v
            else:
                s = ring.add(prev, v)
                if ring.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
    return out


def eth_root_one_unit(w, e):
    """Principal e-th root of w = 1 + h, h with positive or nilpotent terms.

    Computed by the binomial series sum_k C(1/e, k) h^k, which terminates
    within the (padded) window because each h factor either raises the
    exponent or contributes a factor of p.  The binomial coefficients
    C(1/e, k) mod p^a are evaluated as exact integer binomials C(c, k)
    where c is an integer inverse of e modulo p^{a + v_p(K!)}.

    Requires gcd(e, p) = 1 (BadIndex otherwise) and the principal shape
    of w (NotPrincipalForm otherwise).
    """
    ring = w.ring
    p, a, q = ring.p, ring.a, ring.q
    if e < 1 or math.gcd(e, p) != 1:
        raise BadIndex(f"root index {e} is not prime to p = {p}")
    if w.coeff(0) != ring.one and not ring.is_nilpotent(ring.sub(w.coeff(0), ring.one)):
        raise NotPrincipalForm("constant term is not 1 + nilpotent")
    h_terms = {}
    m = 0
    for exp, c in w.terms():
        if exp == 0:
            c = ring.sub(c, ring.one)
            if ring.is_zero(c):
                continue
        if exp <= 0 and not ring.is_nilpotent(c):
            raise NotPrincipalForm(
                f"term at exponent {exp} has a unit coefficient")
        if exp <= 0:
            m = max(m, -exp)
        h_terms[exp] = c
    if not h_terms:
        return LaurentSeries.constant(ring, 1, w.hi)
    pad = (a + 1) * (m + 2) + 2
    work_hi = w.hi + pad
    kmax = work_hi + (a - 1) * (m + 1) + 1
    # integer stand-in for 1/e, accurate enough for all binomials used
    vK = _legendre_val_factorial(kmax, p)
    c_int = pow(e, -1, p ** (a + vK))
    res = {0: ring.one}
    acc = {0: ring.one}
    for k in range(1, kmax + 1):
        acc = _dict_mul(ring, acc, h_terms, work_hi)
        if not acc:
            break
        b = math.comb(c_int, k) % q
        if b == 0:
            continue
        for exp, c in acc.items():
            v = ring.smul(b, c)
            res[exp] = ring.add(res.get(exp, ring.zero), v)
    raw = LaurentSeries.from_terms(ring, res, work_hi)
    winv = w.inv()
    hi = min(w.hi, w.hi + raw.lo + winv.lo)
    return raw.truncate(hi)


def _legendre_val_factorial(k, p):
    v, pk = 0, p
    while pk <= k:
        v += k // pk
        pk *= p
    return v


def compose(f, g, powers_cache=None):
    """Substitute g into f: sum of c_n * g^n over the window of f.

    Requires unit degree d(g) >= 1 (Divergent otherwise); negative
    exponents of f additionally require g invertible, which d(g) >= 1
    guarantees.  Powers of g are formed by binary powering (and cached in
    powers_cache when given), each with the documented mul windows; the
    final window is additionally capped by the tail guard described in
    the module docstring.
    """
    ring = f.ring
    try:
        ud = g.unit_degree()
    except InsufficientWindow:
        raise NotAUnit("substitution target has no visible unit coefficient")
    d = ud.d
    if d < 1:
        raise Divergent(f"substitution target has unit degree {d} < 1")
    if powers_cache is None:
        powers_cache = {}
    tail_guard = d * f.hi - (ring.a - 1) * max(0, d - g.lo)
    out = LaurentSeries.zero(ring, tail_guard)
    for n in range(f.lo, f.hi):
        c = f._at(n)
        if ring.is_zero(c):
            continue
        if n < 0 and "inv" not in powers_cache:
            powers_cache["inv"] = g.inv()
        base = g if n >= 0 else powers_cache["inv"]
        gn = _power(base, abs(n), powers_cache, neg=(n < 0))
        out = out + gn.scale(c)
    return out


def _power(base, n, cache, neg=False):
    """Binary powering with memoization; cache key is (neg, n)."""
    key = (neg, n)
    if key in cache:
        return cache[key]
    if n == 0:
        val = LaurentSeries.constant(base.ring, 1, base.hi)
    elif n == 1:
        val = base
    else:
        half = _power(base, n // 2, cache, neg)
        val = half * half
        if n % 2:
            val = val * base
    cache[key] = val
    return val
