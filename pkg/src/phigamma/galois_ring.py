"""Galois ring arithmetic GR(p^a, f) = W(F_{p^f}) / p^a.

Elements are stored as coordinate tuples of length f in the power basis
1, x, ..., x^{f-1} modulo a fixed monic degree-f polynomial whose mod-p
reduction is irreducible.  The modulus is chosen deterministically: among
monic lifts x^f + c_{f-1}x^{f-1} + ... + c_0 with 0 <= c_i < p, the first
tuple (c_0, ..., c_{f-1}) in lexicographic order whose reduction is
irreducible over F_p.  For f = 1 this gives the modulus x, i.e. Z/p^a.

The ring-level API operates on raw coordinate tuples for speed; CoeffElem
is a thin wrapper that provides operator syntax and JSON serialization.
"""

import itertools

from .errors import NotAUnit, NotPrime


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul_mod_p(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_divmod_p(a, b, p):
    # b must be nonzero; works over the field F_p
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv_lb = pow(lb, -1, p)
    q = [0] * max(0, len(a) - db)
    while len(a) - 1 >= db and _poly_trim(a):
        da = len(a) - 1
        coef = (a[-1] * inv_lb) % p
        q[da - db] = coef
        for i in range(db + 1):
            a[da - db + i] = (a[da - db + i] - coef * b[i]) % p
        a = _poly_trim(a) or [0]
        if a == [0]:
            a = []
            break
    return _poly_trim(q), _poly_trim(a)


def _poly_irreducible_p(m, p):
    """Trial-division irreducibility test for a monic polynomial over F_p."""
    f = len(m) - 1
    if f == 1:
        return True
    for d in range(1, f // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            _, r = _poly_divmod_p(m, g, p)
            if not r:
                return False
    return True


def _first_irreducible(p, f):
    for tail in itertools.product(range(p), repeat=f):
        # tail is (c_0, ..., c_{f-1}) in lexicographic order
        m = list(tail) + [1]
        if _poly_irreducible_p(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class CoeffRing:
    """The Galois ring GR(p^a, f) with a deterministic modulus choice."""

    def __init__(self, p, a, f, modulus=None):
        if not _is_prime(p):
            raise NotPrime(f"p = {p} is not prime")
        if a < 1 or f < 1:
            raise ValueError("require a >= 1 and f >= 1")
        self.p = p
        self.a = a
        self.f = f
        self.q = p ** a
        self.modulus = tuple(modulus) if modulus else _first_irreducible(p, f)
        if len(self.modulus) != f + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree f")
        self.zero = (0,) * f
        self.one = ((1,) + (0,) * (f - 1)) if f >= 1 else ()
        self._red = self._reduction_rows()
        self._frob_cols = None

    def _reduction_rows(self):
        """Coordinates of x^f, x^{f+1}, ..., x^{2f-2} modulo the modulus."""
        f, q = self.f, self.q
        rows = []
        cur = [(-self.modulus[i]) % q for i in range(f)]  # x^f
        rows.append(tuple(cur))
        for _ in range(f - 2):
            top = cur[f - 1]
            cur = [0] + cur[:-1]
            if top:
                for i in range(f):
                    cur[i] = (cur[i] - top * self.modulus[i]) % q
            rows.append(tuple(cur))
        return rows

    # -- tuple-level arithmetic ------------------------------------------

    def add(self, c1, c2):
        q = self.q
        return tuple((x + y) % q for x, y in zip(c1, c2))

    def sub(self, c1, c2):
        q = self.q
        return tuple((x - y) % q for x, y in zip(c1, c2))

    def neg(self, c):
        q = self.q
        return tuple((-x) % q for x in c)

    def smul(self, k, c):
        q = self.q
        k %= q
        return tuple((k * x) % q for x in c)

    def mul(self, c1, c2):
        f, q = self.f, self.q
        if f == 1:
            return ((c1[0] * c2[0]) % q,)
        raw = [0] * (2 * f - 1)
        for i, x in enumerate(c1):
            if x == 0:
                continue
            for j, y in enumerate(c2):
                raw[i + j] += x * y
        out = [v % q for v in raw[:f]]
        for k in range(f, 2 * f - 1):
            v = raw[k] % q
            if v:
                row = self._red[k - f]
                for i in range(f):
                    out[i] = (out[i] + v * row[i]) % q
        return tuple(out)

    def pow(self, c, n):
        if n < 0:
            return self.pow(self.inv(c), -n)
        acc, base = self.one, c
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc

    def from_int(self, n):
        return ((n % self.q,) + (0,) * (self.f - 1))

    def gen(self):
        """The power-basis generator x (equals 0 when f = 1)."""
        if self.f == 1:
            return (0,)
        return (0, 1) + (0,) * (self.f - 2)

    def is_zero(self, c):
        return all(x == 0 for x in c)

    def is_unit(self, c):
        p = self.p
        return any(x % p for x in c)

    def is_nilpotent(self, c):
        p = self.p
        return all(x % p == 0 for x in c)

    def val(self, c):
        """Largest v <= a with p^v dividing every coordinate (a for zero)."""
        v = 0
        p = self.p
        while v < self.a and all(x % (p ** (v + 1)) == 0 for x in c):
            v += 1
        return v

    def inv(self, c):
        """Multiplicative inverse via a field inverse mod p lifted by Newton."""
        if not self.is_unit(c):
            raise NotAUnit(f"{c} is not a unit in GR({self.p}^{self.a}, {self.f})")
        p = self.p
        if self.f == 1:
            return (pow(c[0], -1, self.q),)
        # inverse in F_{p^f} by extended Euclid on polynomials
        y = self._field_inv([x % p for x in c])
        y = tuple(y[i] if i < len(y) else 0 for i in range(self.f))
        # Newton: y <- y(2 - cy), doubles p-adic accuracy each step
        steps = max(1, (self.a - 1).bit_length())
        two = self.from_int(2)
        for _ in range(steps):
            y = self.mul(y, self.sub(two, self.mul(c, y)))
        return y

    def _field_inv(self, c):
        p = self.p
        m = list(self.modulus)
        m = [x % p for x in m]
        r0, r1 = m, _poly_trim(c)
        s0, s1 = [], [1]
        while True:
            q_, r = _poly_divmod_p(r0, r1, p)
            if not r:
                break
            s = [(x - y) % p for x, y in
                 itertools.zip_longest(s0, _poly_mul_mod_p(q_, s1, p), fillvalue=0)]
            r0, r1, s0, s1 = r1, r, s1, s
        lead_inv = pow(r1[-1], -1, p)
        if len(r1) != 1:
            raise NotAUnit("element is a zero divisor mod p")
        return [(x * lead_inv) % p for x in s1]

    # -- Frobenius --------------------------------------------------------

    def _frobenius_columns(self):
        """Images of the basis 1, x, ..., x^{f-1} under the Frobenius lift.

        The lift sends the generator x to the Hensel lift of x^p, the unique
        root of the modulus congruent to x^p mod p.
        """
        if self._frob_cols is not None:
            return self._frob_cols
        f = self.f
        if f == 1:
            self._frob_cols = [self.one]
            return self._frob_cols
        r = self.pow(self.gen(), self.p)
        # Newton refinement: r <- r - m(r)/m'(r)
        for _ in range(max(1, (self.a - 1).bit_length()) + 1):
            mr = self._eval_modulus(r)
            dmr = self._eval_modulus_deriv(r)
            r = self.sub(r, self.mul(mr, self.inv(dmr)))
        cols = [self.one]
        acc = self.one
        for _ in range(1, f):
            acc = self.mul(acc, r)
            cols.append(acc)
        self._frob_cols = cols
        return cols

    def _eval_modulus(self, r):
        acc = self.from_int(self.modulus[self.f])
        for i in range(self.f - 1, -1, -1):
            acc = self.add(self.mul(acc, r), self.from_int(self.modulus[i]))
        return acc

    def _eval_modulus_deriv(self, r):
        acc = self.zero
        for i in range(self.f, 0, -1):
            acc = self.add(self.mul(acc, r), self.smul(i, self.from_int(self.modulus[i])))
        return acc

    def frob(self, c, power=1):
        """Apply the Frobenius automorphism (lift of t -> t^p) `power` times."""
        power %= self.f
        if power == 0 or self.f == 1:
            return tuple(c)
        cols = self._frobenius_columns()
        for _ in range(power):
            out = self.zero
            for i, ci in enumerate(c):
                if ci:
                    out = self.add(out, self.smul(ci, cols[i]))
            c = out
        return c

    # -- enumeration and serialization -------------------------------------

    def elements(self):
        """Iterate over all q^f elements (small rings only)."""
        for coords in itertools.product(range(self.q), repeat=self.f):
            yield coords

    def residue_units(self):
        """One unit representative per nonzero residue class (mod p)."""
        for coords in itertools.product(range(self.p), repeat=self.f):
            if any(coords):
                yield coords

    def random(self, rng):
        return tuple(rng.randrange(self.q) for _ in range(self.f))

    def random_unit(self, rng):
        while True:
            c = self.random(rng)
            if self.is_unit(c):
                return c

    def elem(self, value):
        if isinstance(value, CoeffElem):
            return value
        if isinstance(value, int):
            return CoeffElem(self, self.from_int(value))
        return CoeffElem(self, tuple(v % self.q for v in value))

    def to_json(self):
        return {"p": self.p, "a": self.a, "f": self.f, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data):
        return cls(data["p"], data["a"], data["f"], modulus=data.get("modulus"))

    def __eq__(self, other):
        return (isinstance(other, CoeffRing)
                and (self.p, self.a, self.f, self.modulus)
                == (other.p, other.a, other.f, other.modulus))

    def __hash__(self):
        return hash((self.p, self.a, self.f, self.modulus))

    def __repr__(self):
        return f"CoeffRing(p={self.p}, a={self.a}, f={self.f})"


class CoeffElem:
    """An element of a CoeffRing, wrapping a coordinate tuple."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring, coords):
        self.ring = ring
        self.coords = tuple(coords)

    def __add__(self, other):
        return CoeffElem(self.ring, self.ring.add(self.coords, _coords(other, self.ring)))

    def __sub__(self, other):
        return CoeffElem(self.ring, self.ring.sub(self.coords, _coords(other, self.ring)))

    def __mul__(self, other):
        return CoeffElem(self.ring, self.ring.mul(self.coords, _coords(other, self.ring)))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return CoeffElem(self.ring, self.ring.neg(self.coords))

    def __pow__(self, n):
        return CoeffElem(self.ring, self.ring.pow(self.coords, n))

    def inverse(self):
        return CoeffElem(self.ring, self.ring.inv(self.coords))

    def frobenius(self, power=1):
        return CoeffElem(self.ring, self.ring.frob(self.coords, power))

    def is_unit(self):
        return self.ring.is_unit(self.coords)

    def is_zero(self):
        return self.ring.is_zero(self.coords)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coords == self.ring.from_int(other)
        return (isinstance(other, CoeffElem) and self.ring == other.ring
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.ring, self.coords))

    def to_json(self):
        return {"coords": list(self.coords)}

    @classmethod
    def from_json(cls, ring, data):
        return cls(ring, tuple(x % ring.q for x in data["coords"]))

    def __repr__(self):
        return f"CoeffElem{self.coords}"


def _coords(other, ring):
    if isinstance(other, CoeffElem):
        return other.coords
    if isinstance(other, int):
        return ring.from_int(other)
    return tuple(other)


def make_ring(p, a, f=1):
    """Construct GR(p^a, f) with the deterministic modulus choice."""
    return CoeffRing(p, a, f)
