"""Matrices over a period ring: congruence subgroups, boundedness
filtrations, the Frobenius-stabilized filtration, twisted conjugation,
and the contraction fixed-point solvers.

Membership tests follow the series window semantics: a True/False answer
is exact relative to the windows of the entries, and InsufficientWindow
is raised when the window cannot decide.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import (InsufficientWindow, NoConvergence, NotAUnit,
                     NotInvertible, PreconditionViolated)
from .laurent import LaurentSeries


class SeriesMatrix:
    """A matrix of Laurent series over a common period ring."""

    def __init__(self, ring, rows):
        self.ring = ring
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged matrix")

    @property
    def n(self):
        if self.nrows != self.ncols:
            raise ValueError("matrix is not square")
        return self.nrows

    @property
    def hi(self):
        return min(e.hi for r in self.rows for e in r)

    @classmethod
    def identity(cls, ring, n, hi=None):
        z = ring.zero(hi)
        one = ring.one(hi)
        return cls(ring, [[one if i == j else z for j in range(n)]
                          for i in range(n)])

    @classmethod
    def zero(cls, ring, nrows, ncols=None, hi=None):
        z = ring.zero(hi)
        return cls(ring, [[z] * (ncols or nrows) for _ in range(nrows)])

    @classmethod
    def from_entries(cls, ring, entries, hi=None):
        """Build from a dict {(i,j): series-or-terms} plus implicit zeros."""
        n = 1 + max(max(i, j) for i, j in entries)
        rows = [[ring.zero(hi) for _ in range(n)] for _ in range(n)]
        for (i, j), v in entries.items():
            rows[i][j] = v if isinstance(v, LaurentSeries) else ring.series(v, hi)
        return cls(ring, rows)

    def entry(self, i, j):
        return self.rows[i][j]

    def map(self, fn):
        return SeriesMatrix(self.ring, [[fn(e) for e in r] for r in self.rows])

    def __add__(self, other):
        return SeriesMatrix(self.ring, [
            [a + b for a, b in zip(ra, rb)]
            for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return SeriesMatrix(self.ring, [
            [a - b for a, b in zip(ra, rb)]
            for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda e: -e)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return self.map(lambda e: e * other)
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = self.rows[i][0] * other.rows[0][j]
                for k in range(1, self.ncols):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return SeriesMatrix(self.ring, out)

    def scale(self, c):
        """Multiply every entry by a coefficient-ring constant."""
        if isinstance(c, int):
            c = self.ring.base.from_int(c)
        return self.map(lambda e: e.scale(c))

    def transpose(self):
        return SeriesMatrix(self.ring, [
            [self.rows[i][j] for i in range(self.nrows)]
            for j in range(self.ncols)])

    def truncate(self, hi):
        return self.map(lambda e: e.truncate(min(e.hi, hi)))

    def agrees(self, other):
        return all(a.agrees(b) for ra, rb in zip(self.rows, other.rows)
                   for a, b in zip(ra, rb))

    def is_zero(self):
        return all(e.is_zero() for r in self.rows for e in r)

    def is_identity(self):
        return (self - SeriesMatrix.identity(self.ring, self.n, self.hi)).is_zero()

    def inv(self):
        """Gauss-Jordan inverse; pivots need a visible unit degree."""
        n = self.n
        aug = [row[:] + SeriesMatrix.identity(self.ring, n, self.hi).rows[i]
               for i, row in enumerate(self.rows)]
        for col in range(n):
            best = None
            for r in range(col, n):
                try:
                    d = aug[r][col].unit_degree().d
                except (NotAUnit, InsufficientWindow):
                    continue
                if best is None or d < best[1]:
                    best = (r, d)
            if best is None:
                raise NotInvertible(f"no unit pivot in column {col}")
            r = best[0]
            aug[col], aug[r] = aug[r], aug[col]
            piv_inv = aug[col][col].inv()
            aug[col] = [e * piv_inv for e in aug[col]]
            for r2 in range(n):
                if r2 == col:
                    continue
                c = aug[r2][col]
                if c.is_zero():
                    continue
                aug[r2] = [e - c * q for e, q in zip(aug[r2], aug[col])]
        return SeriesMatrix(self.ring, [row[n:] for row in aug])

    # -- operator application --------------------------------------------

    def apply_op(self, op):
        return self.map(op.apply)

    def apply_phi(self):
        return self.apply_op(self.ring.phi)

    def apply_gamma(self):
        return self.apply_op(self.ring.gamma)

    def apply_galois(self, word):
        return self.map(lambda e: self.ring.apply_galois(word, e))

    # -- filtration membership --------------------------------------------

    def in_Un(self, n):
        """X = I + u^n * (power series matrix)?"""
        diff = self - SeriesMatrix.identity(self.ring, self.n, self.hi)
        return all(e.in_lattice(-n) for r in diff.rows for e in r)

    def congruence_depth(self):
        """Largest n with X in U_n, or None if X is I within window."""
        diff = self - SeriesMatrix.identity(self.ring, self.n, self.hi)
        if diff.is_zero():
            return None
        lo = min(e.lo for r in diff.rows for e in r if not e.is_zero())
        return lo

    def in_Vm(self, m, inverse=None):
        inverse = self.inv() if inverse is None else inverse
        return (all(e.in_lattice(m) for r in self.rows for e in r) and
                all(e.in_lattice(m) for r in inverse.rows for e in r))

    def in_Lm(self, m, inverse=None):
        return self.in_Vm(m, inverse)

    def in_Lm_phi(self, m, c_phi=None, inverse=None):
        """The Frobenius-stabilized filtration: p^(a-i)*X and p^(a-i)*X^-1
        lie in u^(-m - c_phi*i) * Mat(power series) for 0 <= i <= a."""
        if c_phi is None:
            c_phi = self.ring.c_phi()
        a = self.ring.base.a
        p = self.ring.base.p
        inverse = self.inv() if inverse is None else inverse
        for i in range(a + 1):
            bound = m + c_phi * i
            for mat in (self, inverse):
                scaled = mat.scale(p ** (a - i))
                if not all(e.in_lattice(bound) for r in scaled.rows for e in r):
                    return False
        return True

    def to_json(self):
        return {"n": self.nrows,
                "entries": [[e.to_json() for e in r] for r in self.rows]}

    @classmethod
    def from_json(cls, ring, data):
        return cls(ring, [[LaurentSeries.from_json(ring.base, e) for e in r]
                          for r in data["entries"]])

    def __repr__(self):
        return f"SeriesMatrix({self.nrows}x{self.ncols} over {self.ring!r})"


@dataclass
class FiltrationParams:
    """Admissibility data for the twisted-conjugation solvers.

    lam and N come from a ContractionReport certificate; the solvers
    refuse to run unless n_cong > max(2m/(lam - 1), N).
    """
    m: int
    n_cong: int
    lam: Fraction
    N: int

    def check(self):
        if self.m < 0 or self.n_cong < 1:
            raise PreconditionViolated("need m >= 0 and n_cong >= 1")
        lam = Fraction(self.lam)
        threshold = max(Fraction(2 * self.m, 1) / (lam - 1), Fraction(self.N))
        if self.n_cong <= threshold:
            raise PreconditionViolated(
                f"need n > max(2m/(lam-1), N) = {threshold}, got {self.n_cong}")


def twisted_conj(x, g, g_inv=None):
    """g^-1 * x * phi(g)."""
    g_inv = g.inv() if g_inv is None else g_inv
    return g_inv * x * g.apply_phi()


def solve_h(g, x, params):
    """The unique h in U_n with twisted_conj(x, g) = h^-1 * x.

    Computed directly: h^-1 = g^-1 * x * phi(g) * x^-1.
    """
    params.check()
    if not g.in_Un(params.n_cong):
        raise PreconditionViolated("g is not in U_n")
    x_inv = x.inv()
    if not x.in_Vm(params.m, x_inv):
        raise PreconditionViolated("x is not in V_m")
    h_inv = twisted_conj(x, g) * x_inv
    h = h_inv.inv()
    if not h.in_Un(params.n_cong):
        raise PreconditionViolated("solved h left U_n; certificate too weak")
    return h


def solve_g(h, x, params, max_iter=64):
    """Inverse problem: g in U_n with twisted_conj(x, g) = h^-1 * x.

    Fixed-point iteration from the contraction certificate: with
    y = h^-1 x, the residual h_i = x_i * y^-1 satisfies x_i = h_i * y,
    so twisted-conjugating by h_i gives x_{i+1} = y * phi(h_i) whose
    residual is one contraction step deeper; g = h_0 h_1 h_2 ... and
    each h_i must sink strictly deeper into the congruence filtration
    or NoConvergence is raised (h_0 = h itself).
    """
    params.check()
    if not h.in_Un(params.n_cong):
        raise PreconditionViolated("h is not in U_n")
    target_inv = x.inv() * h
    g = SeriesMatrix.identity(x.ring, x.n, x.hi)
    xi = x
    depth = params.n_cong - 1
    for _ in range(max_iter):
        hi_corr = xi * target_inv
        d = hi_corr.congruence_depth()
        if d is None:
            return g
        if d <= depth:
            raise NoConvergence(
                f"correction depth {d} did not grow past {depth}")
        depth = d
        g = g * hi_corr
        xi = twisted_conj(xi, hi_corr)
    raise NoConvergence(f"no fixed point within {max_iter} iterations")
