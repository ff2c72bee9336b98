"""Framed modules over a period ring: an invertible matrix pair
(Phi, Gam) for the phi- and gamma-actions in a chosen basis, with the
commutation identity Phi*phi(Gam) = Gam*gamma(Phi) as the validity
criterion.  Also: change of basis, semilinear composition, topological
nilpotency certificates, Galois descent data, and semidirect-product
(L-group) bookkeeping.

Conventions.  A phi-semilinear map acts on column coordinates by
x -> Phi*phi(x) and a gamma-semilinear one by x -> Gam*gamma(x); the
composite phi-then-gamma therefore has matrix Gam*gamma(Phi) and the
other order Phi*phi(Gam), so order-independence of the composite is
exactly the commutation identity.
"""

from .errors import (ActionMismatch, CocycleFails, CommutationFails,
                     DescentEqFails, NotInvertible, WrongGalComponent)
from .matrices import SeriesMatrix
from .verdicts import fails, holds, inconclusive


def commutation_residual(ring, Phi, Gam):
    """Phi*phi(Gam) - Gam*gamma(Phi); zero iff the pair is valid."""
    return Phi * Gam.apply_phi() - Gam * Phi.apply_gamma()


def pattern_ok(mat, pattern):
    """Entries outside the allowed-position set must vanish."""
    if pattern is None:
        return True
    return all(mat.entry(i, j).is_zero()
               for i in range(mat.nrows) for j in range(mat.ncols)
               if (i, j) not in pattern)


class FramedModule:
    """An etale module in coordinates: invertible Phi and Gam matrices."""

    def __init__(self, ring, Phi, Gam, pattern=None, validate=True):
        self.ring = ring
        self.Phi = Phi
        self.Gam = Gam
        self.pattern = pattern
        self.n = Phi.n
        if validate:
            self.validate()

    def validate(self):
        Phi_inv = self.Phi.inv()
        Gam_inv = self.Gam.inv()
        resid = commutation_residual(self.ring, self.Phi, self.Gam)
        if not resid.is_zero():
            raise CommutationFails("Phi*phi(Gam) != Gam*gamma(Phi)",
                                   residual=resid)
        if self.pattern is not None:
            for m in (self.Phi, Phi_inv, self.Gam, Gam_inv):
                if not pattern_ok(m, self.pattern):
                    raise CommutationFails("matrix leaves the subgroup pattern")
        return self

    def to_json(self):
        out = {"ring": self.ring.to_json(), "Phi": self.Phi.to_json(),
               "Gam": self.Gam.to_json()}
        if self.pattern is not None:
            out["pattern"] = sorted(self.pattern)
        return out

    def __repr__(self):
        return f"FramedModule(n={self.n} over {self.ring!r})"


def make_framed(ring, Phi, Gam, pattern=None):
    return FramedModule(ring, Phi, Gam, pattern)


def change_basis(M, h, h_inv=None):
    """New coordinates: (h*Phi*phi(h)^-1, h*Gam*gamma(h)^-1)."""
    h_inv = h.inv() if h_inv is None else h_inv
    Phi = h * M.Phi * h_inv.apply_phi()
    Gam = h * M.Gam * h_inv.apply_gamma()
    return FramedModule(M.ring, Phi, Gam, M.pattern)


def compose_semilinear(ring, F, G, order="phi-then-gamma"):
    """Matrix of the composite of the phi-map F and the gamma-map G.

    phi-then-gamma applies F first: the composite is G*gamma(F);
    gamma-then-phi gives F*phi(G).  The two agree exactly when (F, G)
    is a valid framed pair.
    """
    if order == "phi-then-gamma":
        return G * F.apply_gamma()
    if order == "gamma-then-phi":
        return F * G.apply_phi()
    raise ValueError(f"unknown order {order!r}")


def check_topologically_nilpotent(M, max_k=8, slack=None):
    """Certify that z -> Gam*gamma(z) - z shrinks the standard cochains.

    Iterates the map on the n constant basis vectors; Found(k) when all
    iterates vanish within window up to u^(window - slack).  A negative
    outcome is reported inconclusive, never as a disproof.
    """
    ring = M.ring
    if slack is None:
        slack = max(2, ring.window // 4)
    cutoff = ring.window - slack

    def small(vec):
        return all(e.is_zero() or e.lo >= cutoff
                   for row in vec.rows for e in row)

    vecs = [SeriesMatrix(ring, [[ring.one() if i == j else ring.zero()]
                                for i in range(M.n)])
            for j in range(M.n)]
    for k in range(1, max_k + 1):
        vecs = [M.Gam * v.apply_gamma() - v for v in vecs]
        if all(small(v) for v in vecs):
            return holds("topologically-nilpotent",
                         f"(gamma-1)^{k} sinks below u^{cutoff}",
                         window=ring.window, k=k)
    return inconclusive("topologically-nilpotent",
                        f"not certified within {max_k} iterations",
                        window=ring.window)


# -- Galois descent ---------------------------------------------------------


class DescentDatum:
    """Matrices phi_sigma, one per Galois generator label."""

    def __init__(self, ring, maps):
        self.ring = ring
        self.maps = dict(maps)
        for g in ring.galois.generators:
            if g.label not in self.maps:
                raise KeyError(f"missing descent matrix for {g.label}")

    @classmethod
    def canonical(cls, ring, n):
        I = SeriesMatrix.identity(ring, n)
        return cls(ring, {g.label: I for g in ring.galois.generators})

    def matrix(self, label):
        return self.maps[label]

    def to_json(self):
        return {label: m.to_json() for label, m in self.maps.items()}


def _gal_apply(ring, word, mat):
    return mat.apply_galois(word)


def check_descent(M, D):
    """Verify the descent equations and the cocycle condition.

    For every generator sigma (order d, inverse word sigma^(d-1)):
      phi_sigma * Phi * phi(phi_sigma)^-1   = sigma^-1(Phi)
      phi_sigma * Gam * gamma(phi_sigma)^-1 = sigma^-1(Gam)
      phi_sigma * sigma(phi_sigma) * ... * sigma^(d-1)(phi_sigma) = I
    plus pairwise compatibility for commuting generators.
    """
    ring = M.ring
    gens = ring.galois.generators
    for i, g in enumerate(gens):
        fs = D.matrix(g.label)
        fs_inv = fs.inv()
        inv_word = ring.galois.generator_word(i, g.order - 1)
        lhs = fs * M.Phi * fs_inv.apply_phi()
        rhs = _gal_apply(ring, inv_word, M.Phi)
        if not (lhs - rhs).is_zero():
            raise DescentEqFails(f"phi descent equation fails for {g.label}")
        lhs = fs * M.Gam * fs_inv.apply_gamma()
        rhs = _gal_apply(ring, inv_word, M.Gam)
        if not (lhs - rhs).is_zero():
            raise DescentEqFails(f"gamma descent equation fails for {g.label}")
        acc = fs
        for k in range(1, g.order):
            acc = acc * _gal_apply(ring, ring.galois.generator_word(i, k), fs)
        if not acc.is_identity():
            raise CocycleFails(f"cocycle condition fails for {g.label}")
    for i, gi in enumerate(gens):
        for j in range(i + 1, len(gens)):
            gj = gens[j]
            fi, fj = D.matrix(gi.label), D.matrix(gj.label)
            lhs = fi * _gal_apply(ring, ring.galois.generator_word(i), fj)
            rhs = fj * _gal_apply(ring, ring.galois.generator_word(j), fi)
            if not (lhs - rhs).is_zero():
                raise CocycleFails(
                    f"commuting-pair condition fails for {gi.label},{gj.label}")
    return holds("descent", "all descent equations and cocycle conditions hold",
                 window=ring.window)


def descent_datum_after_change_basis(M, D, h):
    """The datum for change_basis(M, h): sigma^-1(h) * phi_sigma * h^-1."""
    ring = M.ring
    h_inv = h.inv()
    maps = {}
    for i, g in enumerate(ring.galois.generators):
        inv_word = ring.galois.generator_word(i, g.order - 1)
        maps[g.label] = _gal_apply(ring, inv_word, h) * D.matrix(g.label) * h_inv
    return DescentDatum(ring, maps)


# -- L-group (semidirect product) bookkeeping --------------------------------


class GHatAction:
    """A declared action of the Galois group on the matrix group:
    conjugation by a constant matrix composed with the ring action."""

    def __init__(self, ring, conjugators=None):
        self.ring = ring
        self.conjugators = conjugators or {}

    def apply(self, word, mat):
        out = mat.apply_galois(word)
        c = self.conjugators.get(tuple(word))
        if c is not None:
            out = c * out * c.inv()
        return out

    def word_mul(self, w1, w2):
        gens = self.ring.galois.generators
        return tuple((a + b) % g.order for a, b, g in zip(w1, w2, gens))

    def identity_word(self):
        return tuple(0 for _ in self.ring.galois.generators)


class LGroupElem:
    def __init__(self, mat, gal, action):
        self.mat = mat
        self.gal = tuple(gal)
        self.action = action

    def __repr__(self):
        return f"LGroupElem(gal={self.gal})"


def lgroup_mul(x, y):
    """(g1, s1)(g2, s2) = (g1 * a_{s1}(g2), s1*s2)."""
    if x.action is not y.action:
        raise ActionMismatch("elements declared over different actions")
    mat = x.mat * x.action.apply(x.gal, y.mat)
    return LGroupElem(mat, x.action.word_mul(x.gal, y.gal), x.action)


def check_lparameter_shape(phi_elem, gam_elem, expected_phi_gal,
                           expected_gamma_gal):
    """The Galois components of [phi] and [gamma] must equal the
    prescribed images."""
    if phi_elem.gal != tuple(expected_phi_gal):
        raise WrongGalComponent(
            f"phi carries {phi_elem.gal}, expected {tuple(expected_phi_gal)}")
    if gam_elem.gal != tuple(expected_gamma_gal):
        raise WrongGalComponent(
            f"gamma carries {gam_elem.gal}, expected {tuple(expected_gamma_gal)}")
    return holds("lparameter-shape", "Galois components match the prescription")
