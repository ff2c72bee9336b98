"""Higher cup products for parabolic lifting.

Setting: a block parabolic P of GL_n with Levi L and unipotent radical
U, filtered by the upper central series U_0 = 1 < U_1 < ... < U_{k-1} = U
(k = number of blocks).  In entry terms, with block distance
delta(r, c) = block(c) - block(r), the mask of U_i is {delta >= k - i}
and the central coordinates of U_i/U_{i-1} sit at delta = k - i exactly.
Arithmetic in the quotient P/U_j is matrix arithmetic followed by
zeroing the U_j mask.

The obstruction to lifting a framed module one step up the series is
measured by

    lambda(alpha, beta) = gamma(alpha)^-1 * beta^-1 * alpha * phi(beta),

which satisfies lambda = 1 + gamma(alpha)^-1 beta^-1 * R where R is the
commutation residual alpha*phi(beta) - beta*gamma(alpha); for lifts of a
valid module it is congruent to 1 modulo the central coordinates, and
its log (identity-minus at a central level) is a degree-2 cochain of the
framed complex for the adjoint action of the Levi parts.

Factorization identity (with ad_g(x) = g*x*g^-1, and Levi parts
commuting in the sense lambda(alpha_l, beta_l) = 1):

    lambda(alpha, beta) = gamma(alpha_u)^-1
                          * ad_{gamma(alpha_l)^-1}(beta_u^-1)
                          * ad_{phi(beta_l)^-1}(alpha_u)
                          * phi(beta_u)

and perturbing the lifts by central 1+z, 1+z' shifts the class by

    (-gamma + ad_{phi(beta_l)^-1})(z) + (phi - ad_{gamma(alpha_l)^-1})(z')
        = -d1(z, z')

in the adjoint framed complex, which is what makes the class well
defined up to coboundaries.
"""

from dataclasses import dataclass, field

from .errors import (BadComposition, BadWitness, LeviNotCommuting,
                     NotALift, NotCentralValued, NotGaloisCompatible)
from .framed import FramedModule, commutation_residual, pattern_ok
from .herr import Cochain, HerrComplex, check_invariance, descend_cochain
from .matrices import SeriesMatrix
from .period import project_to_base
from .verdicts import holds, inconclusive


def _mask_mul(mask_a, mask_b, n):
    out = set()
    by_row = {}
    for (r, c) in mask_b:
        by_row.setdefault(r, []).append(c)
    for (r, m) in mask_a:
        for c in by_row.get(m, ()):
            out.add((r, c))
    return frozenset(out)


class ParabolicData:
    """Block-parabolic mask data: the upper central series of the
    unipotent radical and the Levi adjoint representations on its
    graded pieces."""

    def __init__(self, n, blocks):
        blocks = tuple(blocks)
        if len(blocks) < 2 or any(b < 1 for b in blocks) or sum(blocks) != n:
            raise BadComposition(
                f"{blocks} is not a composition of {n} with >= 2 parts")
        self.n = n
        self.blocks = blocks
        self.k = len(blocks)
        self.block_of = []
        for b, size in enumerate(blocks):
            self.block_of.extend([b] * size)
        self._verify_centrality()

    def delta(self, r, c):
        return self.block_of[c] - self.block_of[r]

    def levi_mask(self):
        return frozenset((r, c) for r in range(self.n) for c in range(self.n)
                         if self.delta(r, c) == 0)

    def u_mask(self, i):
        """Entry mask of U_i: block distance >= k - i.  U_0 is empty."""
        if not 0 <= i <= self.k - 1:
            raise BadComposition(f"level {i} out of range 0..{self.k - 1}")
        return frozenset((r, c) for r in range(self.n) for c in range(self.n)
                         if self.delta(r, c) >= self.k - i)

    def central_mask(self, i):
        """Coordinates of U_i/U_{i-1}: block distance exactly k - i."""
        if not 1 <= i <= self.k - 1:
            raise BadComposition(f"level {i} out of range 1..{self.k - 1}")
        return frozenset((r, c) for r in range(self.n) for c in range(self.n)
                         if self.delta(r, c) == self.k - i)

    def quotient_pattern(self, j):
        """Allowed entries of P/U_j: the parabolic minus the U_j mask."""
        killed = self.u_mask(j)
        return frozenset((r, c) for r in range(self.n) for c in range(self.n)
                         if self.delta(r, c) >= 0 and (r, c) not in killed)

    def central_coords(self, i):
        return sorted(self.central_mask(i))

    def n_levels(self):
        return self.k - 1

    def _verify_centrality(self):
        full = self.u_mask(self.k - 1)
        for i in range(1, self.k):
            ui = self.u_mask(i)
            comm = _mask_mul(ui, full, self.n) | _mask_mul(full, ui, self.n)
            if not comm <= self.u_mask(i - 1):
                raise BadComposition(
                    f"U_{i}/U_{i - 1} is not central in U/U_{i - 1}")

    # -- quotient arithmetic ------------------------------------------------

    def qreduce(self, mat, j):
        """Kill the U_j mask: the canonical representative in P/U_j."""
        killed = self.u_mask(j)
        ring = mat.ring
        return SeriesMatrix(ring, [
            [ring.zero(mat.rows[r][c].hi) if (r, c) in killed
             else mat.rows[r][c]
             for c in range(mat.ncols)] for r in range(mat.nrows)])

    def qmul(self, j, a, b):
        return self.qreduce(a * b, j)

    def qinv(self, j, a):
        return self.qreduce(a.inv(), j)

    # -- Levi adjoint action on a central level ------------------------------

    def levi_part(self, mat):
        ring = mat.ring
        keep = self.levi_mask()
        return SeriesMatrix(ring, [
            [mat.rows[r][c] if (r, c) in keep else ring.zero(mat.rows[r][c].hi)
             for c in range(mat.ncols)] for r in range(mat.nrows)])

    def ad_rep(self, i, L, L_inv=None):
        """Matrix of z -> L*z*L^-1 on the level-i central coordinates:
        entry [(r,c),(r',c')] = L[r,r'] * L^-1[c',c]."""
        L_inv = L.inv() if L_inv is None else L_inv
        coords = self.central_coords(i)
        ring = L.ring
        return SeriesMatrix(ring, [
            [L.entry(r, rp) * L_inv.entry(cp, c) for (rp, cp) in coords]
            for (r, c) in coords])

    def vectorize_central(self, i, mat):
        return SeriesMatrix(mat.ring, [[mat.entry(r, c)]
                                       for (r, c) in self.central_coords(i)])

    def unvectorize_central(self, i, vec):
        ring = vec.ring
        out = [[ring.zero() for _ in range(self.n)] for _ in range(self.n)]
        for idx, (r, c) in enumerate(self.central_coords(i)):
            out[r][c] = vec.entry(idx, 0)
        return SeriesMatrix(ring, out)

    def to_json(self):
        return {"n": self.n, "blocks": list(self.blocks)}

    def __repr__(self):
        return f"ParabolicData(n={self.n}, blocks={self.blocks})"


def parabolic_data(n, blocks):
    return ParabolicData(n, blocks)


def lambda_map(ring, alpha, beta, data=None, j=None):
    """gamma(alpha)^-1 * beta^-1 * alpha * phi(beta), optionally computed
    in the quotient P/U_j."""
    if data is None:
        return (alpha.apply_gamma().inv() * beta.inv() * alpha *
                beta.apply_phi())
    ga_inv = data.qinv(j, alpha.apply_gamma())
    b_inv = data.qinv(j, beta)
    out = data.qmul(j, ga_inv, b_inv)
    out = data.qmul(j, out, alpha)
    return data.qmul(j, out, data.qreduce(beta.apply_phi(), j))


@dataclass
class Cup2Class:
    """The generalized cup product: a degree-2 cochain of the framed
    complex for the Levi adjoint action at one central level, plus the
    context needed to correct the lifts."""
    rep: Cochain
    complex: HerrComplex
    data: ParabolicData
    level: int
    Phi_lift: SeriesMatrix = None
    Gam_lift: SeriesMatrix = None
    cohomology_type_asserted: bool = False

    def is_zero(self):
        return all(p.is_zero() for p in self.rep.parts)

    def to_json(self):
        out = {"level": self.level, "parabolic": self.data.to_json(),
               "rep": self.rep.to_json()}
        if self.cohomology_type_asserted:
            out["cohomology_type_asserted"] = True
        return out


def _adjoint_complex(data, i, M_levi_phi, M_levi_gam):
    ring = M_levi_phi.ring
    Phi_ad = data.ad_rep(i, M_levi_phi)
    Gam_ad = data.ad_rep(i, M_levi_gam)
    module = FramedModule(ring, Phi_ad, Gam_ad)
    return HerrComplex(module, "framed")


def mu(data, i, M_i, Phi_lift, Gam_lift):
    """The generalized cup product of a lift of M_i one step up the
    central series.

    M_i is a framed pair on the P/U_i pattern; the lifts live on
    P/U_{i-1}.  Computes lambda of the lifts in P/U_{i-1}, checks it is
    central at level i, and packages its log as a degree-2 cochain of
    the Levi adjoint framed complex.
    """
    j = i - 1
    ring = M_i.ring
    for m in (Phi_lift, Gam_lift):
        if not pattern_ok(m, data.quotient_pattern(j)):
            raise NotALift("lift leaves the P/U_{i-1} pattern")
    if not (data.qreduce(Phi_lift, i) - M_i.Phi).is_zero() or \
            not (data.qreduce(Gam_lift, i) - M_i.Gam).is_zero():
        raise NotALift("lifts do not reduce to the given module")
    a_l = data.levi_part(Phi_lift)
    b_l = data.levi_part(Gam_lift)
    if not (lambda_map(ring, a_l, b_l) -
            SeriesMatrix.identity(ring, data.n)).is_zero():
        raise LeviNotCommuting("lambda of the Levi parts is not 1")
    lam = lambda_map(ring, Phi_lift, Gam_lift, data, j)
    log = lam - SeriesMatrix.identity(ring, data.n, lam.hi)
    central = data.central_mask(i)
    for r in range(data.n):
        for c in range(data.n):
            if (r, c) not in central and not log.entry(r, c).is_zero():
                raise NotCentralValued(
                    f"lambda has a non-central entry at {(r, c)}")
    C = _adjoint_complex(data, i, a_l, b_l)
    rep = Cochain(2, (data.vectorize_central(i, log),))
    return Cup2Class(rep, C, data, i, Phi_lift, Gam_lift)


def check_mu_well_defined(data, i, M_i, lifts_a, lifts_b, depth=4):
    """The classes of two lifts differ by a coboundary of the adjoint
    complex; exhibits the witness via the windowed coboundary search.

    Found -> Holds; a missed search is Inconclusive with the window
    parameters, never a failure.
    """
    cls_a = mu(data, i, M_i, *lifts_a)
    cls_b = mu(data, i, M_i, *lifts_b)
    diff = Cochain(2, tuple(pa - pb for pa, pb in
                            zip(cls_a.rep.parts, cls_b.rep.parts)))
    res = cls_a.complex.try_coboundary(diff, depth)
    if res.found:
        return holds("mu-well-defined",
                     "difference of lift classes is a coboundary",
                     window=cls_a.complex.ring.window,
                     sub_window=res.sub_window,
                     witness=res.witness.to_json())
    return inconclusive("mu-well-defined",
                        f"no coboundary witness in window ({res.detail})",
                        window=cls_a.complex.ring.window, depth=depth)


def lift_step(cls, witness):
    """Correct the lifts by a central witness with d1(witness) = rep.

    Returns the corrected framed pair on the P/U_{i-1} pattern; the
    commutation identity is revalidated in the quotient and the
    reduction to level i is checked to recover the original pair.
    """
    data, i = cls.data, cls.level
    j = i - 1
    C = cls.complex
    ring = C.ring
    d_w = C.d1(witness).parts[0]
    target = cls.rep.parts[0]
    diff = d_w - target
    if not diff.truncate(min(diff.hi, ring.window)).is_zero():
        raise BadWitness("d1(witness) does not match the class")
    x, y = witness.parts
    I = SeriesMatrix.identity(ring, data.n)
    Zx = I + data.unvectorize_central(i, x)
    Zy = I + data.unvectorize_central(i, y)
    Phi2 = data.qmul(j, cls.Phi_lift, Zx)
    Gam2 = data.qmul(j, cls.Gam_lift, Zy)
    resid = data.qreduce(commutation_residual(ring, Phi2, Gam2), j)
    if not resid.is_zero():
        raise BadWitness("corrected pair fails commutation mod U_{i-1}")
    if not (data.qreduce(Phi2, i) - data.qreduce(cls.Phi_lift, i)).is_zero():
        raise BadWitness("correction moved the level-i reduction")
    validate = j == 0  # the quotient identity is the full one at the top
    out = FramedModule(ring, Phi2, Gam2,
                       pattern=data.quotient_pattern(j), validate=validate)
    if not validate:
        if not pattern_ok(Phi2, data.quotient_pattern(j)) or \
                not pattern_ok(Gam2, data.quotient_pattern(j)):
            raise BadWitness("corrected pair leaves the quotient pattern")
    return out


def descend_cup(ext_ring, cls, cohomology_type_asserted=False):
    """Re-express an invariant class in base-ring coordinates.

    The identification of the descended class with a base-ring
    cohomology class relies on a cohomology-type hypothesis that cannot
    be verified at finite window; the caller asserts it and the
    assertion is recorded on the result.
    """
    if ext_ring.parent is None:
        cls.cohomology_type_asserted = cohomology_type_asserted
        return cls
    if check_invariance(ext_ring, cls.rep).status != "holds":
        raise NotGaloisCompatible("class representative is not invariant")
    parent_ring = ext_ring.parent[0]

    def project_matrix(mat):
        for idx, g in enumerate(ext_ring.galois.generators):
            word = ext_ring.galois.generator_word(idx)
            if not (mat.apply_galois(word) - mat).is_zero():
                raise NotGaloisCompatible("adjoint data is not invariant")
        return SeriesMatrix(parent_ring, [
            [project_to_base(ext_ring, e) for e in row] for row in mat.rows])

    module = cls.complex.module
    down_module = FramedModule(parent_ring, project_matrix(module.Phi),
                               project_matrix(module.Gam))
    down_rep = descend_cochain(ext_ring, cls.rep)
    out = Cup2Class(down_rep, HerrComplex(down_module, "framed"),
                    cls.data, cls.level,
                    cohomology_type_asserted=cohomology_type_asserted)
    return out
