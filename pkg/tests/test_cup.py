"""Tests for parabolic mask data, the lambda map, the generalized cup
product, and the lifting step."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigamma.cup import (Cup2Class, ParabolicData, check_mu_well_defined,
                          descend_cup, lambda_map, lift_step, mu,
                          parabolic_data)
from phigamma.errors import (BadComposition, BadWitness, LeviNotCommuting,
                             NotALift, NotCentralValued, NotGaloisCompatible)
from phigamma.framed import FramedModule, commutation_residual, make_framed
from phigamma.herr import Cochain, HerrComplex, ext_residual
from phigamma.matrices import SeriesMatrix
from phigamma.period import standard_cyclotomic, tame_extension
from phigamma.verdicts import HOLDS, INCONCLUSIVE

seeds = st.integers(0, 10**9)

R = standard_cyclotomic(3, 1, window=40)
D2 = parabolic_data(2, (1, 1))
D3 = parabolic_data(3, (1, 1, 1))


def diag_const(ring, vals):
    n = len(vals)
    return SeriesMatrix(ring, [
        [ring.constant(vals[i]) if i == j else ring.zero()
         for j in range(n)] for i in range(n)])


def rand_series(rng, ring=R, spread=8):
    q = ring.base.q
    return ring.series({rng.randrange(0, spread): rng.randrange(q)
                        for _ in range(3)})


PHI_L3 = diag_const(R, (2, 1, 2))
GAM_L3 = diag_const(R, (1, 2, 1))


def borel2_module():
    return make_framed(R, diag_const(R, (2, 1)), diag_const(R, (1, 1)),
                       pattern=D2.quotient_pattern(1))


def borel2_lift(rng, M):
    def one(L):
        rows = [[L.entry(i, j) for j in range(2)] for i in range(2)]
        rows[0][1] = rand_series(rng)
        return SeriesMatrix(R, rows)
    return one(M.Phi), one(M.Gam)


def borel3_module():
    return make_framed(R, PHI_L3, GAM_L3, pattern=D3.quotient_pattern(2))


def borel3_lift2(rng):
    def one(L):
        rows = [[L.entry(i, j) for j in range(3)] for i in range(3)]
        rows[0][1] = rand_series(rng)
        rows[1][2] = rand_series(rng)
        return SeriesMatrix(R, rows)
    return one(PHI_L3), one(GAM_L3)


class TestParabolicData:
    def test_borel_gl2(self):
        assert D2.n_levels() == 1
        assert sorted(D2.u_mask(1)) == [(0, 1)]
        assert sorted(D2.central_mask(1)) == [(0, 1)]
        assert D2.u_mask(0) == frozenset()

    def test_borel_gl3(self):
        assert D3.n_levels() == 2
        assert sorted(D3.u_mask(1)) == [(0, 2)]  # the center line
        assert sorted(D3.central_mask(2)) == [(0, 1), (1, 2)]
        assert D3.u_mask(1) < D3.u_mask(2)

    def test_abelian_radical(self):
        d = parabolic_data(3, (2, 1))
        assert d.n_levels() == 1
        assert sorted(d.u_mask(1)) == [(0, 2), (1, 2)]

    def test_bad_compositions(self):
        with pytest.raises(BadComposition):
            parabolic_data(3, (3,))
        with pytest.raises(BadComposition):
            parabolic_data(3, (2, 2))
        with pytest.raises(BadComposition):
            parabolic_data(3, (3, 0))

    def test_ad_rep_is_conjugation(self):
        L = PHI_L3
        A = D3.ad_rep(2, L)
        z = SeriesMatrix(R, [[R.series({1: 2})], [R.series({0: 1})]])
        direct = L * D3.unvectorize_central(2, z) * L.inv()
        assert (D3.vectorize_central(2, direct) - A * z).is_zero()

    def test_json(self):
        assert D3.to_json() == {"n": 3, "blocks": [1, 1, 1]}


class TestLambda:
    def test_identity_pair(self):
        I = SeriesMatrix.identity(R, 2)
        assert (lambda_map(R, I, I) - I).is_zero()

    def test_constant_case_is_commutator(self):
        A = SeriesMatrix(R, [[R.constant(2), R.constant(1)],
                             [R.constant(1), R.constant(1)]])
        B = SeriesMatrix(R, [[R.constant(1), R.constant(2)],
                             [R.constant(0), R.constant(1)]])
        comm = A.inv() * B.inv() * A * B
        assert (lambda_map(R, A, B) - comm).is_zero()

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_lambda_is_one_plus_scaled_residual(self, seed):
        # lambda(a, b) = 1 + gamma(a)^-1 b^-1 (a phi(b) - b gamma(a))
        rng = random.Random(seed)
        a, b = borel3_lift2(rng)
        lam = lambda_map(R, a, b)
        resid = commutation_residual(R, a, b)
        pred = (SeriesMatrix.identity(R, 3) +
                a.apply_gamma().inv() * b.inv() * resid)
        d = lam - pred
        assert all(e.truncate(min(e.hi, 30)).is_zero()
                   for row in d.rows for e in row)

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_factorization_identity(self, seed):
        # with commuting Levi parts and ad_g(x) = g x g^-1:
        # lambda = gamma(a_u)^-1 ad_{gamma(a_l)^-1}(b_u^-1)
        #          ad_{phi(b_l)^-1}(a_u) phi(b_u)
        rng = random.Random(seed)

        def rand_full(L):
            rows = [[L.entry(i, j) for j in range(3)] for i in range(3)]
            for (r, c) in ((0, 1), (1, 2), (0, 2)):
                rows[r][c] = rand_series(rng)
            return SeriesMatrix(R, rows)

        def ad(g, x):
            return D3.qmul(0, D3.qmul(0, g, x), D3.qinv(0, g))

        a, b = rand_full(PHI_L3), rand_full(GAM_L3)
        a_u = D3.qmul(0, PHI_L3.inv(), a)
        b_u = D3.qmul(0, GAM_L3.inv(), b)
        lam = lambda_map(R, a, b, D3, 0)
        rhs = D3.qmul(0, D3.qinv(0, a_u.apply_gamma()),
              D3.qmul(0, ad(PHI_L3.apply_gamma().inv(), D3.qinv(0, b_u)),
              D3.qmul(0, ad(GAM_L3.apply_phi().inv(), a_u),
                      D3.qreduce(b_u.apply_phi(), 0))))
        d = lam - rhs
        assert all(e.truncate(min(e.hi, 30)).is_zero()
                   for row in d.rows for e in row)


class TestMu:
    def test_valid_lift_gives_zero_class(self):
        M = borel2_module()
        # the Levi matrices themselves, extended by zero, are a lift
        cls = mu(D2, 1, M, M.Phi, M.Gam)
        assert cls.is_zero()

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_gl2_matches_ext_residual(self, seed):
        # mu coordinate = gamma(Phi0)^-1 Gam0^-1 * top-right of the
        # extension residual for the same unipotent coordinates
        rng = random.Random(seed)
        M = borel2_module()
        P, G = borel2_lift(rng, M)
        cls = mu(D2, 1, M, P, G)
        Phi0, Gam0 = M.Phi.entry(0, 0), M.Gam.entry(0, 0)
        M0 = make_framed(R, SeriesMatrix(R, [[Phi0]]),
                         SeriesMatrix(R, [[Gam0]]))
        C0 = HerrComplex(M0, "framed")
        x = SeriesMatrix(R, [[Phi0.inv() * P.entry(0, 1)]])
        y = SeriesMatrix(R, [[Gam0.inv() * G.entry(0, 1)]])
        resid = ext_residual(C0, Cochain(1, (x, y)))
        pred = R.apply_gamma(Phi0).inv() * Gam0.inv() * resid.entry(0, 1)
        d = cls.rep.parts[0].entry(0, 0) - pred
        assert d.truncate(min(d.hi, 30)).is_zero()

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_central_perturbation_shifts_by_d1(self, seed):
        rng = random.Random(seed)
        M = borel3_module()
        P, G = borel3_lift2(rng)
        cls = mu(D3, 2, M, P, G)
        C = cls.complex
        z = SeriesMatrix(R, [[rand_series(rng)], [rand_series(rng)]])
        zp = SeriesMatrix(R, [[rand_series(rng)], [rand_series(rng)]])
        I = SeriesMatrix.identity(R, 3)
        P2 = D3.qmul(1, P, I + D3.unvectorize_central(2, z))
        G2 = D3.qmul(1, G, I + D3.unvectorize_central(2, zp))
        cls2 = mu(D3, 2, M, P2, G2)
        shift = cls2.rep.parts[0] - cls.rep.parts[0]
        pred = -C.d1(Cochain(1, (z, zp))).parts[0]
        d = shift - pred
        assert all(e.truncate(min(e.hi, 30)).is_zero()
                   for row in d.rows for e in row)

    def test_not_a_lift(self):
        rng = random.Random(3)
        M = borel2_module()
        P, G = borel2_lift(rng, M)
        wrong = P + SeriesMatrix(R, [[R.one(), R.zero()],
                                     [R.zero(), R.zero()]])
        with pytest.raises(NotALift):
            mu(D2, 1, M, wrong, G)

    def test_pattern_violation_is_not_a_lift(self):
        rng = random.Random(4)
        M = borel2_module()
        P, G = borel2_lift(rng, M)
        low = SeriesMatrix(R, [[R.zero(), R.zero()],
                               [R.series({1: 1}), R.zero()]])
        with pytest.raises(NotALift):
            mu(D2, 1, M, P + low, G)

    def test_levi_not_commuting(self):
        # non-commuting constant Levi blocks for the (2,1) parabolic
        d = parabolic_data(3, (2, 1))
        A = SeriesMatrix(R, [[R.constant(1), R.constant(1), R.zero()],
                             [R.zero(), R.constant(1), R.zero()],
                             [R.zero(), R.zero(), R.constant(1)]])
        B = SeriesMatrix(R, [[R.constant(1), R.zero(), R.zero()],
                             [R.constant(1), R.constant(1), R.zero()],
                             [R.zero(), R.zero(), R.constant(1)]])
        M = FramedModule(R, d.qreduce(A, 1), d.qreduce(B, 1),
                         pattern=d.quotient_pattern(1), validate=False)
        with pytest.raises(LeviNotCommuting):
            mu(d, 1, M, A, B)

    def test_not_central_valued(self):
        # an invalid level-1 pair: its lambda has entries off the center
        rng = random.Random(5)
        P1, G1 = borel3_lift2(rng)
        M1 = FramedModule(R, P1, G1, pattern=D3.quotient_pattern(1),
                          validate=False)
        lam = lambda_map(R, P1, G1, D3, 1)
        assert not (lam - SeriesMatrix.identity(R, 3)).is_zero()
        lift_P = SeriesMatrix(R, [list(r) for r in P1.rows])
        with pytest.raises(NotCentralValued):
            mu(D3, 1, M1, lift_P, G1)


class TestWellDefinedAndLift:
    def test_identical_lifts(self):
        rng = random.Random(6)
        M = borel2_module()
        pair = borel2_lift(rng, M)
        v = check_mu_well_defined(D2, 1, M, pair, pair)
        assert v.status == HOLDS

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_random_pairs_gl3(self, seed):
        rng = random.Random(seed)
        M = borel3_module()
        v = check_mu_well_defined(D3, 2, M, borel3_lift2(rng),
                                  borel3_lift2(rng))
        assert v.status in (HOLDS, INCONCLUSIVE)
        assert v.status == HOLDS  # polynomial data at window 40

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_lift_step_round_trip(self, seed):
        rng = random.Random(seed)
        M = borel2_module()
        P, G = borel2_lift(rng, M)
        cls = mu(D2, 1, M, P, G)
        res = cls.complex.try_coboundary(cls.rep)
        assert res.found
        lifted = lift_step(cls, res.witness)
        # reduction recovers the module and the new class vanishes
        assert (D2.qreduce(lifted.Phi, 1) - M.Phi).is_zero()
        cls2 = mu(D2, 1, M, lifted.Phi, lifted.Gam)
        w = res.sub_window or 30
        assert all(e.truncate(min(e.hi, w)).is_zero()
                   for p in cls2.rep.parts for row in p.rows for e in row)

    def test_gl3_two_step_lift(self):
        rng = random.Random(7)
        M = borel3_module()
        P, G = borel3_lift2(rng)
        cls = mu(D3, 2, M, P, G)
        res = cls.complex.try_coboundary(cls.rep)
        assert res.found
        M1 = lift_step(cls, res.witness)
        assert M1.pattern == D3.quotient_pattern(1)

        def widen(Base):
            rows = [[Base.entry(i, j) for j in range(3)] for i in range(3)]
            rows[0][2] = rand_series(rng)
            return SeriesMatrix(R, rows)
        cls1 = mu(D3, 1, M1, widen(M1.Phi), widen(M1.Gam))
        res1 = cls1.complex.try_coboundary(cls1.rep)
        assert res1.found
        full = lift_step(cls1, res1.witness)
        # top step: the quotient identity is the genuine one
        full.validate()

    def test_bad_witness(self):
        rng = random.Random(8)
        M = borel2_module()
        P, G = borel2_lift(rng, M)
        cls = mu(D2, 1, M, P, G)
        bad = Cochain(1, (SeriesMatrix(R, [[R.one()]]),
                          SeriesMatrix.zero(R, 1, 1)))
        if not cls.is_zero():
            with pytest.raises(BadWitness):
                lift_step(cls, bad)


BASE = standard_cyclotomic(3, 1, window=16)
EXT = tame_extension(BASE, 2)
DE2 = parabolic_data(2, (1, 1))


def ext_class(invariant=True):
    phiL = diag_const(EXT, (2, 1))
    gamL = diag_const(EXT, (1, 1))
    M = make_framed(EXT, phiL, gamL, pattern=DE2.quotient_pattern(1))
    exp = 2 if invariant else 1  # even powers of v are sigma-invariant
    P = SeriesMatrix(EXT, [[phiL.entry(0, 0), EXT.series({exp: 1})],
                           [EXT.zero(), phiL.entry(1, 1)]])
    G = SeriesMatrix(EXT, [[gamL.entry(0, 0), EXT.series({2 * exp: 2})],
                           [EXT.zero(), gamL.entry(1, 1)]])
    return mu(DE2, 1, M, P, G)


class TestDescent:
    def test_base_ring_passthrough(self):
        rng = random.Random(9)
        M = borel2_module()
        cls = mu(D2, 1, M, *borel2_lift(rng, M))
        out = descend_cup(R, cls, cohomology_type_asserted=True)
        assert out is cls and out.cohomology_type_asserted

    def test_invariant_class_descends(self):
        cls = ext_class(invariant=True)
        down = descend_cup(EXT, cls, cohomology_type_asserted=True)
        assert down.complex.ring is BASE
        assert down.cohomology_type_asserted
        assert "cohomology_type_asserted" in down.to_json()
        # exponents halve under v^2 = T
        up_terms = dict(cls.rep.parts[0].entry(0, 0).terms())
        down_terms = dict(down.rep.parts[0].entry(0, 0).terms())
        assert down_terms == {k // 2: v for k, v in up_terms.items()}

    def test_non_invariant_rejected(self):
        cls = ext_class(invariant=False)
        with pytest.raises(NotGaloisCompatible):
            descend_cup(EXT, cls)
