"""Tests for the three-term complexes, extensions, dual-number lifts,
restriction/averaging, and windowed rank estimates."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigamma.errors import AveragingUnavailable, NotACocycle, NotALift
from phigamma.framed import make_framed, change_basis
from phigamma.herr import (Cochain, DualMatrix, HerrComplex,
                           check_invariance, descend_cochain,
                           dual_commutation_residual, estimate_h_ranks,
                           ext_from_cocycle, ext_is_split, ext_residual,
                           lift_dual_numbers, obstruction, restrict_to_E)
from phigamma.matrices import SeriesMatrix
from phigamma.period import standard_cyclotomic, tame_extension
from phigamma.verdicts import FAILS, HOLDS

seeds = st.integers(0, 10**9)

R = standard_cyclotomic(3, 1, window=24)


def rand_uni(rng, ring, n, depth=1, spread=4):
    rows = [[e for e in r] for r in SeriesMatrix.identity(ring, n).rows]
    q = ring.base.q
    for i in range(n):
        for j in range(n):
            if rng.random() < 0.7:
                rows[i][j] = rows[i][j] + ring.series(
                    {depth + rng.randrange(spread): rng.randrange(q)})
    return SeriesMatrix(ring, rows)


def rand_module(rng, ring=R, n=2):
    I = SeriesMatrix.identity(ring, n)
    return change_basis(make_framed(ring, I, I), rand_uni(rng, ring, n))


def rand_vec(rng, ring=R, n=2, lo=-2, spread=8):
    q = ring.base.q
    return SeriesMatrix(ring, [
        [ring.series({rng.randrange(lo, lo + spread): rng.randrange(q)
                      for _ in range(3)})] for _ in range(n)])


def rand_mat(rng, ring=R, n=2, lo=-1, spread=6):
    q = ring.base.q
    return SeriesMatrix(ring, [
        [ring.series({rng.randrange(lo, lo + spread): rng.randrange(q)
                      for _ in range(2)}) for _ in range(n)]
        for _ in range(n)])


def rand_cochain(rng, C, degree):
    make = rand_mat if C.kind == "adjoint" else rand_vec
    return Cochain(degree, tuple(
        make(rng, C.ring, C.n) for _ in range(C.n_parts(degree))))


def truncated_zero(mat, hi=14):
    return all(e.is_zero() or e.lo >= min(e.hi, hi)
               for r in mat.rows for e in r)


class TestDifferentials:
    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_d1_d0_vanishes_all_kinds(self, seed):
        rng = random.Random(seed)
        M = rand_module(rng)
        for kind in ("plain", "framed", "adjoint"):
            C = HerrComplex(M, kind)
            z = rand_cochain(rng, C, 0)
            out = C.d1(C.d0(z)).parts[0]
            assert out.is_zero()

    def test_trivial_module_plain_kernel(self):
        I = SeriesMatrix.identity(R, 1)
        C = HerrComplex(make_framed(R, I, I), "plain")
        one = Cochain(0, (SeriesMatrix(R, [[R.one()]]),))
        assert all(p.is_zero() for p in C.d0(one).parts)

    def test_unramified_class_is_cocycle(self):
        # (1, 0) over the trivial rank-1 module: a 1-cocycle in every kind
        I = SeriesMatrix.identity(R, 1)
        M = make_framed(R, I, I)
        for kind in ("plain", "framed"):
            C = HerrComplex(M, kind)
            c = Cochain(1, (SeriesMatrix(R, [[R.one()]]),
                            SeriesMatrix.zero(R, 1, 1)))
            assert C.is_cocycle(c).status == HOLDS

    def test_non_cocycle_detected(self):
        I = SeriesMatrix.identity(R, 1)
        C = HerrComplex(make_framed(R, I, I), "plain")
        c = Cochain(1, (SeriesMatrix(R, [[R.variable()]]),
                        SeriesMatrix.zero(R, 1, 1)))
        assert C.is_cocycle(c).status == FAILS


class TestCoboundarySearch:
    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_round_trip_degree1(self, seed):
        rng = random.Random(seed)
        M = rand_module(rng)
        for kind in ("plain", "framed", "adjoint"):
            C = HerrComplex(M, kind)
            z = rand_cochain(rng, C, 0)
            res = C.try_coboundary(C.d0(z))
            assert res.found and res.sub_window is not None

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_round_trip_degree2(self, seed):
        rng = random.Random(seed)
        M = rand_module(rng)
        C = HerrComplex(M, "framed")
        res = C.try_coboundary(C.d1(rand_cochain(rng, C, 1)))
        assert res.found

    def test_witness_reverifies(self):
        rng = random.Random(11)
        M = rand_module(rng)
        C = HerrComplex(M, "plain")
        c = C.d0(Cochain(0, (rand_vec(rng),)))
        res = C.try_coboundary(c)
        diff = C.d(res.witness)
        for dp, cp in zip(diff.parts, c.parts):
            r = dp - cp
            assert r.truncate(min(r.hi, res.sub_window)).is_zero()

    def test_unramified_class_not_coboundary(self):
        I = SeriesMatrix.identity(R, 1)
        C = HerrComplex(make_framed(R, I, I), "framed")
        c = Cochain(1, (SeriesMatrix(R, [[R.one()]]),
                        SeriesMatrix.zero(R, 1, 1)))
        res = C.try_coboundary(c)
        assert not res.found

    def test_zero_is_coboundary(self):
        I = SeriesMatrix.identity(R, 1)
        C = HerrComplex(make_framed(R, I, I), "plain")
        res = C.try_coboundary(C.zero_cochain(1))
        assert res.found


class TestExtensions:
    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_cocycle_blocks_commute(self, seed):
        rng = random.Random(seed)
        M = rand_module(rng)
        C = HerrComplex(M, "framed")
        xy = C.d0(Cochain(0, (rand_vec(rng),)))
        X, Y = ext_from_cocycle(C, xy)
        assert (X * Y.apply_phi() - Y * X.apply_gamma()).is_zero()

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_residual_formula(self, seed):
        # top-right residual column equals -Phi*phi(Gam)*d1(x, y)
        rng = random.Random(seed)
        M = rand_module(rng)
        C = HerrComplex(M, "framed")
        xy = Cochain(1, (rand_vec(rng), rand_vec(rng)))
        resid = ext_residual(C, xy)
        pred = -(M.Phi * M.Gam.apply_phi()) * C.d1(xy).parts[0]
        n = C.n
        for i in range(n):
            d = resid.entry(i, n) - pred.entry(i, 0)
            assert d.truncate(min(d.hi, 12)).is_zero()
        for i in range(n + 1):
            for j in range(n):
                assert truncated_zero(
                    SeriesMatrix(R, [[resid.entry(i, j)]]), 12)

    def test_non_cocycle_rejected(self):
        rng = random.Random(3)
        M = rand_module(rng)
        C = HerrComplex(M, "framed")
        with pytest.raises(NotACocycle):
            ext_from_cocycle(C, Cochain(1, (rand_vec(rng), rand_vec(rng))))

    def test_split_extension(self):
        rng = random.Random(4)
        M = rand_module(rng)
        C = HerrComplex(M, "framed")
        xy = C.d0(Cochain(0, (rand_vec(rng),)))
        res = ext_is_split(C, xy)
        assert res.found and res.witness.nrows == C.n + 1


class TestDualNumbers:
    def test_arithmetic(self):
        rng = random.Random(5)
        A = DualMatrix(rand_uni(rng, R, 2), rand_mat(rng))
        B = DualMatrix(rand_uni(rng, R, 2), rand_mat(rng))
        prod = A * B
        assert (prod.main - A.main * B.main).is_zero()
        eps = A.main * B.eps + A.eps * B.main
        assert (prod.eps - eps).is_zero()
        ai = A.inv()
        ident = A * ai
        assert ident.main.is_identity() and truncated_zero(ident.eps)

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_lift_and_obstruction_of_cocycle(self, seed):
        rng = random.Random(seed)
        M = rand_module(rng)
        C = HerrComplex(M, "adjoint")
        xy = C.d0(Cochain(0, (rand_mat(rng),)))
        Pt, Gt = lift_dual_numbers(M, xy)
        o = obstruction(M, Pt, Gt)
        assert truncated_zero(o)

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_eps_residual_formula(self, seed):
        # eps-part of the commutation residual is -d1_adj(X, Y)*Phi*phi(Gam)
        rng = random.Random(seed)
        M = rand_module(rng)
        C = HerrComplex(M, "adjoint")
        xy = Cochain(1, (rand_mat(rng), rand_mat(rng)))
        Pt, Gt = lift_dual_numbers(M, xy, require_cocycle=False)
        lhs = dual_commutation_residual(Pt, Gt).eps
        rhs = -(C.d1(xy).parts[0] * (M.Phi * M.Gam.apply_phi()))
        assert truncated_zero(lhs - rhs)

    @settings(max_examples=8, deadline=None)
    @given(seeds)
    def test_obstruction_shift_by_coboundary(self, seed):
        rng = random.Random(seed)
        M = rand_module(rng)
        C = HerrComplex(M, "adjoint")
        xy = Cochain(1, (rand_mat(rng), rand_mat(rng)))
        Pt1, Gt1 = lift_dual_numbers(M, xy, require_cocycle=False)
        dW = C.d0(Cochain(0, (rand_mat(rng),)))
        xy2 = Cochain(1, tuple(a + b for a, b in zip(xy.parts, dW.parts)))
        Pt2, Gt2 = lift_dual_numbers(M, xy2, require_cocycle=False)
        o1 = obstruction(M, Pt1, Gt1)
        o2 = obstruction(M, Pt2, Gt2)
        assert truncated_zero(o2 - o1)

    def test_non_cocycle_lift_rejected(self):
        rng = random.Random(6)
        M = rand_module(rng)
        with pytest.raises(NotACocycle):
            lift_dual_numbers(M, Cochain(1, (rand_mat(rng), rand_mat(rng))))

    def test_wrong_reduction_rejected(self):
        rng = random.Random(7)
        M = rand_module(rng)
        I = SeriesMatrix.identity(R, 2)
        with pytest.raises(NotALift):
            obstruction(M, DualMatrix(I), DualMatrix(M.Gam))

    def test_masked_obstruction(self):
        rng = random.Random(8)
        M = rand_module(rng)
        C = HerrComplex(M, "adjoint")
        xy = C.d0(Cochain(0, (rand_mat(rng),)))
        Pt, Gt = lift_dual_numbers(M, xy)
        full = frozenset((i, j) for i in range(2) for j in range(2))
        obstruction(M, Pt, Gt, pattern=full)


BASE = standard_cyclotomic(3, 1, window=12)
EXT = tame_extension(BASE, 2)


class TestRestrictionDescent:
    def test_round_trip(self):
        c = Cochain(1, (SeriesMatrix(BASE, [[BASE.series({-1: 2, 0: 1, 3: 2})]]),
                        SeriesMatrix(BASE, [[BASE.series({1: 1})]])))
        up = restrict_to_E(EXT, c)
        # exponents double: the base variable is the square of the new one
        assert dict(up.parts[0].entry(0, 0).terms()) == {-2: (2,), 0: (1,), 6: (2,)}
        assert check_invariance(EXT, up).status == HOLDS
        down = descend_cochain(EXT, up)
        for pu, pd in zip(c.parts, down.parts):
            assert (pu - pd).is_zero()

    def test_averaging_kills_odd_part(self):
        odd = Cochain(1, (SeriesMatrix(EXT, [[EXT.series({1: 1, 2: 2})]]),
                          SeriesMatrix(EXT, [[EXT.series({3: 1})]])))
        assert check_invariance(EXT, odd).status == FAILS
        av = descend_cochain(EXT, odd)
        assert dict(av.parts[0].entry(0, 0).terms()) == {1: (2,)}
        assert av.parts[1].entry(0, 0).is_zero()

    def test_averaging_unavailable_when_p_divides(self):
        # unramified degree-3 extension at p = 3: |Gal| = 3 is not invertible
        ext3 = tame_extension(standard_cyclotomic(3, 1, window=12), 1, 3)
        coeff = tuple([0, 1] + [0] * (ext3.base.f - 2))
        moved = Cochain(1, (SeriesMatrix(ext3, [[ext3.series({0: coeff})]]),
                            SeriesMatrix(ext3, [[ext3.zero()]])))
        assert check_invariance(ext3, moved).status == FAILS
        with pytest.raises(AveragingUnavailable):
            descend_cochain(ext3, moved)

    def test_base_ring_passthrough(self):
        c = Cochain(1, (SeriesMatrix(BASE, [[BASE.one()]]),
                        SeriesMatrix(BASE, [[BASE.zero()]])))
        assert restrict_to_E(BASE, c) is c
        assert descend_cochain(BASE, c) is c


class TestRankEstimates:
    def test_trivial_rank1(self):
        I = SeriesMatrix.identity(R, 1)
        C = HerrComplex(make_framed(R, I, I), "plain")
        prof = estimate_h_ranks(C, span=5, depth=2)
        lo, up = prof.bounds[0]
        assert lo == up == 1  # the constants are fixed
        assert all(b[0] <= b[1] for b in prof.bounds.values())

    def test_twisted_rank1_no_fixed_vectors(self):
        M = make_framed(R, SeriesMatrix(R, [[R.constant(2)]]),
                        SeriesMatrix(R, [[R.one()]]))
        prof = estimate_h_ranks(HerrComplex(M, "plain"), span=5, depth=2)
        assert prof.bounds[0] == (0, 0)

    def test_monotone_under_span_growth(self):
        I = SeriesMatrix.identity(R, 1)
        C = HerrComplex(make_framed(R, I, I), "plain")
        small = estimate_h_ranks(C, span=4, depth=1)
        big = estimate_h_ranks(C, span=7, depth=1)
        for d in (0, 1, 2):
            assert big.bounds[d][1] <= small.bounds[d][1]
            assert big.bounds[d][0] >= small.bounds[d][0] or d != 0

    def test_json_shape(self):
        I = SeriesMatrix.identity(R, 1)
        C = HerrComplex(make_framed(R, I, I), "plain")
        data = estimate_h_ranks(C, span=4, depth=1).to_json()
        assert {e["deg"] for e in data["h"]} == {0, 1, 2}
        assert data["window"] == R.window
