import math
import random

import numpy as np
import pytest

from podles.expr import parse_expr
from podles.operators import BandedOp, BlockOp
from podles.qalgebra import NCPoly
from podles.reps import build_disk_rep, odd_part
from podles.spectral import mu_triple, pi_triple
from podles.index import (
    CocyclePair,
    DecayCheckError,
    aux_for,
    block_identity,
    bott_proximity,
    chern0,
    flip_sign_perturbation,
    fredholm_index,
    fundamental_projector,
    pairing,
    phi0,
    phi2,
    pprime_eigenbasis,
    projector_p,
    projector_pprime,
    series_f,
    series_f_terms,
    traceclass_proxy,
)

Q_GRID = (0.3, 0.5, 0.7, 0.9)


class TestRangeProjector:
    def test_p_is_rank_one(self):
        for q in (0.3, 0.9):
            R = build_disk_rep(+1, q, 50)
            p = projector_p(R)
            assert p.verify(1e-10)
            d = p.op.blocks[0][0].dense()
            expected = np.zeros_like(d)
            expected[0, 0] = 1.0
            assert np.abs(d - expected).max() <= 1e-12

    def test_astar_annihilates_range(self):
        R = build_disk_rep(+1, 0.5, 50)
        p = projector_p(R).op.blocks[0][0]
        assert (R["a*"] @ p).max_abs_on_window() <= 1e-12

    def test_b_squared_scales_range(self):
        q = 0.5
        R = build_disk_rep(+1, q, 50)
        p = projector_p(R).op.blocks[0][0]
        resid = (R["b"] @ R["b"] @ p) - p.scale(q**4)
        assert resid.max_abs_on_window() <= 1e-12

    def test_requires_diagonal_b(self):
        from podles.reps import build_spin_rep

        with pytest.raises(ValueError):
            projector_p(build_spin_rep(+1, 0.5, 10))


class TestPprime:
    def test_numeric_projector(self):
        for q in Q_GRID:
            mu = mu_triple(q, 60)
            pp = projector_pprime(mu)
            assert pp.idem_residual <= 1e-12
            assert pp.adj_residual <= 1e-12

    def test_eigenbasis_actions(self):
        """The one-sided amplified p' kills |n>^0, fixes |n>^1, and treats
        the extra bottom vector by chirality."""
        q, N = 0.5, 40
        mu = mu_triple(q, N)
        for chi, sign in ((0, +1), (1, -1)):
            # assemble the one-sided 2x2 amplified matrix directly
            R = mu.reps[chi]
            ident = BandedOp.identity(R.basis)
            P = BlockOp([
                [(ident + R["b"]).scale(0.5), R["a*"].scale(0.5)],
                [R["a"].scale(0.5), (ident - R["b"].scale(q**-2)).scale(0.5)],
            ])
            dense = P.dense()
            vecs = pprime_eigenbasis(q, N, sign)
            for (kind, n), v in vecs.items():
                img = dense @ v
                if kind == "0":
                    assert np.abs(img).max() <= 1e-13
                elif kind == "1":
                    assert np.abs(img - v)[: 2 * N - 2].max() <= 1e-13
                else:
                    if sign > 0:
                        assert np.abs(img).max() <= 1e-13
                    else:
                        assert np.abs(img - v).max() <= 1e-13

    def test_compressed_sign_matrix_elements(self):
        """F_{p'} |n>^1_+ = sqrt(1-q^{4n}) |n>^1_-."""
        q, N = 0.5, 30
        plus = pprime_eigenbasis(q, N, +1)
        minus = pprime_eigenbasis(q, N, -1)
        for n in range(1, N - 1):
            got = float(minus[("1", n)] @ plus[("1", n)])  # F' acts as identity coordinates
            assert abs(got - math.sqrt(1 - q ** (4 * n))) <= 1e-12
        # the extra minus-side vector is orthogonal to the flipped plus range
        overlaps = [abs(float(minus[("z", 0)] @ plus[("1", n)])) for n in range(1, N - 1)]
        assert max(overlaps) <= 1e-12

    def test_bott_proximity(self):
        assert bott_proximity() <= 1e-2


class TestChern0:
    def test_fundamental(self):
        mu = mu_triple(0.5, 80)
        fund = fundamental_projector(mu)
        assert chern0(fund.op, mu.F, mu.gamma) == pytest.approx(1.0, abs=1e-12)

    def test_b_geometric_series(self):
        for q in (0.3, 0.7):
            mu = mu_triple(q, 120)
            val = chern0(mu.represent(NCPoly.gen("b")), mu.F, mu.gamma)
            assert val == pytest.approx(2 * q**2 / (1 - q**2), abs=1e-9)

    def test_pprime_both_triples(self):
        for q in (0.5, 0.7):
            mu = mu_triple(q, 100)
            pp = projector_pprime(mu)
            F, G, _, _ = aux_for(pp.op, mu)
            assert chern0(pp.op, F, G) == pytest.approx(-1.0, abs=1e-9)
            pi = pi_triple(q, 100)
            pp_pi = projector_pprime(pi)
            Fp, Gp, _, _ = aux_for(pp_pi.op, pi)
            assert chern0(pp_pi.op, Fp, Gp) == pytest.approx(-1.0, abs=1e-8)

    def test_reduced_trace_route(self):
        q = 0.5
        pi = pi_triple(q, 80)
        pp = projector_pprime(pi)
        F, G, _, _ = aux_for(pp.op, pi)
        full = chern0(pp.op, F, G)
        rho_b = odd_part(NCPoly.gen("b"), pi.reps[0], pi.reps[1])
        _, sums, valid = rho_b.level_diag_sums()
        reduced = (1 - q**-2) * float(sums[valid].sum())
        assert abs(full - reduced) <= 1e-12

    def test_traceclass_proxy_geometric(self):
        pi = pi_triple(0.5, 60)
        sums, fit = traceclass_proxy(pi.represent(NCPoly.gen("b")), pi.F)
        assert fit.is_rapid_decay
        assert fit.rate <= 0.56  # entries ~ q^{2l}, level sums ~ (2l+1) q^{2l}


class TestFredholm:
    def test_pprime_index_grid(self):
        for q in Q_GRID:
            mu = mu_triple(q, 100)
            pp = projector_pprime(mu)
            F, G, _, _ = aux_for(pp.op, mu)
            res = fredholm_index(pp.op, F, G)
            assert res.conclusive
            assert res.index == -1
            assert res.gap_ratio >= 10
            assert res.sv_min_kept == pytest.approx(math.sqrt(1 - q**4), abs=1e-8)

    def test_identity_and_fundamental(self):
        mu = mu_triple(0.5, 60)
        assert fredholm_index(block_identity(mu), mu.F, mu.gamma).index == 0
        assert fredholm_index(fundamental_projector(mu).op, mu.F, mu.gamma).index == 1

    def test_integrality_by_construction(self):
        mu = mu_triple(0.9, 100)
        pp = projector_pprime(mu)
        F, G, _, _ = aux_for(pp.op, mu)
        res = fredholm_index(pp.op, F, G)
        assert isinstance(res.index, int)

    def test_finite_rank_perturbation_invariance(self):
        for q in (0.5, 0.9):
            mu = mu_triple(q, 100)
            pp = projector_pprime(mu)
            F, G, _, _ = aux_for(pp.op, mu)
            for k in (1, 2, 5):
                Fp = flip_sign_perturbation(mu, k, factor=2)
                res = fredholm_index(pp.op, Fp, G)
                assert res.conclusive and res.index == -1

    def test_truncation_doubling(self):
        q = 0.7
        vals = {}
        for N in (100, 200):
            mu = mu_triple(q, N)
            pp = projector_pprime(mu)
            F, G, _, _ = aux_for(pp.op, mu)
            vals[N] = (fredholm_index(pp.op, F, G).index, chern0(pp.op, F, G))
        assert vals[100][0] == vals[200][0] == -1
        assert abs(vals[100][1] - vals[200][1]) <= 1e-6

    def test_rejects_non_graded_projector(self):
        mu = mu_triple(0.5, 40)
        ident = BandedOp.identity(mu.basis)
        off = BlockOp([[None, ident], [ident, None]])
        with pytest.raises(ValueError):
            fredholm_index(off, mu.F, mu.gamma)


class TestSeriesF:
    def test_terms_at_zero(self):
        terms = series_f_terms(0.0, 5)
        assert terms[0] == 1.0
        assert all(t == 0.0 for t in terms[1:])

    def test_integer_value_on_grid(self):
        for k in range(1, 10):
            x = 0.01 * k * k
            sf = series_f(x)
            assert abs(sf.value - 1.0) <= 1e-10
            assert sf.tail_bound < 1e-10

    def test_term_bound(self):
        for x in (0.2, 0.6, 0.9):
            for n, t in enumerate(series_f_terms(x, 40), start=1):
                assert abs(t) <= (4 * n + 2) * x ** (n - 1) + 1e-15

    def test_domain(self):
        with pytest.raises(ValueError):
            series_f(1.0)
        with pytest.raises(ValueError):
            series_f(-0.1)

    def test_route_agreement(self):
        q = 0.7
        pi = pi_triple(q, 120)
        pp = projector_pprime(pi)
        F, G, _, _ = aux_for(pp.op, pi)
        assert abs(series_f(q * q).value + chern0(pp.op, F, G)) <= 1e-6


class TestResidueCocycle:
    def test_phi0_equals_chern0(self):
        for q in (0.5, 0.9):
            for triple in (mu_triple(q, 120), pi_triple(q, 120)):
                for text in ("a", "b", "ab", "a*b", "b^2"):
                    T = triple.represent(parse_expr(text))
                    c = chern0(T, triple.F, triple.gamma, tol=1e-7)
                    p = phi0(T, triple.gamma, tol=1e-7)
                    assert abs(c - p) <= 1e-8

    def test_phi0_projector_classes(self):
        mu = mu_triple(0.5, 100)
        pp = projector_pprime(mu)
        _, G, _, _ = aux_for(pp.op, mu)
        assert phi0(pp.op, G) == pytest.approx(-1.0, abs=1e-9)
        assert phi0(fundamental_projector(mu).op, mu.gamma) == pytest.approx(1.0, abs=1e-12)

    def test_phi0_vanishes_without_odd_part(self):
        pi = pi_triple(0.5, 60)
        assert phi0(pi.represent(parse_expr("a*a")), pi.gamma) == pytest.approx(0.0, abs=1e-12)

    def test_phi0_withholds_on_bad_decay(self):
        mu = mu_triple(0.5, 60)
        bad = BlockOp.diag([BandedOp.identity(mu.basis),
                            BandedOp.zero(mu.basis)])  # graded sums ~ constant
        with pytest.raises(DecayCheckError):
            phi0(bad, mu.gamma)

    def test_phi2_examples(self):
        q = 0.5
        pi = pi_triple(q, 80)
        for texts in (("a", "a", "a"), ("b", "a", "a*")):
            ops = [pi.represent(parse_expr(t)) for t in texts]
            val, est = phi2(*ops, pi.D, pi.gamma, pi)
            assert abs(val) <= 1e-8
            assert est.stable

    def test_phi2_not_applicable_in_disk_pair(self):
        mu = mu_triple(0.5, 40)
        coc = CocyclePair(mu)
        a = mu.represent(NCPoly.gen("a"))
        with pytest.raises(ValueError):
            coc.eval_phi2(a, a, a)

    def test_pairing_matches_integers(self):
        for q in (0.5, 0.9):
            mu = mu_triple(q, 120)
            pi = pi_triple(q, 120)
            assert pairing(CocyclePair(mu), projector_pprime(mu)) == pytest.approx(-1, abs=1e-6)
            assert pairing(CocyclePair(pi), projector_pprime(pi)) == pytest.approx(-1, abs=1e-6)
            assert pairing(CocyclePair(mu), fundamental_projector(mu)) == pytest.approx(1, abs=1e-9)
            assert pairing(CocyclePair(mu), block_identity(mu)) == pytest.approx(0, abs=1e-12)

    def test_pairing_agrees_with_fredholm(self):
        q = 0.3
        mu = mu_triple(q, 100)
        pp = projector_pprime(mu)
        F, G, _, _ = aux_for(pp.op, mu)
        res = fredholm_index(pp.op, F, G)
        assert abs(pairing(CocyclePair(mu), pp) - res.index) <= 1e-6
