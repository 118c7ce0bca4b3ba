import math
import random

import numpy as np
import pytest

from podles.expr import parse_expr
from podles.operators import BandedOp
from podles.qalgebra import NCPoly, normal_form
from podles.reps import (
    SELECTORS,
    build_disk_rep,
    build_fock0,
    build_lambda,
    build_nu,
    build_rho,
    build_spin_rep,
    even_part,
    get_representation,
    odd_part,
    q_number,
    relation_residuals,
    represent,
    shift_component,
    spinor_diagonal_block,
)

Q_GRID = (0.3, 0.5, 0.7, 0.9)


def test_q_number():
    assert q_number(2, 0.5) == pytest.approx(2.5)
    assert q_number(0, 0.3) == 0.0
    assert q_number(-3, 0.7) == pytest.approx(-q_number(3, 0.7))
    assert q_number(1, 0.42) == pytest.approx(1.0)


class TestDiskRep:
    def test_matrix_elements(self):
        R = build_disk_rep(+1, 0.5, 10)
        assert R["a"].entry(1, 0) == pytest.approx(math.sqrt(0.9375))
        Rm = build_disk_rep(-1, 0.5, 10)
        assert Rm["b"].entry(0, 0) == pytest.approx(-0.25)

    def test_a_is_pure_shift(self):
        R = build_disk_rep(+1, 0.7, 15)
        assert np.abs(R["a"].mat.diagonal()).max() == 0.0
        assert R["a"].bands == {1}

    def test_relations(self):
        for q in Q_GRID:
            for sign in (+1, -1):
                res = relation_residuals(build_disk_rep(sign, q, 60))
                assert max(res.values()) <= 1e-10


class TestSpinRep:
    def test_relations(self):
        for q in Q_GRID:
            for sign in (+1, -1):
                res = relation_residuals(build_spin_rep(sign, q, 25))
                assert max(res.values()) <= 1e-10

    def test_band_structure(self):
        R = build_spin_rep(+1, 0.5, 8)
        assert R["a"].bands == {-1, 0, 1}
        assert R["b"].bands == {-1, 0, 1}
        # m-shift of a is +1: check one entry address
        b = R.basis
        assert R["a"].mat[b.index(5, 3), b.index(3, 1)] != 0.0

    def test_represent_unit_is_identity(self):
        for sel in ("mu+", "pi-", "fock0-disk"):
            R = get_representation(sel, 0.5, 10)
            alphabet = "disk0" if sel.startswith("fock0") else "sphere"
            op = represent(NCPoly.one(alphabet), R)
            assert (op - BandedOp.identity(R.basis)).max_abs_on_window() == 0.0

    def test_represent_relations_symbolically_zero(self):
        # normal form cancels the relations exactly, so the represented
        # residual is the zero operator in every homomorphic family
        for sel in ("mu+", "mu-", "pi+", "pi-", "nu"):
            R = get_representation(sel, 0.5, 20)
            z = represent(parse_expr("a*a + b^2 - 1"), R)
            z2 = represent(parse_expr("q^4 a a* + b^2 - q^4"), R)
            assert z.max_abs_on_window() <= 1e-12
            assert z2.max_abs_on_window() <= 1e-12


class TestRho:
    def test_cross_check_even_odd_split(self):
        for q in (0.5, 0.9):
            K = 20
            pp, pm = build_spin_rep(+1, q, K), build_spin_rep(-1, q, K)
            rp, rm = build_rho(+1, q, K), build_rho(-1, q, K)
            for g in ("a", "b"):
                plus = (pp[g] + pm[g]).scale(0.5)
                minus = (pp[g] - pm[g]).scale(0.5)
                assert (rp[g] - plus).max_abs_on_window() <= 1e-12
                assert (rm[g] - minus).max_abs_on_window() <= 1e-12

    def test_rho_minus_preserves_l(self):
        rm = build_rho(-1, 0.5, 12)
        assert rm["a"].bands == {0}
        assert rm["b"].bands == {0}

    def test_rho_minus_entry_bound(self):
        for q in Q_GRID:
            rm = build_rho(-1, q, 30)
            bound = (1 - q) ** -2
            for g in ("a", "b"):
                coo = rm[g].mat.tocoo()
                states = rm.basis.states
                for c, v in zip(coo.col, coo.data):
                    twoL = states[c][0]
                    assert abs(v) <= bound * q**twoL + 1e-15

    def test_rho_plus_shift_split(self):
        rp = build_rho(+1, 0.5, 15)
        a_up = shift_component(rp["a"], +1)
        a_dn = shift_component(rp["a"], -1)
        assert (a_up + a_dn - rp["a"]).max_abs_on_window() <= 1e-15
        assert a_up.bands == {1} and a_dn.bands == {-1}

    def test_twisted_leibniz(self):
        q, K = 0.5, 25
        pp, pm = build_spin_rep(+1, q, K), build_spin_rep(-1, q, K)
        rng = random.Random(5)
        for _ in range(10):
            wx = tuple(rng.choice(["a", "a*", "b"]) for _ in range(rng.randint(1, 3)))
            wy = tuple(rng.choice(["a", "a*", "b"]) for _ in range(rng.randint(1, 3)))
            x, y = normal_form(wx, "sphere"), normal_form(wy, "sphere")
            lhs = odd_part(x * y, pp, pm)
            rhs = represent(x, pp) @ odd_part(y, pp, pm) + odd_part(x, pp, pm) @ represent(y, pm)
            assert (lhs - rhs).max_abs_on_window() <= 1e-11

    def test_even_part_of_unit(self):
        pp, pm = build_spin_rep(+1, 0.5, 10), build_spin_rep(-1, 0.5, 10)
        one = NCPoly.one()
        assert (even_part(one, pp, pm) - BandedOp.identity(pp.basis)).max_abs_on_window() == 0.0
        assert odd_part(one, pp, pm).max_abs_on_window() == 0.0


class TestLambda:
    def test_spot_entry(self):
        q, K = 0.5, 10
        lam = build_lambda(q, K)
        b = lam.basis
        # column (l,m) = (3/2, 1/2) -> row (5/2, 3/2): sqrt((1-q^{2(l+m+1)})(1-q^{2(l+m+2)}))
        got = lam["a"].mat[b.index(5, 3), b.index(3, 1)]
        expected = math.sqrt((1 - q**6) * (1 - q**8))
        assert got == pytest.approx(expected, abs=1e-15)

    def test_lambda_b_pure_shift(self):
        lam = build_lambda(0.5, 10)
        assert lam["b"].bands == {-1, 1}
        assert np.abs(lam["b"].mat.diagonal()).max() == 0.0

    def test_difference_is_rapid_decay(self):
        from podles.checks import _decay_rate_per_level

        for q in (0.5, 0.9):
            K = 40
            pi_p = build_spin_rep(+1, q, K)
            lam = build_lambda(q, K)
            for g in ("a", "b"):
                rate = _decay_rate_per_level(pi_p[g], lam[g])
                assert rate <= q * q + 1e-3


class TestNuAndFock:
    def test_nu(self):
        nu = build_nu(12, 0.5)
        assert nu["b"].max_abs_on_window() == 0.0
        ident = BandedOp.identity(nu.basis)
        assert (nu["a*"] @ nu["a"] - ident).max_abs_on_window() == 0.0

    def test_pi_minus_nu_ideal_diagnostic(self):
        from podles.checks import _entry_bound_ratio

        for q in (0.5, 0.9):
            pi_p = build_spin_rep(+1, q, 30)
            nu = build_nu(30, q)
            for g in ("a", "b"):
                ratio = _entry_bound_ratio(pi_p[g] - nu[g],
                                           lambda twoL, twoM: q ** ((twoL + twoM) / 2.0))
                assert ratio <= (1 - q) ** -2

    def test_fock0_disk(self):
        R = build_fock0(20, "disk")
        ident = BandedOp.identity(R.basis)
        assert (R["w*"] @ R["w"] - ident).max_abs_on_window() == 0.0
        defect = ident - R["w"] @ R["w*"]
        d = defect.dense()
        assert d[0, 0] == 1.0 and np.abs(d).sum() == 1.0  # 1 - ww* = |1><1|

    def test_fock0_spinor_diagonal_blocks_are_shifts(self):
        R = build_fock0(12, "spinor")
        for k in (0, 1, 3):
            blk = spinor_diagonal_block(R["w"], k, 6)
            expected = np.zeros((6, 6))
            for i in range(5):
                expected[i + 1, i] = 1.0
            assert np.abs(blk - expected).max() == 0.0


def test_selector_strings():
    for sel in SELECTORS:
        R = get_representation(sel, 0.5, 10)
        assert R.name == sel
    with pytest.raises(ValueError):
        get_representation("sigma", 0.5, 10)


def test_mu0_images_exact():
    for q in (0.3, 0.9):
        N = 30
        rp, rm = build_disk_rep(+1, q, N), build_disk_rep(-1, q, N)
        mu0_a = rp["a"] - rm["a"]
        assert mu0_a.max_abs_on_window() == 0.0
        mu0_b = rp["b"] - rm["b"]
        expected = BandedOp.from_diag(rp.basis, [2 * q ** (2 * n) for n in range(1, N + 1)])
        assert (mu0_b - expected).max_abs_on_window() == 0.0
