import math
import random

import numpy as np
import pytest

from podles.expr import parse_expr
from podles.operators import BandedOp, WindowEmptyError
from podles.qalgebra import NCPoly, normal_form
from podles.reps import build_fock0, shift_component
from podles.spectral import (
    ZetaSeries,
    absd_spinor_triple,
    build_U,
    build_V,
    commutators,
    delta_powers_bounded,
    get_triple,
    holomorphy_check,
    ideal_Qq_bound,
    mu_triple,
    n_disk_triple,
    pi_triple,
    residues,
    trace_with_power,
    zeta_series,
)


class TestCommutators:
    def test_number_operator_and_shift(self):
        nd = n_disk_triple(30)
        w = nd.represent(parse_expr("w", "disk0"))
        dT, deltaT = commutators(w, nd)
        assert (dT - w).max_abs_on_window() == 0.0
        assert (deltaT - w).max_abs_on_window() == 0.0

    def test_delta_of_b_vanishes_in_disk_pair(self):
        mu = mu_triple(0.5, 40)
        _, deltaT = commutators(mu.represent(NCPoly.gen("b")), mu)
        assert deltaT.max_abs_on_window() == 0.0

    def test_delta_eigenvectors_a_plus_minus(self):
        pi = pi_triple(0.5, 20)
        from podles.reps import build_rho

        rp = build_rho(+1, 0.5, 20)
        for shift, sign in ((+1, +1), (-1, -1)):
            part = shift_component(rp["a"], shift)
            from podles.operators import BlockOp

            T = BlockOp.diag([part, part])
            _, deltaT = commutators(T, pi)
            resid = (deltaT - T.scale(float(sign))).max_abs_on_window()
            assert resid <= 1e-12


class TestZetaSeries:
    def test_unit_disk(self):
        nd = n_disk_triple(50)
        s = zeta_series(nd.represent(parse_expr("1", "disk0")), nd)
        assert np.all(s.a == 1.0)

    def test_unit_spinor_multiplicities(self):
        sp = absd_spinor_triple(20)
        s = zeta_series(sp.represent(parse_expr("1", "disk0")), sp)
        # eigenspace of l+1/2 = k has dimension 2l+1 = 2k
        assert list(s.a[:4]) == [2.0, 4.0, 6.0, 8.0]

    def test_rank_one_frame_element(self):
        nd = n_disk_triple(40)
        T = nd.represent(parse_expr("w(1-ww*)w*", "disk0"))
        s = zeta_series(T, nd)
        assert s.a[1] == 1.0
        assert np.abs(np.delete(s.a, 1)).max() == 0.0

    def test_linearity_exact(self):
        mu = mu_triple(0.5, 60)
        t1 = zeta_series(mu.represent(parse_expr("aa*")), mu)
        t2 = zeta_series(mu.represent(parse_expr("b^2")), mu)
        both = zeta_series(mu.represent(parse_expr("aa* + b^2")), mu)
        assert np.abs((t1 + t2).a - both.a).max() == 0.0

    def test_partial_sum_consistency(self):
        mu = mu_triple(0.5, 60)
        T = mu.represent(parse_expr("aa*"))
        s = zeta_series(T, mu)
        for spow in (4.0, 6.0):
            assert abs(s.partial_sum(spow) - trace_with_power(T, mu, spow)) <= 1e-12

    def test_empty_window_raises(self):
        with pytest.raises(WindowEmptyError):
            ZetaSeries(np.array([1, 2]), np.array([1.0, 1.0]), np.array([False, False]))


class TestResidues:
    def test_riemann_pole(self):
        nd = n_disk_triple(100)
        est = residues(zeta_series(nd.represent(parse_expr("1", "disk0")), nd))
        assert est.beta == pytest.approx(1.0, abs=1e-12)
        assert est.alpha == pytest.approx(0.0, abs=1e-12)
        assert est.stable

    def test_symbol_mean_disk(self):
        # f = 1 + (w + w*)/2: mean 1, so beta = 1
        nd = n_disk_triple(100)
        T = nd.represent(parse_expr("1 + 1/2 w + 1/2 w*", "disk0"))
        est = residues(zeta_series(T, nd))
        assert est.beta == pytest.approx(1.0, abs=1e-10)

    def test_spinor_doubles_mean(self):
        sp = absd_spinor_triple(60)
        T = sp.represent(parse_expr("1 + 1/2 w + 1/2 w*", "disk0"))
        est = residues(zeta_series(T, sp))
        assert est.alpha == pytest.approx(2.0, abs=1e-10)
        assert est.beta == pytest.approx(0.0, abs=1e-10)

    def test_spinor_no_s1_pole_after_symbol_projection(self):
        """With the kernel-of-symbol part removed, the q=0 spinor triple
        shows spectrum {2}: the Fourier part alone has no beta.

        (The discarded part is not innocuous there: the shift-defect
        projector has rank 2 per level, so e.g. ww* alone carries a
        genuine s=1 pole of residue -2.)
        """
        sp = absd_spinor_triple(80)
        x = parse_expr("ww* + 1/2 w + 1/2 w*", "disk0")
        raw = residues(zeta_series(sp.represent(x), sp))
        assert raw.beta == pytest.approx(-2.0, abs=1e-10)
        projected = x.boundary_part()
        est = residues(zeta_series(sp.represent(projected), sp))
        assert est.beta == pytest.approx(0.0, abs=1e-10)
        assert est.alpha == pytest.approx(2.0, abs=1e-10)  # mean of ww* is 1

    def test_min_points_guard(self):
        nd = n_disk_triple(10)
        with pytest.raises(WindowEmptyError):
            residues(zeta_series(nd.represent(parse_expr("1", "disk0")), nd))

    def test_unstable_flagged(self):
        lam = np.arange(1, 101)
        a = np.sqrt(lam.astype(float))  # zeta has a pole at s = 3/2: outside {1,2}
        est = residues(ZetaSeries(lam, a, lam > 0))
        assert not est.stable
        assert "outside {1,2}" in est.note

    def test_zeta_b2_observed_vs_candidates(self):
        """The dual-form comparison, frozen from the independent oracle.

        Per-chirality level sums of b^2 converge to the direct sum of the
        geometric display, 2q^4/(1-q^4); the full trace doubles it by
        chirality symmetry.  The stated closed form 2q^4/(1-q^2) is logged
        by the check suite but asserted against nothing here.
        """
        for q in (0.5, 0.8):
            pi = pi_triple(q, 80)
            T = pi.represent(parse_expr("b^2"))
            full = residues(zeta_series(T, pi))
            lam, a_plus, valid = T.blocks[0][0].level_diag_sums()
            plus = residues(ZetaSeries(lam, a_plus, valid))
            derived = 2 * q**4 / (1 - q**4)
            assert plus.beta == pytest.approx(derived, abs=1e-6)
            assert full.beta == pytest.approx(2 * plus.beta, abs=1e-9)
            assert full.alpha == pytest.approx(0.0, abs=1e-8)


class TestHolomorphy:
    def test_finite_rank_passes(self):
        nd = n_disk_triple(60)
        T = nd.represent(parse_expr("w(1-ww*)w*", "disk0"))  # |2><2|
        assert holomorphy_check(T, nd).ok

    def test_geometric_diagonal_passes(self):
        # q^{2N} has entire zeta by direct summation
        nd = n_disk_triple(60)
        q = 0.5
        T = BandedOp.from_diag(nd.basis, [q ** (2 * n) for n in range(1, 61)])
        assert holomorphy_check(T, nd).ok

    def test_identity_fails(self):
        nd = n_disk_triple(60)
        h = holomorphy_check(nd.represent(parse_expr("1", "disk0")), nd)
        assert not h.ok
        assert h.beta == pytest.approx(1.0, abs=1e-10)


class TestAuxiliaryIdeal:
    def test_U_bound(self):
        # the geometric remainder of the level sums is ~ q^{2l}/(1-q), so
        # q = 0.9 needs ~100 levels before the s=2 estimate drops below 1e-6
        for q, K in ((0.5, 40), (0.9, 100)):
            basis = pi_triple(q, K).basis
            r = ideal_Qq_bound(build_U(q, basis), q)
            assert r.ok_diag and r.alpha_ok
            assert r.max_ratio == pytest.approx(1.0, abs=1e-12)

    def test_V_bound(self):
        for q, K in ((0.5, 40), (0.9, 100)):
            basis = pi_triple(q, K).basis
            r = ideal_Qq_bound(build_V(q, basis), q)
            assert r.ok_diag and r.alpha_ok

    def test_b_squared_single_chirality_pole_only_at_s1(self):
        q = 0.5
        pi = pi_triple(q, 60)
        T = pi.represent(parse_expr("b^2")).blocks[0][0]
        r = ideal_Qq_bound(T, q, x_norm=2.0, y_norm=2.0)
        assert r.alpha_ok  # no s=2 pole


class TestRegularity:
    def test_delta_powers_stay_bounded(self):
        for name in ("mu", "pi"):
            triple = get_triple(name, 0.5, 40)
            for g in ("a", "b"):
                norms = delta_powers_bounded(triple.represent(NCPoly.gen(g)), triple, k_max=4)
                assert max(norms) < 10.0

    def test_dimension_spectrum_closure_sample(self):
        """Random elements of the extended algebra fit alpha*lam + beta."""
        rng = random.Random(21)
        pi = pi_triple(0.5, 100)
        mu = mu_triple(0.5, 100)
        for _ in range(6):
            w = tuple(rng.choice(["a", "a*", "b"]) for _ in range(rng.randint(1, 3)))
            x = normal_form(w, "sphere")
            if x.is_zero():
                continue
            for triple in (pi, mu):
                T = triple.represent(x)
                if rng.random() < 0.5:
                    dg = triple.D.commutator(triple.represent(NCPoly.gen("a")))
                    T = T @ dg
                est = residues(zeta_series(T, triple))
                assert est.deviation <= 1e-6
                if triple is mu:
                    assert abs(est.alpha) <= 1e-6  # spectrum {1}: no s=2 pole
