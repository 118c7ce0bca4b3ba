import numpy as np
import pytest

from podles.operators import (
    BandedOp,
    BlockOp,
    DiskBasis,
    SpinorBasis,
    WindowEmptyError,
    as_block,
    write_coo,
    write_matrix_market,
)
from podles.reps import build_disk_rep, build_spin_rep, represent
from podles.qalgebra import normal_form


def test_disk_basis():
    b = DiskBasis(5)
    assert b.size == 5
    assert list(b.grades) == [1, 2, 3, 4, 5]
    assert b.label(0) == 1


def test_spinor_basis():
    b = SpinorBasis(3)
    assert b.size == 2 + 4 + 6
    assert b.states[0] == (1, -1)
    assert b.index(3, 1) == 4
    assert (5, 5) in b and (7, 1) not in b
    # level of (twoL, m) is l + 1/2
    assert b.grades[b.index(5, -3)] == 3


def test_band_declaration_respected():
    for R in (build_disk_rep(+1, 0.5, 20), build_spin_rep(+1, 0.5, 8)):
        for g in ("a", "a*", "b"):
            assert R[g].check_bands()


def test_product_band_and_window_bookkeeping():
    R = build_disk_rep(+1, 0.5, 20)
    a, b = R["a"], R["b"]
    prod = a @ b
    assert prod.bands == {1}
    assert prod.valid == 20  # diagonal factor does not shrink the window
    sq = a @ a
    assert sq.bands == {2}
    assert sq.valid == 19
    assert (a + b).bands == {0, 1}
    assert a.adjoint().bands == {-1}
    assert a.adjoint().valid == a.valid


def test_window_soundness_against_double_truncation():
    """Entries inside the tracked window equal their untruncated values."""
    q = 0.7
    for k_factors in (2, 3, 4):
        R1 = build_spin_rep(+1, q, 12)
        R2 = build_spin_rep(+1, q, 24)
        word = ("a", "b", "a*", "a")[:k_factors]
        x = normal_form(word, "sphere")
        T1 = represent(x, R1)
        T2 = represent(x, R2)
        mask1 = T1.basis.grades <= T1.valid
        idx2 = [R2.basis.index(*s) for s, keep in zip(R1.basis.states, mask1) if keep]
        sub1 = T1.mat[np.ix_(mask1, mask1)].toarray()
        sub2 = T2.mat[np.ix_(idx2, idx2)].toarray()
        assert np.abs(sub1 - sub2).max() == 0.0


def test_window_empty_error():
    R = build_disk_rep(+1, 0.5, 4)
    x = normal_form(("a",) * 5, "sphere")
    with pytest.raises(WindowEmptyError):
        represent(x, R)


def test_level_diag_sums():
    b = SpinorBasis(4)
    op = BandedOp.from_diag(b, np.ones(b.size))
    lam, sums, valid = op.level_diag_sums()
    assert list(lam) == [1, 2, 3, 4]
    assert list(sums) == [2, 4, 6, 8]
    assert valid.all()


def test_block_algebra():
    basis = DiskBasis(10)
    ident = BandedOp.identity(basis)
    F = BlockOp([[None, ident], [ident, None]])
    gamma = BlockOp.diag([ident, ident.scale(-1)])
    anti = F @ gamma + gamma @ F
    assert anti.max_abs_on_window() == 0.0
    assert (F @ F - BlockOp.diag([ident, ident])).max_abs_on_window() == 0.0
    assert as_block(ident).n == 1
    # adjoint transposes the block structure
    up = BandedOp.from_coo(basis, [1], [0], [2.0], bands={1})
    B = BlockOp([[None, up], [None, None]])
    Bt = B.adjoint()
    assert Bt.blocks[0][1] is None
    assert Bt.blocks[1][0].entry(0, 1) == 2.0


def test_exports(tmp_path):
    R = build_disk_rep(+1, 0.5, 5)
    coo = tmp_path / "a.coo"
    mm = tmp_path / "a.mtx"
    write_coo(R["a"], coo)
    write_matrix_market(R["a"], mm)
    lines = coo.read_text().strip().splitlines()
    assert len(lines) == 4
    r, c, v = lines[0].split()
    assert (int(r), int(c)) == (1, 0)
    assert abs(float(v) - np.sqrt(1 - 0.5**4)) < 1e-15
    mm_lines = mm.read_text().strip().splitlines()
    assert mm_lines[0].startswith("%%MatrixMarket")
    assert mm_lines[1] == "5 5 4"
    assert mm_lines[2].split()[:2] == ["2", "1"]
