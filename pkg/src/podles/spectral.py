"""Dirac data, zeta-type series, and residue extraction for the four triples.

Triples:

  N-disk        disk basis, |D| = N (number operator), one block, q = 0;
  absD-spinor   spinor basis, |D||l,m> = (l+1/2)|l,m>, one block, q = 0;
  Dprime-mu     two disk blocks, D' = N (x) flip, F = 1 (x) flip,
                grading gamma = (+1, -1);
  D-spin        two spinor blocks, D = |D| (x) flip, same F and gamma.

Every |D| eigenvalue equals the integer level of the graded bases (n or
l+1/2), so eigenspace grouping is exact.  For every operator in scope the
level-grouped diagonal sums behave like  a_lam = alpha*lam + beta + r_lam
with r geometric, i.e.  zeta_T(s) = alpha*zeta(s-1) + beta*zeta(s) + entire;
the residues at s=2 and s=1 are then limits of elementary difference
sequences, which is how they are extracted here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import BandedOp, BlockOp, DiskBasis, SpinorBasis, WindowEmptyError, as_block
from .qalgebra import NCPoly
from .reps import (
    GeneratorMap,
    build_disk_rep,
    build_fock0,
    build_spin_rep,
    represent,
)
from .smooth import GeometricFit, geometric_fit


# ---------------------------------------------------------------------------
# triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Triple:
    """A truncated spectral triple: representation data plus Dirac structure."""

    name: str
    reps: tuple[GeneratorMap, ...]      # one per block
    absD: BlockOp
    D: BlockOp
    F: BlockOp | None
    gamma: BlockOp | None
    gamma_signs: tuple[int, ...]

    @property
    def basis(self):
        return self.absD.basis

    @property
    def nblocks(self) -> int:
        return self.absD.n

    @property
    def alphabet(self):
        return self.reps[0].alphabet

    @property
    def q(self):
        return self.reps[0].q

    def represent(self, x: NCPoly) -> BlockOp:
        mats = [represent(x, r) for r in self.reps]
        return BlockOp.single(mats[0]) if len(mats) == 1 else BlockOp.diag(mats)

    def odd_op(self, x: NCPoly) -> BandedOp:
        """(rep_+(x) - rep_-(x))/2: the trace-class block of [F, x]."""
        if self.nblocks != 2:
            raise ValueError(f"{self.name} has a single block")
        return (represent(x, self.reps[0]) - represent(x, self.reps[1])).scale(0.5)


def _level_diag(basis) -> BandedOp:
    return BandedOp.from_diag(basis, basis.grades.astype(float))


def n_disk_triple(n_levels: int) -> Triple:
    """(smooth disk algebra, l2(Z+), N): the q=0 disk-basis triple."""
    rep = build_fock0(n_levels, "disk")
    nop = _level_diag(rep.basis)
    blk = BlockOp.single(nop)
    return Triple("N-disk", (rep,), blk, blk, None, None, (1,))


def absd_spinor_triple(n_levels: int) -> Triple:
    """(smooth disk algebra, spinor space, |D|): the q=0 spinor-basis triple."""
    rep = build_fock0(n_levels, "spinor")
    dop = _level_diag(rep.basis)
    blk = BlockOp.single(dop)
    return Triple("absD-spinor", (rep,), blk, blk, None, None, (1,))


def _two_block_structure(basis):
    ident = BandedOp.identity(basis)
    absd_1 = _level_diag(basis)
    absD = BlockOp.diag([absd_1, absd_1])
    D = BlockOp([[None, absd_1], [absd_1, None]])
    F = BlockOp([[None, ident], [ident, None]])
    gamma = BlockOp.diag([ident, ident.scale(-1.0)])
    return absD, D, F, gamma


def mu_triple(q: float, n_levels: int) -> Triple:
    """Disk-pair triple: mu = mu_+ (+) mu_-, D' = N (x) flip."""
    rp = build_disk_rep(+1, q, n_levels)
    rm = build_disk_rep(-1, q, n_levels)
    absD, D, F, gamma = _two_block_structure(rp.basis)
    return Triple("Dprime-mu", (rp, rm), absD, D, F, gamma, (1, -1))


def pi_triple(q: float, n_levels: int) -> Triple:
    """Spinor triple: pi = pi_+ (+) pi_-, D = |D| (x) flip."""
    rp = build_spin_rep(+1, q, n_levels)
    rm = build_spin_rep(-1, q, n_levels)
    absD, D, F, gamma = _two_block_structure(rp.basis)
    return Triple("D-spin", (rp, rm), absD, D, F, gamma, (1, -1))


def get_triple(name: str, q: float, truncation: int) -> Triple:
    if name in ("N-disk", "n-disk"):
        return n_disk_triple(truncation)
    if name in ("absD-spinor", "absd-spinor"):
        return absd_spinor_triple(truncation)
    if name in ("Dprime-mu", "mu"):
        return mu_triple(q, truncation)
    if name in ("D-spin", "pi"):
        return pi_triple(q, truncation)
    raise ValueError(f"unknown triple {name!r}")


# ---------------------------------------------------------------------------
# commutators
# ---------------------------------------------------------------------------

def commutators(T: BandedOp | BlockOp, triple: Triple) -> tuple[BlockOp, BlockOp]:
    """(dT, deltaT) = ([D, T], [|D|, T]) with band bookkeeping."""
    T = as_block(T)
    return triple.D.commutator(T), triple.absD.commutator(T)


# ---------------------------------------------------------------------------
# zeta series
# ---------------------------------------------------------------------------

@dataclass
class ZetaSeries:
    """Eigenspace-grouped diagonal sums a_lam of T, lam = 1..max level."""

    lam: np.ndarray
    a: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        if not self.valid.any():
            raise WindowEmptyError("no uncorrupted eigenvalues in the series")

    @property
    def max_valid(self) -> int:
        return int(self.lam[self.valid].max())

    def partial_sum(self, s: float) -> float:
        m = self.valid
        return float(np.sum(self.a[m] * self.lam[m] ** (-float(s))))

    def __add__(self, other: "ZetaSeries") -> "ZetaSeries":
        if not np.array_equal(self.lam, other.lam):
            raise ValueError("series on different eigenvalue grids")
        return ZetaSeries(self.lam, self.a + other.a, self.valid & other.valid)

    def rows(self):
        for i in range(len(self.lam)):
            yield int(self.lam[i]), float(self.a[i]), bool(self.valid[i])


def zeta_series(T: BandedOp | BlockOp, triple: Triple, twist: bool = False) -> ZetaSeries:
    """Group the diagonal of T over |D|-eigenspaces; flag corrupted levels.

    twist=True inserts the grading, i.e. groups the diagonal of gamma T.
    """
    T = as_block(T)
    if T.basis != triple.basis:
        raise ValueError("operator basis does not match the triple")
    if twist:
        if triple.gamma is None:
            raise ValueError(f"{triple.name} is ungraded")
        T = triple.gamma @ T
    lam, a, valid = T.level_diag_sums()
    return ZetaSeries(lam, a, valid)


def trace_with_power(T: BandedOp | BlockOp, triple: Triple, s: float) -> float:
    """Direct partial sum of Trace(T |D|^-s) as an operator product.

    Consistency oracle for ZetaSeries.partial_sum at large Re(s).
    """
    T = as_block(T)
    vals = triple.basis.grades.astype(float) ** (-float(s))
    pw = BlockOp.diag([BandedOp.from_diag(triple.basis, vals)] * triple.nblocks)
    prod = T @ pw
    lam, a, valid = prod.level_diag_sums()
    return float(a[valid].sum())


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------

@dataclass
class ResidueEstimate:
    """Residues of zeta_T at s=2 (alpha) and s=1 (beta), with diagnostics.

    alpha ~ successive differences of a_lam, beta ~ a_lam - alpha*lam, both
    averaged over the top-decile window of uncorrupted eigenvalues.
    stable=False signals pole structure outside {1,2} (the remainder fails
    to die out on the window).
    """

    alpha: float
    beta: float
    window: tuple[int, int]
    alpha_spread: float
    deviation: float
    stable: bool
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "window": list(self.window),
            "alpha_spread": self.alpha_spread,
            "deviation": self.deviation,
            "stable": self.stable,
            "note": self.note,
        }


def residues(series: ZetaSeries, window_frac: float = 0.1, stab_tol: float = 1e-6,
             min_points: int = 30) -> ResidueEstimate:
    lam = series.lam[series.valid]
    a = series.a[series.valid]
    if lam.size < min_points:
        raise WindowEmptyError(f"need >= {min_points} uncorrupted eigenvalues, have {lam.size}")
    vmax = int(lam.max())
    lo = max(int(np.ceil((1 - window_frac) * vmax)), int(lam.min()) + 1)
    win = lam >= lo
    if win.sum() < 3:
        lo = int(lam[-3])
        win = lam >= lo
    lam_w, a_w = lam[win], a[win]
    d = np.diff(a_w)
    alpha = float(np.mean(d)) if d.size else 0.0
    beta = float(np.mean(a_w - alpha * lam_w))
    resid = a_w - (alpha * lam_w + beta)
    deviation = float(np.abs(resid).max())
    alpha_spread = float(d.max() - d.min()) if d.size else 0.0
    stable = deviation <= stab_tol and alpha_spread <= 2 * stab_tol
    note = "" if stable else "pole structure outside {1,2} (window not stabilized)"
    return ResidueEstimate(alpha, beta, (int(lo), vmax), alpha_spread, deviation, stable, note)


@dataclass
class HolomorphyResult:
    ok: bool
    alpha: float
    beta: float
    decay: GeometricFit


def holomorphy_check(T: BandedOp | BlockOp, triple: Triple, tol: float = 1e-8) -> HolomorphyResult:
    """Pass iff both residues vanish and a_lam decays rapidly.

    Intended for candidates in the kernel of the symbol map (N-disk triple):
    their zeta functions are entire, so the level sums are a rapid-decay
    sequence with no pole at s=1 or s=2.
    """
    series = zeta_series(T, triple)
    est = residues(series, stab_tol=tol)
    fit = geometric_fit(series.a[series.valid], tail_frac=0.5)
    small = float(np.abs(series.a[series.valid][-max(3, series.a[series.valid].size // 10):]).max())
    decays = fit.is_rapid_decay or small <= tol
    return HolomorphyResult(
        ok=bool(abs(est.alpha) <= tol and abs(est.beta) <= tol and decays),
        alpha=est.alpha,
        beta=est.beta,
        decay=fit,
    )


# ---------------------------------------------------------------------------
# the auxiliary ideal of the spinor triple
# ---------------------------------------------------------------------------

def build_U(q: float, basis: SpinorBasis) -> BandedOp:
    """U|l,m> = q^{l+m} |l,m>."""
    vals = [q ** ((twoL + twoM) / 2.0) for twoL, twoM in basis.states]
    return BandedOp.from_diag(basis, vals)


def build_V(q: float, basis: SpinorBasis) -> BandedOp:
    """V = 1 - sqrt(1 - (qU)^2), diagonal 1 - sqrt(1 - q^{2(l+m+1)})."""
    # exponent: 2*(l+m+1) = twoL + twoM + 2
    vals = [1.0 - np.sqrt(1.0 - q ** (twoL + twoM + 2.0)) for twoL, twoM in basis.states]
    return BandedOp.from_diag(basis, vals)


@dataclass
class QqBoundResult:
    ok_diag: bool
    max_ratio: float
    alpha: float
    alpha_ok: bool


def ideal_Qq_bound(T: BandedOp, q: float, x_norm: float = 1.0, y_norm: float = 1.0,
                   tol: float = 1e-6) -> QqBoundResult:
    """Check |<l,m|T|l,m>| <= |x||y| q^{l+m} and that only s=1 carries a pole.

    T is a single-chirality spinor-basis operator of the form x U y / x V y.
    """
    basis = T.basis
    if not isinstance(basis, SpinorBasis):
        raise ValueError("the auxiliary ideal lives on the spinor basis")
    diag = T.mat.diagonal()
    bound = np.array([x_norm * y_norm * q ** ((twoL + twoM) / 2.0) for twoL, twoM in basis.states])
    mask = basis.grades <= T.valid
    ratios = np.abs(diag[mask]) / np.maximum(bound[mask], 1e-300)
    max_ratio = float(ratios.max()) if ratios.size else 0.0
    triple = Triple("absD-spinor", (build_fock0(basis.n_levels, "spinor"),),
                    BlockOp.single(_level_diag(basis)), BlockOp.single(_level_diag(basis)),
                    None, None, (1,))
    est = residues(zeta_series(T, triple))
    return QqBoundResult(
        ok_diag=bool(max_ratio <= 1.0 + tol),
        max_ratio=max_ratio,
        alpha=est.alpha,
        alpha_ok=bool(abs(est.alpha) <= tol),
    )


# ---------------------------------------------------------------------------
# regularity proxy
# ---------------------------------------------------------------------------

def delta_powers_bounded(T: BandedOp | BlockOp, triple: Triple, k_max: int = 4) -> list[float]:
    """Operator-norm proxies (max row/col l1 sums on window) of delta^k(T).

    Band-limitedness is automatic from the bookkeeping; the returned norms
    must stay uniformly bounded for smooth elements.
    """
    T = as_block(T)
    out = []
    cur = T
    for _ in range(k_max + 1):
        v = cur.valid
        norm = 0.0
        for row in cur.blocks:
            for b in row:
                if b is None or not b.mat.nnz:
                    continue
                mask = b.basis.grades <= v
                sub = abs(b.mat[np.ix_(mask, mask)])
                if sub.nnz:
                    norm = max(
                        norm,
                        float(sub.sum(axis=0).max()),
                        float(sub.sum(axis=1).max()),
                    )
        out.append(norm)
        cur = triple.absD.commutator(cur)
    return out
