"""Projectors, Fredholm-module pairings, and the residue cocycle.

Routes to the same integers, kept deliberately independent:

  * chern0: graded trace (1/2) Tr(gamma F [F, x]) with a geometric tail
    bound on the level sums;
  * fredholm_index: kernel counting of the compressed sign operator via
    singular values, with mandatory spectral-gap reporting;
  * series_f: the closed-form integer series attached to the Bott-type
    projector, summed under an explicit tail bound;
  * phi0 / phi2: the residue ((b,B)-cocycle) route; phi0 evaluates the
    zeta function at 0 after verifying rapid decay, phi2 is a residue fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import BandedOp, BlockOp
from .qalgebra import NCMat2, pprime
from .reps import GeneratorMap, represent
from .smooth import GeometricFit, geometric_fit
from .spectral import ResidueEstimate, Triple, ZetaSeries, residues


class TraceUnstableError(RuntimeError):
    """Level sums failed the geometric tail bound at this truncation."""


class DecayCheckError(RuntimeError):
    """The twisted diagonal is not rapid decay; value withheld."""


# ---------------------------------------------------------------------------
# projectors
# ---------------------------------------------------------------------------

@dataclass
class ProjectorOp:
    """A (possibly amplified) numeric projector with verification residuals."""

    op: BlockOp
    source: str
    idem_residual: float
    adj_residual: float

    def verify(self, tol: float = 1e-10) -> bool:
        return self.idem_residual <= tol and self.adj_residual <= tol


def _projector_wrap(op: BlockOp, source: str) -> ProjectorOp:
    idem = ((op @ op) - op).max_abs_on_window()
    adj = (op.adjoint() - op).max_abs_on_window()
    return ProjectorOp(op, source, idem, adj)


def projector_p(R: GeneratorMap) -> ProjectorOp:
    """p = 1 - a (a*a)^{-1} a* in a representation with diagonal b.

    Uses a*a = 1 - b^2 (diagonal, invertible since |b| < 1); in the disk
    representations the result is the rank-one |1><1|.
    """
    if R.q is None or not 0.0 < R.q < 1.0:
        raise ValueError("projector_p needs a deformation parameter in (0,1)")
    b = R["b"]
    if not b.bands <= {0}:
        raise ValueError("projector_p requires a representation with diagonal b")
    diag = 1.0 - np.asarray(b.mat.diagonal()) ** 2
    if np.any(diag <= 0.0):
        raise ValueError("a*a = 1 - b^2 is not invertible at this truncation")
    dinv = BandedOp.from_diag(R.basis, 1.0 / diag)
    p = BandedOp.identity(R.basis) - R["a"] @ dinv @ R["a*"]
    return _projector_wrap(BlockOp.single(p), "p = 1 - a(a*a)^-1 a*")


def fundamental_projector(triple: Triple) -> ProjectorOp:
    """|1><1| on the first block, 0 on the second: the K-theory generator."""
    if triple.nblocks != 2:
        raise ValueError("the fundamental projector lives in a two-block triple")
    e11 = BandedOp.from_coo(triple.basis, [0], [0], [1.0], bands={0})
    return _projector_wrap(BlockOp([[e11, None], [None, BandedOp.zero(triple.basis)]]),
                           "|1><1| (+) 0")


def amplify_element(P: NCMat2, triple: Triple) -> BlockOp:
    """Represent a 2x2 algebra matrix on C^2 (x) H, flattened to blocks.

    Block layout: index = 2*i + chi for matrix row i and chirality chi.
    """
    nb = triple.nblocks
    n = 2 * nb
    blocks: list[list[BandedOp | None]] = [[None] * n for _ in range(n)]
    for i in range(2):
        for j in range(2):
            x = P.e[i][j]
            if x.is_zero():
                continue
            for chi in range(nb):
                blocks[nb * i + chi][nb * j + chi] = represent(x, triple.reps[chi])
    return BlockOp(blocks)


def amplify_aux(S: BlockOp, factor: int = 2) -> BlockOp:
    """id_{C^factor} (x) S, matching the amplified element layout."""
    nb = S.n
    n = factor * nb
    blocks: list[list[BandedOp | None]] = [[None] * n for _ in range(n)]
    for i in range(factor):
        for bi in range(nb):
            for bj in range(nb):
                blocks[nb * i + bi][nb * i + bj] = S.blocks[bi][bj]
    return BlockOp(blocks)


def projector_pprime(triple: Triple) -> ProjectorOp:
    """Numeric amplified Bott-type projector for a two-block triple."""
    return _projector_wrap(
        amplify_element(pprime(), triple), "p' = (1/2)[[1+b, a*], [a, 1-q^-2 b]]"
    )


def aux_for(P: BlockOp, triple: Triple) -> tuple[BlockOp, BlockOp, BlockOp, BlockOp]:
    """(F, gamma, D, absD) amplified to match the block count of P."""
    if triple.F is None or triple.gamma is None:
        raise ValueError(f"{triple.name} is ungraded")
    if P.n == triple.nblocks:
        return triple.F, triple.gamma, triple.D, triple.absD
    if P.n % triple.nblocks:
        raise ValueError("operator block count incompatible with the triple")
    k = P.n // triple.nblocks
    return (
        amplify_aux(triple.F, k),
        amplify_aux(triple.gamma, k),
        amplify_aux(triple.D, k),
        amplify_aux(triple.absD, k),
    )


def block_identity(triple: Triple, nblocks: int | None = None) -> BlockOp:
    n = nblocks if nblocks is not None else triple.nblocks
    return BlockOp.diag([BandedOp.identity(triple.basis)] * n)


# ---------------------------------------------------------------------------
# stabilized graded traces
# ---------------------------------------------------------------------------

@dataclass
class StabilizedSum:
    value: float
    tail_bound: float
    rate: float
    n_terms: int


def _stabilized_sum(vals: np.ndarray, tol: float) -> StabilizedSum:
    """Sum a level sequence, bounding the dropped tail by a geometric fit."""
    total = float(vals.sum())
    fit = geometric_fit(vals, tail_frac=0.3)
    last = float(np.abs(vals[-max(1, vals.size // 20):]).max()) if vals.size else 0.0
    if last == 0.0:
        return StabilizedSum(total, 0.0, 0.0, vals.size)
    if not fit.is_rapid_decay or fit.rate >= 1.0:
        raise TraceUnstableError(
            f"level sums not summable at this truncation (fit rate {fit.rate:.4f})"
        )
    tail = last * fit.rate / max(1.0 - fit.rate, 1e-12)
    if tail > tol:
        raise TraceUnstableError(
            f"geometric tail bound {tail:.3e} exceeds tolerance {tol:.1e}; "
            "increase the truncation"
        )
    return StabilizedSum(total, tail, fit.rate, vals.size)


def graded_trace(T: BlockOp, gamma: BlockOp, tol: float = 1e-8) -> StabilizedSum:
    """Trace(gamma T) over the valid window with a geometric tail bound."""
    lam, s, valid = (gamma @ T).level_diag_sums()
    return _stabilized_sum(s[valid], tol)


def chern0(x_op: BlockOp, F: BlockOp, gamma: BlockOp, tol: float = 1e-8) -> float:
    """Degree-zero Chern character:  (1/2) Trace(gamma F [F, x])."""
    comm = F.commutator(x_op)
    return 0.5 * graded_trace(F @ comm, gamma, tol).value


def traceclass_proxy(x_op: BlockOp, F: BlockOp) -> tuple[np.ndarray, GeometricFit]:
    """Per-level entrywise-l1 sums of [F, x] and their geometric envelope.

    The commutator is off-diagonal in chirality, so its matrix diagonal
    vanishes identically; the entry sums are the meaningful trace-norm
    proxy for the banded block.
    """
    comm = F.commutator(x_op)
    sums = comm.level_entry_abs_sums()
    v = comm.valid
    fit = geometric_fit(sums[:v], tail_frac=0.4)
    return sums[:v], fit


# ---------------------------------------------------------------------------
# residue cocycle
# ---------------------------------------------------------------------------

def phi0(x_op: BlockOp, gamma: BlockOp, tol: float = 1e-8) -> float:
    """phi_0(x) = Res_{s=0} s^-1 Trace(gamma x |D|^{-2s}) = psi(0).

    Evaluating at s=0 is justified only when psi is entire, i.e. when the
    graded level sums are rapid decay; that is verified first and a
    failure withholds the value.
    """
    lam, s, valid = (gamma @ x_op).level_diag_sums()
    vals = s[valid]
    fit = geometric_fit(vals, tail_frac=0.4)
    last = float(np.abs(vals[-max(1, vals.size // 10):]).max())
    if last > tol and not fit.is_rapid_decay:
        raise DecayCheckError(
            f"graded diagonal is not rapid decay (rate {fit.rate:.4f}); value withheld"
        )
    return float(vals.sum())


def phi2(a0: BlockOp, a1: BlockOp, a2: BlockOp, D: BlockOp, gamma: BlockOp,
         triple: Triple) -> tuple[float, ResidueEstimate]:
    """phi_2(a0,a1,a2) = Res_{s=0} Trace(gamma a0 [D,a1] [D,a2] |D|^{-2(s+1)}).

    With level sums x_lam ~ alpha*lam + beta + (decay), the trace equals
    alpha*zeta(2s+1) + beta*zeta(2s+2) + entire, whose only pole at s=0
    comes from zeta(2s+1) ~ 1/(2s): the residue is alpha/2.
    """
    T = gamma @ (a0 @ D.commutator(a1) @ D.commutator(a2))
    lam, s, valid = T.level_diag_sums()
    est = residues(ZetaSeries(lam, s, valid))
    return 0.5 * est.alpha, est


@dataclass
class CocyclePair:
    """The even residue cocycle of a two-block triple: components (phi0, phi2).

    The disk-pair triple has dimension spectrum {1} and a single component
    phi0; the spinor triple carries both, with phi2 identically zero.
    """

    triple: Triple
    tol: float = 1e-8

    @property
    def has_phi2(self) -> bool:
        return self.triple.name == "D-spin"

    def eval_phi0(self, P: BlockOp) -> float:
        _, gamma, _, _ = aux_for(P, self.triple)
        return phi0(P, gamma, self.tol)

    def eval_phi2(self, A0: BlockOp, A1: BlockOp, A2: BlockOp) -> float:
        if not self.has_phi2:
            raise ValueError(f"{self.triple.name}: cocycle has the single component phi0")
        F, gamma, D, _ = aux_for(A0, self.triple)
        val, _ = phi2(A0, A1, A2, D, gamma, self.triple)
        return val


def pairing(cocycle: CocyclePair, P: BlockOp | ProjectorOp) -> float:
    """<(phi0, phi2), [P]> = phi0(P) - 2 phi2(P - 1/2, P, P).

    The degree-2 coefficient (-1)^1 (2!/1!) = -2 comes from the even
    pairing formula; for the disk-pair triple only phi0 contributes.
    """
    P = P.op if isinstance(P, ProjectorOp) else P
    total = cocycle.eval_phi0(P)
    if cocycle.has_phi2:
        half = block_identity(cocycle.triple, P.n).scale(0.5)
        total += -2.0 * cocycle.eval_phi2(P - half, P, P)
    return total


# ---------------------------------------------------------------------------
# Fredholm index by kernel counting
# ---------------------------------------------------------------------------

@dataclass
class IndexResult:
    index: int | None
    conclusive: bool
    n_plus: int
    n_minus: int
    rank: int
    sv_min_kept: float
    sv_max_dropped: float
    gap_ratio: float
    mid_excluded: tuple[int, int]
    note: str = ""


def _gamma_block_signs(gamma: BlockOp) -> list[int]:
    signs = []
    for i in range(gamma.n):
        b = gamma.blocks[i][i]
        if b is None or not b.mat.nnz:
            raise ValueError("grading has an empty diagonal block")
        signs.append(1 if b.mat.diagonal()[0] > 0 else -1)
    return signs


def fredholm_index(P: BlockOp | ProjectorOp, F: BlockOp, gamma: BlockOp,
                   sv_tol: float = 1e-8, gap_min: float = 10.0,
                   proj_tol: float = 1e-2) -> IndexResult:
    """Index of F_P = P_- F P_+ between the compressed subspaces.

    Ranges of the truncated projectors are determined by strict eigenvalue
    classification (>= 1 - proj_tol); eigenvalues in between must be
    localized at the truncation edge (the cut always produces one ~1/2
    eigenvalue per block) and are excluded from both sides.  Kernel
    dimensions come from singular values below sv_tol; the result is
    inconclusive unless the retained/dropped gap ratio reaches gap_min.
    """
    P = P.op if isinstance(P, ProjectorOp) else P
    signs = _gamma_block_signs(gamma)
    if len(signs) != P.n:
        raise ValueError("grading block count does not match the projector")
    plus = [i for i, s in enumerate(signs) if s > 0]
    minus = [i for i, s in enumerate(signs) if s < 0]
    for i in plus:
        for j in minus:
            for (bi, bj) in ((i, j), (j, i)):
                blk = P.blocks[bi][bj]
                if blk is not None and not blk.is_zero(tol=1e-12):
                    raise ValueError("projector is not diagonal with respect to the grading")

    v = P.valid
    mask = P.basis.grades <= v
    if not mask.any():
        raise ValueError("projector window is empty")
    nstates = int(mask.sum())
    edge_levels = max(2, max(b.radius for row in P.blocks for b in row if b is not None) + 1)
    edge_mask_1 = P.basis.grades[mask] > (v - edge_levels)

    def assemble(block_ids):
        m = np.zeros((len(block_ids) * nstates, len(block_ids) * nstates))
        for a, bi in enumerate(block_ids):
            for b, bj in enumerate(block_ids):
                blk = P.blocks[bi][bj]
                if blk is not None:
                    m[a * nstates:(a + 1) * nstates, b * nstates:(b + 1) * nstates] = (
                        blk.mat[np.ix_(mask, mask)].toarray()
                    )
        return m

    def classify(m, nb):
        w, vecs = np.linalg.eigh(m)
        rng = w >= 1.0 - proj_tol
        mid = ~(rng | (w <= proj_tol))
        edge_w = np.tile(edge_mask_1, nb)
        for idx in np.nonzero(mid)[0]:
            if float(np.sum(vecs[:, idx][edge_w] ** 2)) < 0.5:
                return None, int(mid.sum())
        return vecs[:, rng], int(mid.sum())

    Qp, mid_p = classify(assemble(plus), len(plus))
    Qm, mid_m = classify(assemble(minus), len(minus))
    if Qp is None or Qm is None:
        return IndexResult(None, False, -1, -1, -1, 0.0, 0.0, 0.0,
                           (mid_p, mid_m),
                           "non-edge mid-spectrum eigenvector: projector corrupted")

    # F restricted from the + chirality part to the - part
    Fsub = np.zeros((len(minus) * nstates, len(plus) * nstates))
    for a, bi in enumerate(minus):
        for b, bj in enumerate(plus):
            blk = F.blocks[bi][bj]
            if blk is not None:
                Fsub[a * nstates:(a + 1) * nstates, b * nstates:(b + 1) * nstates] = (
                    blk.mat[np.ix_(mask, mask)].toarray()
                )

    M = Qm.T @ Fsub @ Qp
    n_plus, n_minus = Qp.shape[1], Qm.shape[1]
    svals = np.linalg.svd(M, compute_uv=False) if min(M.shape) else np.zeros(0)
    kept = svals[svals > sv_tol]
    dropped = svals[svals <= sv_tol]
    rank = int(kept.size)
    sv_min_kept = float(kept.min()) if kept.size else math.inf
    sv_max_dropped = float(dropped.max()) if dropped.size else 0.0
    gap_ratio = math.inf if sv_max_dropped == 0.0 else sv_min_kept / sv_max_dropped
    idx = (n_plus - rank) - (n_minus - rank)
    if gap_ratio < gap_min:
        return IndexResult(None, False, n_plus, n_minus, rank, sv_min_kept,
                           sv_max_dropped, gap_ratio, (mid_p, mid_m),
                           f"singular-value gap ratio {gap_ratio:.2f} < {gap_min}")
    return IndexResult(idx, True, n_plus, n_minus, rank, sv_min_kept,
                       sv_max_dropped, gap_ratio, (mid_p, mid_m))


def flip_sign_perturbation(triple: Triple, k: int, factor: int = 1) -> BlockOp:
    """Finite-rank perturbation of F: sign flipped on the first k levels.

    This is the sign of the shifted Dirac operator; it differs from F by a
    finite-rank operator and must not change any computed index.
    """
    if triple.F is None:
        raise ValueError(f"{triple.name} is ungraded")
    vals = np.where(triple.basis.grades <= k, -1.0, 1.0)
    S = BandedOp.from_diag(triple.basis, vals)
    Fp = BlockOp([[None, S], [S, None]])
    return amplify_aux(Fp, factor) if factor > 1 else Fp


# ---------------------------------------------------------------------------
# the integer series
# ---------------------------------------------------------------------------

@dataclass
class SeriesFValue:
    value: float
    n_used: int
    tail_bound: float


def _series_f_term(x: float, n: int) -> float:
    num = 2 * n * (1 - x) ** 2 * (1 + x ** (2 * n)) - (1 - x * x) * (1 - x ** (2 * n))
    den = (1 - x ** (2 * n + 1)) * (1 - x ** (2 * n - 1))
    return num * x ** (n - 1) / den


def _series_f_tail(x: float, n: int) -> float:
    """sum_{k>n} (4k+2) x^{k-1}, closed form."""
    if x == 0.0:
        return 0.0
    s1 = ((n + 1) * x**n * (1 - x) + x ** (n + 1)) / (1 - x) ** 2
    return 4.0 * s1 + 2.0 * x**n / (1 - x)


def series_f(x: float, tol: float = 1e-10, n_max: int = 200000) -> SeriesFValue:
    """Sum the pairing series f(x) = sum f_n(x) under its geometric tail bound.

    Each |f_n(x)| <= (4n+2) x^{n-1}, so stopping when the closed-form tail
    drops below tol certifies the partial sum to that accuracy.  The sum
    is the integer 1 for every x in [0,1).
    """
    if not 0.0 <= x < 1.0:
        raise ValueError(f"series argument must lie in [0,1), got {x}")
    total = 0.0
    for n in range(1, n_max + 1):
        total += _series_f_term(x, n)
        tail = _series_f_tail(x, n)
        if tail < tol:
            return SeriesFValue(total, n, tail)
    raise RuntimeError(f"series did not reach tail bound {tol} within {n_max} terms")


def series_f_terms(x: float, n_terms: int) -> list[float]:
    return [_series_f_term(x, n) for n in range(1, n_terms + 1)]


# ---------------------------------------------------------------------------
# p' diagnostics
# ---------------------------------------------------------------------------

def pprime_eigenbasis(q: float, n_max: int, sign: int) -> dict:
    """Orthonormal vectors diagonalizing the one-sided amplified p'.

    Keys ("0", n) / ("1", n) give the kernel / range families, ("z", 0)
    the extra vector killed by the + side and fixed by the - side.
    Vectors are stacked as (first C^2 component, second) over the disk
    basis of size n_max.
    """
    r = 1 if sign > 0 else -1
    vecs = {}
    for n in range(1, n_max):
        e_n = np.zeros(n_max)
        e_n[n - 1] = 1.0
        e_n1 = np.zeros(n_max)
        e_n1[n] = 1.0
        c0 = math.sqrt((1 - r * q ** (2 * n)) / 2)
        c1 = math.sqrt((1 + r * q ** (2 * n)) / 2)
        vecs[("0", n)] = np.concatenate([c0 * e_n, -c1 * e_n1])
        vecs[("1", n)] = np.concatenate([c1 * e_n, c0 * e_n1])
    first = np.zeros(n_max)
    first[0] = 1.0
    vecs[("z", 0)] = np.concatenate([np.zeros(n_max), first])
    return vecs


def bott_proximity(q: float = 0.999, zs=(0.3, 1.0, 2.5)) -> float:
    """Deviation of the scalar shadow of p' from the Bott projector.

    Documentation-level diagnostic: at the classical end a -> 2z/(1+|z|^2),
    1-b -> 2/(1+|z|^2) in the stereographic coordinate, and p' becomes the
    Bott projector.  q=1 is outside the numeric domain so this is sampled
    at q close to 1 and compared entrywise.
    """
    worst = 0.0
    for z in zs:
        bval = (z * z - 1) / (z * z + 1)
        aval = 2 * z / (1 + z * z)
        mat = np.array(
            [
                [0.5 * (1 + bval), 0.5 * aval],
                [0.5 * aval, 0.5 * (1 - bval / q**2)],
            ]
        )
        bott = np.array([[z * z, z], [z, 1.0]]) / (1 + z * z)
        worst = max(worst, float(np.abs(mat - bott).max()))
    return worst
