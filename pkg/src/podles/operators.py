"""Truncated sparse operators with band structure and a valid-window ledger.

Every Hilbert space in the project is graded by a positive integer "level":
the disk basis |n>, n = 1..N, has level n; the spinor basis |l,m>,
l in N+1/2, |m| <= l, has level l+1/2 = 1..K (2l+1 states per level).
All operators of interest shift the level by a bounded amount (the band
set), so a compression to levels <= N is exact away from the cut: an
operator carries `valid`, the largest level V such that every entry
between states of level <= V equals the untruncated value.  Products
shrink the window by min of the two band radii; sums take the min.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class WindowEmptyError(RuntimeError):
    """No uncorrupted levels remain after truncation bookkeeping."""


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------

class DiskBasis:
    """Canonical basis |n> of l2(Z+), truncated to 1 <= n <= n_levels."""

    def __init__(self, n_levels: int):
        if n_levels < 1:
            raise ValueError("need at least one level")
        self.n_levels = int(n_levels)
        self.size = self.n_levels
        self.grades = np.arange(1, self.n_levels + 1, dtype=np.int64)

    def label(self, i: int):
        return int(i) + 1

    def __eq__(self, other):
        return isinstance(other, DiskBasis) and other.n_levels == self.n_levels

    def __hash__(self):
        return hash(("disk", self.n_levels))

    def __repr__(self):
        return f"DiskBasis(N={self.n_levels})"


class SpinorBasis:
    """Spinor-harmonic basis |l,m>, l = 1/2, 3/2, ..., m = -l..l.

    Half-integers are stored doubled (twoL, twoM) to keep integer keys.
    Level k = l + 1/2 runs 1..n_levels; level k holds 2k states.
    """

    def __init__(self, n_levels: int):
        if n_levels < 1:
            raise ValueError("need at least one level")
        self.n_levels = int(n_levels)
        states = []
        for k in range(1, self.n_levels + 1):
            twoL = 2 * k - 1
            for twoM in range(-twoL, twoL + 1, 2):
                states.append((twoL, twoM))
        self.states: list[tuple[int, int]] = states
        self.size = len(states)
        self._index = {s: i for i, s in enumerate(states)}
        self.grades = np.array([(twoL + 1) // 2 for twoL, _ in states], dtype=np.int64)

    def label(self, i: int):
        return self.states[i]

    def index(self, twoL: int, twoM: int) -> int:
        return self._index[(twoL, twoM)]

    def __contains__(self, state) -> bool:
        return state in self._index

    def __eq__(self, other):
        return isinstance(other, SpinorBasis) and other.n_levels == self.n_levels

    def __hash__(self):
        return hash(("spinor", self.n_levels))

    def __repr__(self):
        return f"SpinorBasis(K={self.n_levels})"


Basis = DiskBasis | SpinorBasis


# ---------------------------------------------------------------------------
# banded operator
# ---------------------------------------------------------------------------

def _radius(bands: frozenset[int]) -> int:
    return max((abs(s) for s in bands), default=0)


@dataclass(frozen=True)
class BandedOp:
    """Compression of a level-banded operator, with exactness ledger.

    bands: declared set of level shifts (a superset of those present).
    valid: entries between states of level <= valid are exact.
    """

    basis: Basis
    mat: sp.csr_matrix
    bands: frozenset
    valid: int

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_coo(cls, basis: Basis, rows, cols, vals, bands: Iterable[int], valid: int | None = None):
        m = sp.csr_matrix(
            (np.asarray(vals, dtype=float), (rows, cols)), shape=(basis.size, basis.size)
        )
        m.eliminate_zeros()
        return cls(basis, m, frozenset(int(b) for b in bands), basis.n_levels if valid is None else valid)

    @classmethod
    def identity(cls, basis: Basis) -> "BandedOp":
        return cls(basis, sp.identity(basis.size, format="csr"), frozenset({0}), basis.n_levels)

    @classmethod
    def zero(cls, basis: Basis) -> "BandedOp":
        return cls(basis, sp.csr_matrix((basis.size, basis.size)), frozenset(), basis.n_levels)

    @classmethod
    def from_diag(cls, basis: Basis, values) -> "BandedOp":
        return cls(basis, sp.diags(np.asarray(values, dtype=float), format="csr"), frozenset({0}), basis.n_levels)

    # -- bookkeeping ------------------------------------------------------
    @property
    def radius(self) -> int:
        return _radius(self.bands)

    def _require_same_basis(self, other: "BandedOp"):
        if self.basis != other.basis:
            raise ValueError(f"basis mismatch: {self.basis} vs {other.basis}")

    def __matmul__(self, other: "BandedOp") -> "BandedOp":
        self._require_same_basis(other)
        m = (self.mat @ other.mat).tocsr()
        m.eliminate_zeros()
        bands = frozenset(s + t for s in self.bands for t in other.bands)
        valid = min(self.valid, other.valid) - min(self.radius, other.radius)
        return BandedOp(self.basis, m, bands, valid)

    def __add__(self, other: "BandedOp") -> "BandedOp":
        self._require_same_basis(other)
        return BandedOp(
            self.basis,
            (self.mat + other.mat).tocsr(),
            self.bands | other.bands,
            min(self.valid, other.valid),
        )

    def __sub__(self, other: "BandedOp") -> "BandedOp":
        return self + (-other)

    def __neg__(self) -> "BandedOp":
        return BandedOp(self.basis, -self.mat, self.bands, self.valid)

    def scale(self, c: float) -> "BandedOp":
        return BandedOp(self.basis, self.mat * float(c), self.bands, self.valid)

    def __mul__(self, c: float) -> "BandedOp":
        return self.scale(c)

    __rmul__ = __mul__

    def adjoint(self) -> "BandedOp":
        """Real entries throughout, so the adjoint is the transpose."""
        return BandedOp(
            self.basis, self.mat.T.tocsr(), frozenset(-s for s in self.bands), self.valid
        )

    def commutator(self, other: "BandedOp") -> "BandedOp":
        return self @ other - other @ self

    # -- access -----------------------------------------------------------
    def is_zero(self, tol: float = 0.0) -> bool:
        return self.mat.nnz == 0 or np.all(np.abs(self.mat.data) <= tol)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.mat @ vec

    def entry(self, i: int, j: int) -> float:
        return float(self.mat[i, j])

    def dense(self) -> np.ndarray:
        return self.mat.toarray()

    def window_mask(self, vmax: int | None = None) -> np.ndarray:
        v = self.valid if vmax is None else min(self.valid, vmax)
        if v < 1:
            raise WindowEmptyError(f"valid window empty (valid={self.valid})")
        return self.basis.grades <= v

    def window_dense(self, vmax: int | None = None) -> np.ndarray:
        mask = self.window_mask(vmax)
        return self.mat[np.ix_(mask, mask)].toarray()

    def max_abs_on_window(self, vmax: int | None = None) -> float:
        sub = self.mat[np.ix_(self.window_mask(vmax), self.window_mask(vmax))]
        return float(np.abs(sub.data).max()) if sub.nnz else 0.0

    def level_diag_sums(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(levels 1..n_levels, per-level diagonal sums, validity mask)."""
        d = self.mat.diagonal()
        sums = np.bincount(self.basis.grades, weights=d, minlength=self.basis.n_levels + 1)[1:]
        levels = np.arange(1, self.basis.n_levels + 1)
        return levels, sums, levels <= self.valid

    def offset_diagonal(self, d: int) -> np.ndarray:
        """Entries <i|T|j> with i - j = d, ordered by j (disk basis only)."""
        if not isinstance(self.basis, DiskBasis):
            raise ValueError("offset diagonals are defined for the disk basis")
        return self.mat.diagonal(-d)

    def check_bands(self) -> bool:
        """Structural assertion: every stored entry respects the band set."""
        coo = self.mat.tocoo()
        g = self.basis.grades
        shifts = g[coo.row] - g[coo.col]
        return bool(np.all(np.isin(shifts, sorted(self.bands)))) if coo.nnz else True

    # -- export -----------------------------------------------------------
    def coo_rows(self) -> list[tuple[int, int, float]]:
        coo = self.mat.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[k]), int(coo.col[k]), float(coo.data[k])) for k in order]


def write_coo(op: BandedOp, path) -> None:
    """Coordinate-list text export: one 'row col value' line per entry (0-based)."""
    with open(path, "w") as fh:
        for r, c, v in op.coo_rows():
            fh.write(f"{r} {c} {v:.17g}\n")


def write_matrix_market(op: BandedOp, path) -> None:
    """Matrix-market style export (1-based coordinate format)."""
    rows = op.coo_rows()
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"{op.basis.size} {op.basis.size} {len(rows)}\n")
        for r, c, v in rows:
            fh.write(f"{r + 1} {c + 1} {v:.17g}\n")


# ---------------------------------------------------------------------------
# block operators (chirality / matrix amplification)
# ---------------------------------------------------------------------------

class BlockOp:
    """Square block matrix of BandedOps over one basis (None = zero block)."""

    __slots__ = ("basis", "blocks", "n")

    def __init__(self, blocks: Sequence[Sequence[BandedOp | None]]):
        self.n = len(blocks)
        self.blocks = [list(row) for row in blocks]
        basis = None
        for row in self.blocks:
            if len(row) != self.n:
                raise ValueError("block matrix must be square")
            for b in row:
                if b is not None:
                    if basis is None:
                        basis = b.basis
                    elif b.basis != basis:
                        raise ValueError("blocks on mixed bases")
        if basis is None:
            raise ValueError("all-empty block matrix")
        self.basis = basis

    # -- constructors -----------------------------------------------------
    @classmethod
    def single(cls, op: BandedOp) -> "BlockOp":
        return cls([[op]])

    @classmethod
    def diag(cls, ops: Sequence[BandedOp]) -> "BlockOp":
        n = len(ops)
        return cls([[ops[i] if i == j else None for j in range(n)] for i in range(n)])

    @classmethod
    def from_scalar_matrix(cls, scalars, op: BandedOp) -> "BlockOp":
        """Kronecker product (scalar matrix) x (operator)."""
        return cls(
            [
                [op.scale(s) if s else None for s in row]
                for row in scalars
            ]
        )

    def block(self, i: int, j: int) -> BandedOp:
        b = self.blocks[i][j]
        return b if b is not None else BandedOp.zero(self.basis)

    @property
    def valid(self) -> int:
        v = self.basis.n_levels
        for row in self.blocks:
            for b in row:
                if b is not None:
                    v = min(v, b.valid)
        return v

    # -- algebra ------------------------------------------------------------
    def __matmul__(self, other: "BlockOp") -> "BlockOp":
        if self.n != other.n or self.basis != other.basis:
            raise ValueError("block shape/basis mismatch")
        out: list[list[BandedOp | None]] = [[None] * self.n for _ in range(self.n)]
        for i in range(self.n):
            for j in range(self.n):
                acc: BandedOp | None = None
                for k in range(self.n):
                    a, b = self.blocks[i][k], other.blocks[k][j]
                    if a is None or b is None:
                        continue
                    p = a @ b
                    acc = p if acc is None else acc + p
                out[i][j] = acc
        if not any(b is not None for row in out for b in row):
            out[0][0] = BandedOp.zero(self.basis)
        return BlockOp(out)

    def _zip(self, other: "BlockOp", f) -> "BlockOp":
        if self.n != other.n or self.basis != other.basis:
            raise ValueError("block shape/basis mismatch")
        out = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                a, b = self.blocks[i][j], other.blocks[i][j]
                if a is None and b is None:
                    row.append(None)
                else:
                    a = a if a is not None else BandedOp.zero(self.basis)
                    b = b if b is not None else BandedOp.zero(self.basis)
                    row.append(f(a, b))
            out.append(row)
        return BlockOp(out)

    def __add__(self, other: "BlockOp") -> "BlockOp":
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: "BlockOp") -> "BlockOp":
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> "BlockOp":
        return self.scale(-1.0)

    def scale(self, c: float) -> "BlockOp":
        return BlockOp(
            [[b.scale(c) if b is not None else None for b in row] for row in self.blocks]
        )

    def adjoint(self) -> "BlockOp":
        return BlockOp(
            [
                [self.blocks[j][i].adjoint() if self.blocks[j][i] is not None else None for j in range(self.n)]
                for i in range(self.n)
            ]
        )

    def commutator(self, other: "BlockOp") -> "BlockOp":
        return self @ other - other @ self

    # -- access ---------------------------------------------------------
    def level_diag_sums(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        levels = np.arange(1, self.basis.n_levels + 1)
        total = np.zeros(self.basis.n_levels)
        for i in range(self.n):
            b = self.blocks[i][i]
            if b is not None:
                _, s, _ = b.level_diag_sums()
                total += s
        return levels, total, levels <= self.valid

    def max_abs_on_window(self) -> float:
        v = self.valid
        out = 0.0
        for row in self.blocks:
            for b in row:
                if b is not None and b.mat.nnz:
                    out = max(out, BandedOp(b.basis, b.mat, b.bands, v).max_abs_on_window())
        return out

    def level_entry_abs_sums(self) -> np.ndarray:
        """Per-level sums of |entries|, binned by the column's level.

        An entrywise-l1 proxy for trace-norm tails of banded operators.
        """
        out = np.zeros(self.basis.n_levels)
        g = self.basis.grades
        for row in self.blocks:
            for b in row:
                if b is None or not b.mat.nnz:
                    continue
                coo = b.mat.tocoo()
                out += np.bincount(
                    g[coo.col], weights=np.abs(coo.data), minlength=self.basis.n_levels + 1
                )[1:]
        return out

    def dense(self) -> np.ndarray:
        return np.vstack(
            [np.hstack([self.block(i, j).dense() for j in range(self.n)]) for i in range(self.n)]
        )


def as_block(op: BandedOp | BlockOp) -> BlockOp:
    return op if isinstance(op, BlockOp) else BlockOp.single(op)
