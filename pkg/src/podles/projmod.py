"""Projective module over the range projector p, and its unitary match
with the disk-pair representation.

The module C(S^2_q)p has minimal linear basis |n>_0 = a^{n-1} p and
|n>_1 = a^{n-1} b p (n >= 1) with actions

    a |n>_s  = |n+1>_s,
    a*|n>_s  = (1 - q^{4(n-1)}) |n-1>_s,
    b |n>_0  = q^{2(n-1)} |n>_1,      b |n>_1 = q^{2(n+1)} |n>_0.

Demanding that a and a* be mutual adjoints fixes the squared norms
c_n = <n|n> up to the two seeds:  c_{n+1} = (1 - q^{4n}) c_n, c_1 = c_0.
Demanding b = b* fixes the seed ratio c_0^1 / c_0^0 = q^4; the common
scale stays free (it is absorbed by the orthonormalization, which is the
"independence of normalization" statement).  In the orthonormal +- basis
the three actions become exactly the disk-pair representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reps import build_disk_rep


@dataclass(frozen=True)
class ModuleNorms:
    """Squared norms of the raw basis vectors: c0[n-1] = <n|n>_0 etc."""

    c0: np.ndarray
    c1: np.ndarray
    seed0: float
    seed1: float

    def check_recursion(self, q: float) -> float:
        """Max violation of c_{n+1} = (1 - q^{4n}) c_n and of c_1 = c_0."""
        worst = 0.0
        for c, seed in ((self.c0, self.seed0), (self.c1, self.seed1)):
            n = np.arange(1, len(c))
            worst = max(worst, float(np.abs(c[1:] - (1 - q ** (4 * n)) * c[:-1]).max()))
            worst = max(worst, abs(float(c[0]) - seed))
        return worst


@dataclass(frozen=True)
class ProjectiveModule:
    """Raw-basis matrices of a, a*, b with the weighted inner product."""

    q: float
    n_max: int
    norms: ModuleNorms
    a: np.ndarray      # (2N x 2N), raw basis ordered |1>_0..|N>_0, |1>_1..|N>_1
    astar: np.ndarray
    b: np.ndarray

    def weights(self) -> np.ndarray:
        return np.concatenate([self.norms.c0, self.norms.c1])

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.sum(u * v * self.weights()))

    def pm_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of the orthonormal +- vectors in the raw basis."""
        N = self.n_max
        plus = np.zeros((2 * N, N))
        minus = np.zeros((2 * N, N))
        for n in range(N):
            u0 = 1.0 / np.sqrt(2 * self.norms.c0[n])
            u1 = 1.0 / np.sqrt(2 * self.norms.c1[n])
            plus[n, n] = u0
            plus[N + n, n] = u1
            minus[n, n] = u0
            minus[N + n, n] = -u1
        return plus, minus

    def pm_matrix(self, op: np.ndarray, side: str) -> np.ndarray:
        """Matrix of op in the orthonormal |n>_+ or |n>_- basis."""
        plus, minus = self.pm_basis()
        basis = plus if side == "+" else minus
        w = self.weights()
        return basis.T @ (op @ basis * w[:, None])

    def gram(self) -> np.ndarray:
        """Gram matrix of the 2N orthonormal candidate vectors (+ then -)."""
        plus, minus = self.pm_basis()
        allv = np.hstack([plus, minus])
        w = self.weights()
        return allv.T @ (allv * w[:, None])


def build_module(q: float, n_max: int, seed0: float = 1.0, seed1: float | None = None) -> ProjectiveModule:
    """Assemble the module at truncation n_max.

    seed0 / seed1 are c_0^0 and c_0^1; seed1 defaults to q^4 * seed0, the
    only ratio compatible with b = b*.  A different ratio is rejected.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0,1), got {q}")
    if seed1 is None:
        seed1 = q**4 * seed0
    if seed0 <= 0 or seed1 <= 0:
        raise ValueError("norm seeds must be positive")
    if abs(seed1 / seed0 - q**4) > 1e-12 * q**4:
        raise ValueError(
            "b = b* forces c_0^1/c_0^0 = q^4; only the common scale is free"
        )
    N = n_max
    c = np.empty(N)
    c[0] = 1.0                       # c_1 = c_0 (empty product)
    for n in range(1, N):
        c[n] = (1 - q ** (4 * n)) * c[n - 1]
    c0 = seed0 * c
    c1 = seed1 * c

    a = np.zeros((2 * N, 2 * N))
    astar = np.zeros((2 * N, 2 * N))
    b = np.zeros((2 * N, 2 * N))
    for s in (0, 1):
        off = s * N
        for n in range(1, N + 1):
            if n + 1 <= N:
                a[off + n, off + n - 1] = 1.0
            if n - 1 >= 1:
                astar[off + n - 2, off + n - 1] = 1.0 - q ** (4 * (n - 1))
    for n in range(1, N + 1):
        b[N + n - 1, n - 1] = q ** (2 * (n - 1))   # b|n>_0 = q^{2(n-1)} |n>_1
        b[n - 1, N + n - 1] = q ** (2 * (n + 1))   # b|n>_1 = q^{2(n+1)} |n>_0
    return ProjectiveModule(q, N, ModuleNorms(c0, c1, seed0, seed1), a, astar, b)


@dataclass
class EquivalenceReport:
    ok: bool
    max_deviation: float
    worst_entry: tuple[str, str, int, int]
    gram_deviation: float
    hermiticity_deviation: float
    recursion_deviation: float


def verify_equivalence(module: ProjectiveModule, tol: float = 1e-12) -> EquivalenceReport:
    """Entrywise match of the orthonormalized module actions with the
    disk-pair representation, plus orthogonality and adjointness checks.

    The last basis vector feels the truncation (a|N> is cut), so the
    comparison stops one column short of the edge.
    """
    q = module.q
    N = module.n_max
    V = N - 1  # edge column excluded
    worst = 0.0
    worst_loc = ("", "", -1, -1)
    for side, sign in (("+", +1), ("-", -1)):
        rep = build_disk_rep(sign, q, N)
        expected = {
            "a": rep["a"].dense(),
            "a*": rep["a*"].dense(),
            "b": rep["b"].dense(),
        }
        got = {
            "a": module.pm_matrix(module.a, side),
            "a*": module.pm_matrix(module.astar, side),
            "b": module.pm_matrix(module.b, side),
        }
        for name in ("a", "a*", "b"):
            diff = np.abs(got[name][:V, :V] - expected[name][:V, :V])
            i, j = np.unravel_index(np.argmax(diff), diff.shape)
            if diff[i, j] > worst:
                worst = float(diff[i, j])
                worst_loc = (side, name, int(i) + 1, int(j) + 1)

    gram_dev = float(np.abs(module.gram() - np.eye(2 * N)).max())

    # <m|a|n> = <n|a*|m> in the weighted inner product
    w = module.weights()
    herm = np.abs(module.a * w[:, None] - (module.astar * w[:, None]).T).max()

    rec = module.norms.check_recursion(q)
    return EquivalenceReport(
        ok=bool(worst <= tol and gram_dev <= 1e-12),
        max_deviation=worst,
        worst_entry=worst_loc,
        gram_deviation=gram_dev,
        hermiticity_deviation=float(herm),
        recursion_deviation=rec,
    )
