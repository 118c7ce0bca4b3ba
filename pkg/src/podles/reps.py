"""Truncated operator realizations of the sphere and disk representation families.

Families (selector strings):

  mu+ / mu-        disk-basis representations:
                       a|n> = sqrt(1-q^{4n}) |n+1>,   b|n> = +-q^{2n} |n>.
  pi+ / pi-        chiral spinor-basis representations, coefficients built
                   from q-numbers [x] = (q^x - q^-x)/(q - q^-1).
  rho+ / rho-      even/odd parts (pi+ +- pi-)/2 in explicit closed form;
                   rho- is l-preserving and rapid-decay, rho+ shifts l by +-1.
  lambda           boundary approximation of pi+-; differs from them by a
                   rapid-decay matrix.
  nu               a |l,m> -> |l+1,m+1>, b -> 0.
  fock0-disk       unilateral shift w|n> = |n+1> (q=0 disk algebra).
  fock0-spinor     w|l,m> = |l+1,m+1> (q=0 limit of the chiral family).

A representation is packaged as a GeneratorMap: images of the generator
letters as BandedOps, plus evaluation of whole NCPoly elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .laurent import LaurentQ
from .operators import BandedOp, Basis, DiskBasis, SpinorBasis, WindowEmptyError
from .qalgebra import Alphabet, AlphabetError, NCPoly

SELECTORS = (
    "mu+", "mu-", "pi+", "pi-", "rho+", "rho-", "lambda", "nu",
    "fock0-disk", "fock0-spinor",
)


def q_number(x: float, q: float) -> float:
    """q-analogue [x] = (q^x - q^-x)/(q - q^-1); [0] = 0, [-x] = -[x]."""
    return (q**x - q ** (-x)) / (q - 1.0 / q)


def _check_q(q: float):
    if not 0.0 < q < 1.0:
        raise ValueError(f"deformation parameter must lie in (0,1), got {q}")


@dataclass(frozen=True)
class GeneratorMap:
    """Images of the generator letters of one alphabet in a truncated basis."""

    name: str
    alphabet: Alphabet
    basis: Basis
    q: float | None
    images: dict = field(repr=False)
    homomorphic: bool = True  # rho+- are generator families, not representations

    def image(self, letter: str) -> BandedOp:
        try:
            return self.images[letter]
        except KeyError:
            raise AlphabetError(f"{self.name} has no image for generator {letter!r}")

    def __getitem__(self, letter: str) -> BandedOp:
        return self.image(letter)


def represent(x: NCPoly, R: GeneratorMap) -> BandedOp:
    """Homomorphic evaluation of a normal-formed element, window-tracked."""
    if x.alphabet != R.alphabet:
        raise AlphabetError(f"element alphabet {x.alphabet} vs representation {R.alphabet}")
    out = BandedOp.zero(R.basis)
    ident = BandedOp.identity(R.basis)
    for word, coeff in x.terms.items():
        c = coeff.evaluate(R.q) if R.q is not None else _eval_q_free(coeff)
        op = ident
        for letter in word:
            op = op @ R.image(letter)
        out = out + op.scale(c)
    if out.valid < 1:
        raise WindowEmptyError(
            f"degree {x.degree()} element exhausts the truncation of {R.name}"
        )
    return out


def _eval_q_free(c: LaurentQ) -> float:
    items = dict(c.items())
    if any(k != 0 for k in items):
        raise ValueError("q-dependent coefficient in a q-free (disk0) context")
    return float(items.get(0, 0))


# ---------------------------------------------------------------------------
# disk-basis family
# ---------------------------------------------------------------------------

def build_disk_rep(sign: int, q: float, n_max: int) -> GeneratorMap:
    """mu_+ (sign=+1) or mu_- (sign=-1) on |n>, n = 1..n_max."""
    _check_q(q)
    if n_max < 4:
        raise ValueError("need n_max >= 4")
    basis = DiskBasis(n_max)
    rows, cols, vals = [], [], []
    for n in range(1, n_max):
        rows.append(n)        # index of |n+1>
        cols.append(n - 1)
        vals.append(math.sqrt(1.0 - q ** (4 * n)))
    a = BandedOp.from_coo(basis, rows, cols, vals, bands={+1})
    b = BandedOp.from_diag(basis, [sign * q ** (2 * n) for n in range(1, n_max + 1)])
    name = "mu+" if sign > 0 else "mu-"
    return GeneratorMap(name, "sphere", basis, q, {"a": a, "a*": a.adjoint(), "b": b})


def build_fock0(n_levels: int, flavor: str = "disk") -> GeneratorMap:
    """Unilateral shift representation of the q=0 algebra (w, w*)."""
    if flavor == "disk":
        basis = DiskBasis(n_levels)
        rows = list(range(1, n_levels))
        cols = list(range(0, n_levels - 1))
        vals = [1.0] * (n_levels - 1)
        w = BandedOp.from_coo(basis, rows, cols, vals, bands={+1})
        return GeneratorMap("fock0-disk", "disk0", basis, None, {"w": w, "w*": w.adjoint()})
    if flavor == "spinor":
        basis = SpinorBasis(n_levels)
        rows, cols, vals = [], [], []
        for j, (twoL, twoM) in enumerate(basis.states):
            tgt = (twoL + 2, twoM + 2)
            if tgt in basis:
                rows.append(basis.index(*tgt))
                cols.append(j)
                vals.append(1.0)
        w = BandedOp.from_coo(basis, rows, cols, vals, bands={+1})
        return GeneratorMap("fock0-spinor", "disk0", basis, None, {"w": w, "w*": w.adjoint()})
    raise ValueError(f"unknown flavor {flavor!r}")


# ---------------------------------------------------------------------------
# spinor-basis families
# ---------------------------------------------------------------------------

def _spinor_builder(basis: SpinorBasis, coeff_fn, bands, allow_bottom_drop: bool = False) -> BandedOp:
    """Assemble an operator from coeff_fn(l, m) -> list of (dl, dm, value).

    Coefficients into states below the bottom of the basis must vanish
    (the closed forms do this on their own), except for approximants like
    lambda whose displayed coefficients are only asymptotic; those pass
    allow_bottom_drop=True.  Targets beyond the truncation edge are always
    dropped: that is the compression.
    """
    rows, cols, vals = [], [], []
    for j, (twoL, twoM) in enumerate(basis.states):
        l = twoL / 2.0
        m = twoM / 2.0
        for dl, dm, v in coeff_fn(l, m):
            if v == 0.0:
                continue
            tgt = (twoL + 2 * dl, twoM + 2 * dm)
            if tgt in basis:
                rows.append(basis.index(*tgt))
                cols.append(j)
                vals.append(v)
            elif twoL + 2 * dl < 1 and abs(v) > 1e-12 and not allow_bottom_drop:
                raise AssertionError(f"nonzero coefficient {v} to invalid state {tgt}")
    return BandedOp.from_coo(basis, rows, cols, vals, bands=bands)


def _sq(x: float) -> float:
    # coefficients like [l-m-1][l-m] vanish at the m-edges but can come out
    # as -1e-17 in floats; clamp before the square root
    return math.sqrt(max(x, 0.0))


def build_spin_rep(sign: int, q: float, n_levels: int) -> GeneratorMap:
    """Chiral spinor representation pi_+ (sign=+1) / pi_- (sign=-1)."""
    _check_q(q)
    basis = SpinorBasis(n_levels)

    def qn(x):
        return q_number(x, q)

    def coeff_a(l, m):
        return [
            (+1, +1, q ** (m - l - 0.5) * _sq(qn(l + m + 1) * qn(l + m + 2)) / qn(2 * l + 2)),
            (-1, +1, -(q ** (m + l + 0.5)) * _sq(qn(l - m - 1) * qn(l - m)) / qn(2 * l)),
            (0, +1, sign * (1 + q * q) * q ** (m - 0.5) / (qn(2 * l) * qn(2 * l + 2))
                * _sq(qn(l + m + 1) * qn(l - m))),
        ]

    def coeff_b(l, m):
        return [
            (+1, 0, -(q ** (m + 1)) * _sq(qn(l + m + 1) * qn(l - m + 1)) / qn(2 * l + 2)),
            (-1, 0, -(q ** (m + 1)) * _sq(qn(l + m) * qn(l - m)) / qn(2 * l)),
            (0, 0, sign * (qn(l - m + 1) * qn(l + m) - q * q * qn(l - m) * qn(l + m + 1))
                / (qn(2 * l) * qn(2 * l + 2))),
        ]

    a = _spinor_builder(basis, coeff_a, bands={-1, 0, +1})
    b = _spinor_builder(basis, coeff_b, bands={-1, 0, +1})
    name = "pi+" if sign > 0 else "pi-"
    return GeneratorMap(name, "sphere", basis, q, {"a": a, "a*": a.adjoint(), "b": b})


def build_rho(sign: int, q: float, n_levels: int) -> GeneratorMap:
    """Even (sign=+1) / odd (sign=-1) part of the chiral pair, closed form.

    rho+ carries the l-shifting part; rho- is l-diagonal and rapid decay.
    These are generator families, not homomorphisms: rho-(xy) obeys the
    twisted Leibniz rule rho-(xy) = pi+(x) rho-(y) + rho-(x) pi-(y).
    """
    _check_q(q)
    basis = SpinorBasis(n_levels)

    if sign > 0:
        def coeff_a(l, m):
            return [
                (+1, +1, _sq((1 - q ** (2 * (l + m + 1))) * (1 - q ** (2 * (l + m + 2))))
                    / (1 - q ** (4 * (l + 1)))),
                (-1, +1, -_sq((q ** (2 * (l + m)) - q ** (4 * l))
                              * (q ** (2 * (l + m + 1)) - q ** (4 * l))) / (1 - q ** (4 * l))),
            ]

        def coeff_b(l, m):
            return [
                (+1, 0, -_sq((1 - q ** (2 * (l + m + 1)))
                             * (q ** (2 * (l + m + 2)) - q ** (4 * l + 6))) / (1 - q ** (4 * (l + 1)))),
                (-1, 0, -_sq((1 - q ** (2 * (l + m)))
                             * (q ** (2 * (l + m + 1)) - q ** (4 * l + 2))) / (1 - q ** (4 * l))),
            ]

        a = _spinor_builder(basis, coeff_a, bands={-1, +1})
        b = _spinor_builder(basis, coeff_b, bands={-1, +1})
        name = "rho+"
    else:
        # l-diagonal closed forms; denominators are (1-q^{4l})(1-q^{4l+4})
        # (the (1-q^{2l})(1-q^{2l+2}) variant fails the (pi+ - pi-)/2
        # cross-check by O(1) and breaks the pairing series)
        def coeff_a(l, m):
            den = (1 - q ** (4 * l)) * (1 - q ** (4 * l + 4))
            return [
                (0, +1, (1 - q**4) * q ** (3 * l + m)
                    * _sq((1 - q ** (2 * (l + m + 1))) * (1 - q ** (2 * (l - m)))) / den),
            ]

        def coeff_b(l, m):
            den = (1 - q ** (4 * l)) * (1 - q ** (4 * l + 4))
            return [
                (0, 0, (1 - q * q) * q ** (2 * l + 1)
                    * (1 + q ** (4 * l + 2) - (1 + q * q) * q ** (2 * (l + m))) / den),
            ]

        a = _spinor_builder(basis, coeff_a, bands={0})
        b = _spinor_builder(basis, coeff_b, bands={0})
        name = "rho-"
    return GeneratorMap(name, "sphere", basis, q, {"a": a, "a*": a.adjoint(), "b": b},
                        homomorphic=False)


def build_lambda(q: float, n_levels: int) -> GeneratorMap:
    """Boundary approximation: pure l-shifts, equal to pi+- modulo rapid decay."""
    _check_q(q)
    basis = SpinorBasis(n_levels)

    def coeff_a(l, m):
        return [
            (+1, +1, _sq((1 - q ** (2 * (l + m + 1))) * (1 - q ** (2 * (l + m + 2))))),
            (-1, +1, -(q ** (2 * (l + m) + 1))),
        ]

    def coeff_b(l, m):
        return [
            (+1, 0, -(q ** (l + m + 2)) * _sq(1 - q ** (2 * (l + m + 1)))),
            (-1, 0, -(q ** (l + m + 1)) * _sq(1 - q ** (2 * (l + m)))),
        ]

    a = _spinor_builder(basis, coeff_a, bands={-1, +1}, allow_bottom_drop=True)
    b = _spinor_builder(basis, coeff_b, bands={-1, +1}, allow_bottom_drop=True)
    return GeneratorMap("lambda", "sphere", basis, q, {"a": a, "a*": a.adjoint(), "b": b})


def build_nu(n_levels: int, q: float | None = None) -> GeneratorMap:
    """nu(a)|l,m> = |l+1,m+1>, nu(b) = 0 (projection modulo smoothing ideals)."""
    basis = SpinorBasis(n_levels)
    shift = _spinor_builder(basis, lambda l, m: [(+1, +1, 1.0)], bands={+1})
    zero = BandedOp.zero(basis)
    return GeneratorMap("nu", "sphere", basis, None if q is None else float(q),
                        {"a": shift, "a*": shift.adjoint(), "b": zero})


def get_representation(selector: str, q: float, truncation: int) -> GeneratorMap:
    """Build a representation family by selector string."""
    if selector == "mu+":
        return build_disk_rep(+1, q, truncation)
    if selector == "mu-":
        return build_disk_rep(-1, q, truncation)
    if selector == "pi+":
        return build_spin_rep(+1, q, truncation)
    if selector == "pi-":
        return build_spin_rep(-1, q, truncation)
    if selector == "rho+":
        return build_rho(+1, q, truncation)
    if selector == "rho-":
        return build_rho(-1, q, truncation)
    if selector == "lambda":
        return build_lambda(q, truncation)
    if selector == "nu":
        return build_nu(truncation, q)
    if selector == "fock0-disk":
        return build_fock0(truncation, "disk")
    if selector == "fock0-spinor":
        return build_fock0(truncation, "spinor")
    raise ValueError(f"unknown representation selector {selector!r}; choose from {SELECTORS}")


# ---------------------------------------------------------------------------
# derived pieces
# ---------------------------------------------------------------------------

def relation_residuals(R: GeneratorMap) -> dict[str, float]:
    """Max-entry residuals of the three defining relations, operator level.

    Built from generator images by operator products (never through the
    symbolic normal form, which would cancel them identically):
        ba - q^2 ab,   a*a + b^2 - 1,   q^4 aa* + b^2 - q^4.
    For the disk0 alphabet the single relation w*w - 1 is checked.
    """
    if R.alphabet == "disk0":
        w, ws = R["w"], R["w*"]
        ident = BandedOp.identity(R.basis)
        return {"w*w-1": (ws @ w - ident).max_abs_on_window()}
    q = R.q
    a, astar, b = R["a"], R["a*"], R["b"]
    ident = BandedOp.identity(R.basis)
    r1 = b @ a - (a @ b).scale(q * q)
    r2 = astar @ a + b @ b - ident
    r3 = (a @ astar).scale(q**4) + b @ b - ident.scale(q**4)
    return {
        "ba-q2ab": r1.max_abs_on_window(),
        "a*a+b2-1": r2.max_abs_on_window(),
        "q4aa*+b2-q4": r3.max_abs_on_window(),
    }


def odd_part(x: NCPoly, rep_plus: GeneratorMap, rep_minus: GeneratorMap) -> BandedOp:
    """(rep_plus(x) - rep_minus(x)) / 2, e.g. rho-(x) or mu_0(x)/2 families."""
    return (represent(x, rep_plus) - represent(x, rep_minus)).scale(0.5)


def even_part(x: NCPoly, rep_plus: GeneratorMap, rep_minus: GeneratorMap) -> BandedOp:
    return (represent(x, rep_plus) + represent(x, rep_minus)).scale(0.5)


def shift_component(op: BandedOp, shift: int) -> BandedOp:
    """Restrict a banded operator to the entries with a fixed level shift.

    Splits e.g. rho+(a) = a_+ + a_- into the l+1 and l-1 parts.
    """
    coo = op.mat.tocoo()
    g = op.basis.grades
    keep = (g[coo.row] - g[coo.col]) == shift
    return BandedOp.from_coo(
        op.basis, coo.row[keep], coo.col[keep], coo.data[keep], bands={shift}, valid=op.valid
    )


def spinor_diagonal_block(op: BandedOp, k: int, n_states: int) -> "np.ndarray":
    """Matrix of op restricted to the l-m = k diagonal, ordered by l.

    On this subspace the q=0 shift acts as the disk unilateral shift.
    """
    import numpy as np

    basis = op.basis
    if not isinstance(basis, SpinorBasis):
        raise ValueError("diagonal blocks are defined for the spinor basis")
    idxs = []
    for i, (twoL, twoM) in enumerate(basis.states):
        if twoL - twoM == 2 * k:
            idxs.append(i)
        if len(idxs) >= n_states:
            break
    sub = op.mat[np.ix_(idxs, idxs)].toarray()
    return sub
