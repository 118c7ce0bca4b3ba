"""Exact symbolic *-algebra of the equatorial Podles sphere and the quantum disk.

Words in the generators are rewritten onto the standard linear basis:

  sphere  (generators a, a*, b):   a^n b^m  and  (a*)^n b^m,  n,m >= 0,
          using  ba -> q^2 ab,  a*a -> 1 - b^2,  aa* -> 1 - q^-4 b^2,
                 ba* -> q^-2 a*b;
  disk0   (generators w, w*):      w^n (w*)^m,  using  w*w -> 1.

Coefficients are exact Laurent polynomials in q (see laurent), so all
algebraic identities checked here are exact coefficient cancellations.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Literal, Mapping

from .laurent import LaurentQ, Scalar

Alphabet = Literal["sphere", "disk0"]
Word = tuple[str, ...]

GENERATORS: dict[Alphabet, tuple[str, ...]] = {
    "sphere": ("a", "a*", "b"),
    "disk0": ("w", "w*"),
}

# rewrite rules: adjacent pair -> list of (coefficient, replacement word)
_RULES: dict[Alphabet, dict[tuple[str, str], list[tuple[LaurentQ, Word]]]] = {
    "sphere": {
        ("b", "a"): [(LaurentQ.q_power(2), ("a", "b"))],
        ("b", "a*"): [(LaurentQ.q_power(-2), ("a*", "b"))],
        ("a*", "a"): [(LaurentQ.one(), ()), (LaurentQ.const(-1), ("b", "b"))],
        ("a", "a*"): [(LaurentQ.one(), ()), (LaurentQ.q_power(-4, -1), ("b", "b"))],
    },
    "disk0": {
        ("w*", "w"): [(LaurentQ.one(), ())],
    },
}


class AlphabetError(ValueError):
    """Unknown generator symbol, or mixed alphabets."""


def _check_word(word: Iterable[str], alphabet: Alphabet) -> Word:
    w = tuple(word)
    gens = GENERATORS[alphabet]
    for g in w:
        if g not in gens:
            raise AlphabetError(f"symbol {g!r} not in alphabet {alphabet!r}")
    return w


def is_basis_word(word: Word, alphabet: Alphabet) -> bool:
    """True iff the word lies in the declared linear basis."""
    if alphabet == "disk0":
        # w...w then w*...w*
        seen_star = False
        for g in word:
            if g == "w*":
                seen_star = True
            elif seen_star:
                return False
        return True
    # sphere: a-run xor a*-run, then b-run
    head = [g for g in word if g != "b"]
    if head and len(set(head)) > 1:
        return False
    nb = sum(1 for g in word if g == "b")
    return word == tuple(head) + ("b",) * nb


def _find_redex(word: Word, rules, strategy: str) -> int | None:
    rng = range(len(word) - 1)
    if strategy == "rightmost":
        rng = reversed(rng)
    for i in rng:
        if (word[i], word[i + 1]) in rules:
            return i
    return None


def normal_form(word: Iterable[str], alphabet: Alphabet, strategy: str = "leftmost") -> "NCPoly":
    """Rewrite a raw generator word onto the linear basis.

    strategy selects which redex is contracted first ("leftmost" or
    "rightmost"); the result must not depend on it (confluence), which the
    test suite checks on random words.
    """
    w = _check_word(word, alphabet)
    rules = _RULES[alphabet]
    pending: list[tuple[LaurentQ, Word]] = [(LaurentQ.one(), w)]
    done: dict[Word, LaurentQ] = {}
    while pending:
        coeff, cur = pending.pop()
        i = _find_redex(cur, rules, strategy)
        if i is None:
            s = done.get(cur, LaurentQ.zero()) + coeff
            if s:
                done[cur] = s
            else:
                done.pop(cur, None)
            continue
        for rc, repl in rules[(cur[i], cur[i + 1])]:
            pending.append((coeff * rc, cur[:i] + repl + cur[i + 2 :]))
    return NCPoly(done, alphabet, _checked=True)


class NCPoly:
    """Noncommutative polynomial: LaurentQ-linear combination of basis words."""

    __slots__ = ("terms", "alphabet")

    def __init__(
        self,
        terms: Mapping[Word, LaurentQ] | None = None,
        alphabet: Alphabet = "sphere",
        _checked: bool = False,
    ):
        self.alphabet = alphabet
        t: dict[Word, LaurentQ] = {}
        for w, c in (terms or {}).items():
            if not c:
                continue
            w = tuple(w)
            if not _checked and not is_basis_word(w, alphabet):
                raise ValueError(f"{w} is not a basis word; use normal_form")
            t[w] = c if isinstance(c, LaurentQ) else LaurentQ.const(c)
        self.terms = t

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, alphabet: Alphabet = "sphere") -> "NCPoly":
        return cls({}, alphabet)

    @classmethod
    def one(cls, alphabet: Alphabet = "sphere") -> "NCPoly":
        return cls({(): LaurentQ.one()}, alphabet)

    @classmethod
    def gen(cls, name: str, alphabet: Alphabet = "sphere") -> "NCPoly":
        _check_word((name,), alphabet)
        return cls({(name,): LaurentQ.one()}, alphabet)

    @classmethod
    def from_word(cls, word: Iterable[str], alphabet: Alphabet = "sphere") -> "NCPoly":
        return normal_form(word, alphabet)

    # -- structure ----------------------------------------------------
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> LaurentQ:
        return self.terms.get((), LaurentQ.zero())

    def boundary_mean(self) -> LaurentQ:
        """Mean of the boundary-circle symbol of this element.

        The symbol sends a and w to the unit-circle coordinate and b to 0.
        On the sphere alphabet only the constant word survives averaging;
        on disk0 every balanced word w^n (w*)^n contributes (w*w = 1 only
        normalizes one ordering, so ww* keeps symbol 1 but is not the unit).
        """
        if self.alphabet == "sphere":
            return self.constant_term()
        total = LaurentQ.zero()
        for w, c in self.terms.items():
            n = sum(1 for g in w if g == "w")
            if 2 * n == len(w):
                total = total + c
        return total

    def boundary_part(self) -> "NCPoly":
        """Fourier (boundary) part: each disk0 word w^n (w*)^m collapses to
        the pure power w^{n-m} or (w*)^{m-n}; the kernel-of-symbol part is
        exactly what this discards."""
        if self.alphabet != "disk0":
            raise AlphabetError("boundary_part is defined on the disk0 alphabet")
        out = NCPoly.zero("disk0")
        for w, c in self.terms.items():
            n = sum(1 for g in w if g == "w")
            m = len(w) - n
            word = ("w",) * (n - m) if n >= m else ("w*",) * (m - n)
            out = out + NCPoly({word: c}, "disk0", _checked=True)
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NCPoly)
            and self.alphabet == other.alphabet
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.alphabet, frozenset(self.terms.items())))

    # -- arithmetic ---------------------------------------------------
    def _require_same(self, other: "NCPoly"):
        if self.alphabet != other.alphabet:
            raise AlphabetError(f"alphabet mismatch: {self.alphabet} vs {other.alphabet}")

    def __add__(self, other) -> "NCPoly":
        other = self._coerce(other)
        self._require_same(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            s = t.get(w, LaurentQ.zero()) + c
            if s:
                t[w] = s
            else:
                t.pop(w, None)
        return NCPoly(t, self.alphabet, _checked=True)

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly({w: -c for w, c in self.terms.items()}, self.alphabet, _checked=True)

    def __sub__(self, other) -> "NCPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "NCPoly":
        return self._coerce(other) + (-self)

    def scale(self, c: LaurentQ | Scalar) -> "NCPoly":
        c = c if isinstance(c, LaurentQ) else LaurentQ.const(c)
        return NCPoly({w: c * v for w, v in self.terms.items()}, self.alphabet, _checked=True)

    def __mul__(self, other) -> "NCPoly":
        if isinstance(other, (int, Fraction, LaurentQ)):
            return self.scale(other)
        other = self._coerce(other)
        self._require_same(other)
        out = NCPoly.zero(self.alphabet)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out = out + normal_form(w1 + w2, self.alphabet).scale(c1 * c2)
        return out

    def __rmul__(self, other) -> "NCPoly":
        if isinstance(other, (int, Fraction, LaurentQ)):
            return self.scale(other)
        return self._coerce(other) * self

    def __pow__(self, n: int) -> "NCPoly":
        out = NCPoly.one(self.alphabet)
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self) -> "NCPoly":
        """*-operation: reverse each word, star each letter, renormalize.

        Coefficients are real Laurent polynomials, so no conjugation is
        needed on them.
        """
        star = {"a": "a*", "a*": "a", "b": "b", "w": "w*", "w*": "w"}
        out = NCPoly.zero(self.alphabet)
        for w, c in self.terms.items():
            rev = tuple(star[g] for g in reversed(w))
            out = out + normal_form(rev, self.alphabet).scale(c)
        return out

    def _coerce(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return NCPoly.one(self.alphabet).scale(other)
        raise TypeError(f"cannot combine NCPoly with {type(other).__name__}")

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        def wstr(w):
            return "1" if not w else "*".join(w)
        return " + ".join(f"({c})*{wstr(w)}" for w, c in sorted(self.terms.items()))


def multiply(x: NCPoly, y: NCPoly) -> NCPoly:
    return x * y


def adjoint(x: NCPoly) -> NCPoly:
    return x.adjoint()


class NCMat2:
    """2x2 matrix over NCPoly (same alphabet in all entries)."""

    __slots__ = ("e",)

    def __init__(self, entries):
        self.e = [[entries[i][j] for j in range(2)] for i in range(2)]
        alphabets = {x.alphabet for row in self.e for x in row}
        if len(alphabets) != 1:
            raise AlphabetError("mixed alphabets in matrix entries")

    @property
    def alphabet(self) -> Alphabet:
        return self.e[0][0].alphabet

    @classmethod
    def identity(cls, alphabet: Alphabet = "sphere") -> "NCMat2":
        one, zero = NCPoly.one(alphabet), NCPoly.zero(alphabet)
        return cls([[one, zero], [zero, one]])

    @classmethod
    def diag(cls, x: NCPoly, y: NCPoly) -> "NCMat2":
        zero = NCPoly.zero(x.alphabet)
        return cls([[x, zero], [zero, y]])

    def __matmul__(self, other: "NCMat2") -> "NCMat2":
        return NCMat2(
            [
                [
                    sum((self.e[i][k] * other.e[k][j] for k in range(2)), NCPoly.zero(self.alphabet))
                    for j in range(2)
                ]
                for i in range(2)
            ]
        )

    def __sub__(self, other: "NCMat2") -> "NCMat2":
        return NCMat2([[self.e[i][j] - other.e[i][j] for j in range(2)] for i in range(2)])

    def adjoint(self) -> "NCMat2":
        return NCMat2([[self.e[j][i].adjoint() for j in range(2)] for i in range(2)])

    def is_zero(self) -> bool:
        return all(self.e[i][j].is_zero() for i in range(2) for j in range(2))

    def __eq__(self, other) -> bool:
        return isinstance(other, NCMat2) and all(
            self.e[i][j] == other.e[i][j] for i in range(2) for j in range(2)
        )


def pprime() -> NCMat2:
    """The q-analogue of the Bott projector:  (1/2) [[1+b, a*], [a, 1-q^-2 b]]."""
    half = Fraction(1, 2)
    a = NCPoly.gen("a")
    astar = NCPoly.gen("a*")
    b = NCPoly.gen("b")
    one = NCPoly.one()
    return NCMat2(
        [
            [(one + b).scale(half), astar.scale(half)],
            [a.scale(half), (one - b.scale(LaurentQ.q_power(-2))).scale(half)],
        ]
    )


def check_projector(P: NCMat2) -> tuple[bool, dict]:
    """Exact projector test: P^2 - P = 0 and P* - P = 0 as Laurent identities.

    Returns (ok, details) with the number of surviving terms in each residual.
    """
    idem = (P @ P) - P
    sadj = P.adjoint() - P
    n_idem = sum(len(x.terms) for row in idem.e for x in row)
    n_sadj = sum(len(x.terms) for row in sadj.e for x in row)
    return n_idem == 0 and n_sadj == 0, {
        "idempotency_residual_terms": n_idem,
        "selfadjointness_residual_terms": n_sadj,
    }
