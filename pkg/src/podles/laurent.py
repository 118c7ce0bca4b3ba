"""Exact Laurent polynomials in the deformation parameter q over the rationals.

Coefficients of the sphere algebra live here: the defining relations need
q^-2 and q^-4, so plain polynomials are not enough.  Keeping everything in
Fraction arithmetic turns every algebraic identity of the project into an
exact cancellation instead of a float comparison.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Scalar = Union[int, Fraction]


class LaurentQ:
    """Laurent polynomial sum_k c_k q^k with rational c_k, k in Z.

    Immutable; zero coefficients are never stored.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict[int, Fraction] = {}
        for k, v in items:
            f = Fraction(v)
            if f:
                f = c.get(k, Fraction(0)) + f
                if f:
                    c[int(k)] = f
                else:
                    c.pop(int(k), None)
        self._c = c

    @classmethod
    def zero(cls) -> "LaurentQ":
        return cls()

    @classmethod
    def one(cls) -> "LaurentQ":
        return cls({0: 1})

    @classmethod
    def q_power(cls, k: int, coeff: Scalar = 1) -> "LaurentQ":
        """coeff * q^k (k may be negative)."""
        return cls({k: coeff})

    @classmethod
    def const(cls, v: Scalar) -> "LaurentQ":
        return cls({0: v})

    def items(self):
        return self._c.items()

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentQ.const(other)
        if not isinstance(other, LaurentQ):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __add__(self, other) -> "LaurentQ":
        other = _coerce(other)
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, Fraction(0)) + v
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        out = LaurentQ.__new__(LaurentQ)
        out._c = c
        return out

    __radd__ = __add__

    def __neg__(self) -> "LaurentQ":
        out = LaurentQ.__new__(LaurentQ)
        out._c = {k: -v for k, v in self._c.items()}
        return out

    def __sub__(self, other) -> "LaurentQ":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "LaurentQ":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "LaurentQ":
        other = _coerce(other)
        c: dict[int, Fraction] = {}
        for k1, v1 in self._c.items():
            for k2, v2 in other._c.items():
                k = k1 + k2
                s = c.get(k, Fraction(0)) + v1 * v2
                if s:
                    c[k] = s
                else:
                    c.pop(k, None)
        out = LaurentQ.__new__(LaurentQ)
        out._c = c
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentQ":
        if n < 0:
            raise ValueError("negative powers of a general Laurent polynomial")
        out = LaurentQ.one()
        for _ in range(n):
            out = out * self
        return out

    def evaluate(self, q: float) -> float:
        """Evaluate at a real deformation parameter, required to lie in (0,1)."""
        if not 0.0 < q < 1.0:
            raise ValueError(f"q must lie in (0,1), got {q}")
        return float(sum(float(v) * q**k for k, v in self._c.items()))

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for k in sorted(self._c):
            v = self._c[k]
            if k == 0:
                parts.append(str(v))
            elif k == 1:
                parts.append(f"{v}*q" if v != 1 else "q")
            else:
                parts.append(f"{v}*q^{k}" if v != 1 else f"q^{k}")
        return " + ".join(parts).replace("+ -", "- ")


def _coerce(x) -> LaurentQ:
    if isinstance(x, LaurentQ):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentQ.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to LaurentQ")


def eval_coeff(c: LaurentQ, q: float) -> float:
    """Exact-to-float evaluation of a coefficient at real q in (0,1)."""
    return c.evaluate(q)
