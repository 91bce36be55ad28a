"""The truncated composition group of series ``r + c1 r^2 + ... + cN r^(N+1)``.

Product convention: ``(f * g)(r) = f(g(r))``.  Every group expression in the
package (words, conjugates, commutators) is read with this convention, so
``f * g * h`` means ``f(g(h(r)))``.

Internally a series is handled in "w-form": ``f(r) = r * F(r)`` with
``F = [1, c1, ..., cN]``.  All routines truncate every intermediate to the
coefficients they can still influence, so the output coefficient ``ci``
depends only on input coefficients ``c1..ci``.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import OrderMismatchError, SeriesGroupError
from .field import ONE, ZERO, FieldElem, dot

__all__ = [
    "Series",
    "identity",
    "compose",
    "inverse",
    "power",
    "conjugate",
    "commutator",
    "ord",
    "truncate",
    "specialize",
]


class Series:
    """Element of the truncated group, stored as its ``N`` coefficients ``c1..cN``."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable):
        cs = tuple(FieldElem.coerce(c) for c in coeffs)
        if not cs:
            raise SeriesGroupError("series order must be at least 1")
        self.coeffs = cs
        self._hash = None

    @classmethod
    def _raw(cls, coeffs: Sequence[FieldElem]) -> "Series":
        obj = cls.__new__(cls)
        obj.coeffs = tuple(coeffs)
        obj._hash = None
        return obj

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> FieldElem:
        """``f[i]`` is the coefficient ``ci`` of ``r^(i+1)``, 1-based."""
        if not 1 <= i <= len(self.coeffs):
            raise IndexError(i)
        return self.coeffs[i - 1]

    def is_identity(self) -> bool:
        return not any(self.coeffs)

    def symbols(self) -> set[int]:
        out: set[int] = set()
        for c in self.coeffs:
            out |= c.symbols()
        return out

    def __mul__(self, other: "Series") -> "Series":
        if not isinstance(other, Series):
            return NotImplemented
        return compose(self, other)

    def __pow__(self, n: int) -> "Series":
        return power(self, n)

    def inverse(self) -> "Series":
        return inverse(self)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __str__(self):
        out = "r"
        for i, c in enumerate(self.coeffs, start=1):
            if not c:
                continue
            if c.is_constant():
                v = c.constant_value()
                sign, mag = ("-", -v) if v < 0 else ("+", v)
                body = f"r^{i + 1}" if mag == 1 else f"{mag}*r^{i + 1}"
            else:
                sign, body = "+", f"({c})*r^{i + 1}"
            out += f" {sign} {body}"
        return out + f" + O(r^{self.order + 2})"

    def __repr__(self):
        return f"Series({[str(c) for c in self.coeffs]})"

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Series":
        coeffs = [FieldElem.from_json(c) for c in data["coeffs"]]
        if len(coeffs) != int(data["order"]):
            raise SeriesGroupError("series JSON: order does not match coefficient count")
        return cls._raw(coeffs)


def _check_orders(f: Series, g: Series) -> int:
    if f.order != g.order:
        raise OrderMismatchError(f"order mismatch: {f.order} vs {g.order}")
    return f.order


def _mul_trunc(a: Sequence[FieldElem], b: Sequence[FieldElem], length: int) -> list[FieldElem]:
    """First ``length`` coefficients of the product of two power series."""
    la, lb = len(a), len(b)
    return [
        dot((a[i], b[n - i]) for i in range(max(0, n - lb + 1), min(n, la - 1) + 1))
        for n in range(length)
    ]


def identity(N: int) -> Series:
    if N < 1:
        raise SeriesGroupError("series order must be at least 1")
    return Series._raw((ZERO,) * N)


def compose(f: Series, g: Series) -> Series:
    """Group product ``f * g``, i.e. the truncated substitution ``f(g(r))``.

    Horner scheme on ``F(g) = F0 + g*(F1 + g*(F2 + ...))`` where ``f = r*F``;
    the k-th Horner value is only needed modulo ``r^(N+1-k)``.
    """
    N = _check_orders(f, g)
    if g.is_identity():
        return f
    if f.is_identity():
        return g
    F = (ONE,) + f.coeffs
    W = (ONE,) + g.coeffs
    H = [F[N]]
    for k in range(N - 1, -1, -1):
        T = _mul_trunc(W, H, N - k)
        H = [F[k]] + T
    out = _mul_trunc(W, H, N + 1)
    return Series._raw(out[1:])


def inverse(f: Series) -> Series:
    """Compositional inverse by triangular back-substitution.

    Solves ``g = r - sum_{k>=1} fk g^(k+1)`` one coefficient at a time: the
    i-th coefficient of the right side only involves ``g1..g(i-1)``.
    """
    N = f.order
    if f.is_identity():
        return f
    W: list[FieldElem] = [ONE]
    # powers[p][n] = [r^n] W^p, kept only where p + n <= N + 1
    powers: dict[int, list[FieldElem]] = {p: [ONE] for p in range(2, N + 2)}
    powers[1] = W
    fc = f.coeffs
    for i in range(1, N + 1):
        gi = -dot((fc[k - 1], powers[k + 1][i - k]) for k in range(1, i + 1))
        W.append(gi)
        for p in range(2, N + 2 - i):
            prev = powers[p - 1]
            powers[p].append(dot((prev[m], W[i - m]) for m in range(i + 1)))
    return Series._raw(W[1:])


def power(f: Series, n: int) -> Series:
    """``f^n`` by binary exponentiation; negative ``n`` uses the inverse."""
    if n < 0:
        f, n = inverse(f), -n
    result = identity(f.order)
    base = f
    while n:
        if n & 1:
            result = compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def conjugate(f: Series, g: Series) -> Series:
    """``g^-1 * f * g``."""
    _check_orders(f, g)
    return compose(inverse(g), compose(f, g))


def commutator(f: Series, g: Series) -> Series:
    """``f * g * f^-1 * g^-1``."""
    _check_orders(f, g)
    return compose(compose(f, g), inverse(compose(g, f)))


def ord(f: Series) -> int | None:
    """Index of the first nonzero coefficient, ``None`` for the identity."""
    for i, c in enumerate(f.coeffs, start=1):
        if c:
            return i
    return None


def truncate(f: Series, M: int) -> Series:
    if M > f.order:
        raise SeriesGroupError(f"cannot extend a series of order {f.order} to {M}")
    if M < 1:
        raise SeriesGroupError("series order must be at least 1")
    return Series._raw(f.coeffs[:M])


def specialize(f: Series, point: Mapping) -> Series:
    """Substitute rationals for every symbol; coefficients become constants."""
    return Series._raw([FieldElem.constant(c.evaluate(point)) if c else ZERO for c in f.coeffs])
