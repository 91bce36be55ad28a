"""Formal vector fields ``sum aj ej`` with ``ej = -x^(j+1) d/dx``, and the maps to the group.

The exponential of ``sum cj ej`` is the time-one value ``v(1)`` of the
solution of ``dv/dx = sum cj v^(j+1)``, ``v(0) = r``.  Three independent
routes compute it:

* :func:`exp` -- Lie series ``sum_k D^k(r)/k!`` with ``D = (sum cj r^(j+1)) d/dr``,
  evaluated online so the same recursion also inverts it (:func:`log`);
* :func:`exp_picard` -- Picard iteration of the initial value problem with
  the coefficients of ``r^(i+1)`` kept as explicit polynomials in ``x``;
* :func:`exp_formula` -- the closed sum over compositions
  ``i = i1 + ... + ik`` with weight ``prod_{j<k} (i1 + ... + ij + 1) / k!``.
"""

from __future__ import annotations

import re
import warnings
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConsistencyError,
    IndeterminateError,
    NonPolynomialRatioWarning,
    OrderMismatchError,
    SeriesGroupError,
    TrivialElementError,
)
from .field import ONE, ZERO, FieldElem, dot, fsum
from .series import Series, commutator

__all__ = [
    "VectorField",
    "bracket",
    "exp",
    "exp_picard",
    "exp_formula",
    "log",
    "flow",
    "proportional",
    "commute",
    "centralizer_member",
]


_FIELD_TERM_RE = re.compile(r"([+-]?)(?:(\([^()]*\)|[0-9/]+)\*)?e(\d+)")


class VectorField:
    """Truncated Lie algebra element: coefficients ``a1..aN`` of ``e1..eN``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = tuple(FieldElem.coerce(c) for c in coeffs)
        if not cs:
            raise SeriesGroupError("vector field order must be at least 1")
        self.coeffs = cs

    @classmethod
    def _raw(cls, coeffs) -> "VectorField":
        obj = cls.__new__(cls)
        obj.coeffs = tuple(coeffs)
        return obj

    @classmethod
    def zero(cls, N: int) -> "VectorField":
        return cls._raw((ZERO,) * N)

    @classmethod
    def basis(cls, j: int, N: int) -> "VectorField":
        if not 1 <= j <= N:
            raise SeriesGroupError(f"e{j} is outside order {N}")
        return cls._raw(tuple(ONE if i == j else ZERO for i in range(1, N + 1)))

    @classmethod
    def from_terms(cls, terms: Mapping[int, object], N: int) -> "VectorField":
        """Build ``sum coef * ej`` from ``{j: coef}``; indices above ``N`` are dropped."""
        cs = [ZERO] * N
        for j, c in terms.items():
            if j < 1:
                raise SeriesGroupError(f"no basis vector e{j}")
            if j <= N:
                cs[j - 1] = cs[j - 1] + FieldElem.coerce(c)
        return cls._raw(cs)

    @classmethod
    def parse(cls, text: str, N: int) -> "VectorField":
        """Parse ``"e1 + 2*e2 - 1/2*e3"``; a coefficient may be a parenthesized polynomial ``(s0 - 1)*e2``."""
        src = text.replace(" ", "")
        if not src:
            raise SeriesGroupError("empty vector field")
        chunks, depth, start = [], 0, 0
        for i, ch in enumerate(src):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch in "+-" and depth == 0 and i > start:
                chunks.append(src[start:i])
                start = i
        chunks.append(src[start:])
        terms: dict[int, FieldElem] = {}
        for chunk in chunks:
            m = _FIELD_TERM_RE.fullmatch(chunk)
            if not m:
                raise SeriesGroupError(f"cannot parse vector field term {chunk!r} in {text!r}")
            sign, coef, j = m.group(1), m.group(2), int(m.group(3))
            c = FieldElem.parse(coef.strip("()")) if coef else ONE
            if sign == "-":
                c = -c
            terms[j] = terms.get(j, ZERO) + c
        return cls.from_terms(terms, N)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, j: int) -> FieldElem:
        if not 1 <= j <= len(self.coeffs):
            raise IndexError(j)
        return self.coeffs[j - 1]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def ord(self) -> int | None:
        for i, c in enumerate(self.coeffs, start=1):
            if c:
                return i
        return None

    def _check(self, other: "VectorField") -> None:
        if self.order != other.order:
            raise OrderMismatchError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        self._check(other)
        return VectorField._raw(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        self._check(other)
        return VectorField._raw(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self):
        return VectorField._raw(-a for a in self.coeffs)

    def scale(self, alpha) -> "VectorField":
        alpha = FieldElem.coerce(alpha)
        return VectorField._raw(alpha * a for a in self.coeffs)

    def __rmul__(self, alpha):
        if isinstance(alpha, VectorField):
            return NotImplemented
        return self.scale(alpha)

    def truncate(self, M: int) -> "VectorField":
        return VectorField._raw(self.coeffs[:M])

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        parts = []
        for j, c in enumerate(self.coeffs, start=1):
            if c:
                parts.append(f"e{j}" if c == 1 else f"({c})*e{j}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"VectorField({[str(c) for c in self.coeffs]})"

    def to_json(self) -> dict:
        return {"order": self.order, "field_coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Mapping) -> "VectorField":
        cs = [FieldElem.from_json(c) for c in data["field_coeffs"]]
        if len(cs) != int(data["order"]):
            raise SeriesGroupError("vector field JSON: order does not match coefficient count")
        return cls._raw(cs)


def bracket(a: VectorField, b: VectorField) -> VectorField:
    """Lie bracket from ``[ei, ej] = (i - j) e(i+j)``, truncated at the common order."""
    a._check(b)
    N = a.order
    A, B = a.coeffs, b.coeffs
    out = []
    for n in range(1, N + 1):
        out.append(dot(
            (A[i - 1], B[n - i - 1].scale(2 * i - n))
            for i in range(1, n) if 2 * i != n
        ))
    return VectorField._raw(out)


def _lie_series(N: int, field: Sequence[FieldElem] | None = None,
                target: Sequence[FieldElem] | None = None):
    """Online Lie series shared by :func:`exp` and :func:`log`.

    ``g[k]`` holds ``D^k(r)``; its coefficient of ``r^(n+1)`` only involves
    ``a1..a(n-k+1)``, so for ``k >= 2`` everything at index ``n`` is known
    before ``an`` is.  Given ``field`` it returns ``exp``; given ``target`` it
    solves for the field.  ``scaled[k][m]`` caches ``(m+1) * [r^(m+1)] D^k(r)``.
    """
    a = [ZERO] * (N + 1)
    out = [ZERO] * (N + 1)
    scaled = [[ONE] + [ZERO] * N] + [[ZERO] * (N + 1) for _ in range(N)]
    for n in range(1, N + 1):
        higher = []
        for k in range(2, n + 1):
            prev = scaled[k - 1]
            gkn = dot((a[j], prev[n - j]) for j in range(1, n - k + 2))
            if gkn:
                scaled[k][n] = gkn.scale(n + 1)
                higher.append(gkn / factorial(k))
        rest = fsum(higher)
        if target is None:
            a[n] = field[n - 1]
            out[n] = a[n] + rest
        else:
            a[n] = target[n - 1] - rest
            out[n] = target[n - 1]
        scaled[1][n] = a[n].scale(n + 1)
    return a[1:], out[1:]


def exp(a: VectorField) -> Series:
    """Group element ``exp(a)``; the production route used by :func:`log` and :func:`flow`."""
    if a.is_zero():
        return Series._raw(a.coeffs)
    _, out = _lie_series(a.order, field=a.coeffs)
    return Series._raw(out)


def log(h: Series) -> VectorField:
    """The unique field with ``exp(log h) = h`` at the truncation order."""
    if h.is_identity():
        return VectorField._raw(h.coeffs)
    a, _ = _lie_series(h.order, target=h.coeffs)
    return VectorField._raw(a)


# -- Picard route -----------------------------------------------------------

def _xp_mul(p: Sequence[FieldElem], q: Sequence[FieldElem]) -> list[FieldElem]:
    if not p or not q:
        return []
    lp, lq = len(p), len(q)
    return [
        dot((p[i], q[d - i]) for i in range(max(0, d - lq + 1), min(d, lp - 1) + 1))
        for d in range(lp + lq - 1)
    ]


def _xp_add(polys: Iterable[Sequence[FieldElem]]) -> list[FieldElem]:
    polys = [p for p in polys if p]
    if not polys:
        return []
    width = max(len(p) for p in polys)
    return [fsum(p[d] for p in polys if d < len(p)) for d in range(width)]


def _xp_integrate(p: Sequence[FieldElem]) -> list[FieldElem]:
    """Antiderivative vanishing at ``x = 0``."""
    return [ZERO] + [c / (d + 1) for d, c in enumerate(p)]


def exp_picard(a: VectorField) -> Series:
    """``exp(a)`` by Picard iteration of ``dv/dx = sum cj v^(j+1)``, ``v(0) = r``.

    Writing ``v = r*w`` with ``w = 1 + sum vi(x) r^i`` turns the equation into
    ``dw/dx = sum cj r^j w^(j+1)``.  The i-th Picard iterate fixes ``vi``
    for good, so iteration ``m`` only integrates the ``r^m`` component, using
    the stabilized ``v1..v(m-1)``.  Each ``vi`` is kept as a polynomial in
    ``x`` and the result is read off at ``x = 1``.
    """
    N = a.order
    c = a.coeffs
    one = [ONE]
    # W[p][n] = [r^n] w^p as a polynomial in x, kept while p + n <= N + 1
    W: dict[int, list[list[FieldElem]]] = {p: [one] for p in range(1, N + 2)}
    out = []
    for m in range(1, N + 1):
        rhs = _xp_add(
            [ci * t for t in W[j + 1][m - j]]
            for j, ci in enumerate(c[:m], start=1) if ci
        )
        vm = _xp_integrate(rhs) if rhs else []
        W[1].append(vm)
        for p in range(2, N + 2 - m):
            prev = W[p - 1]
            W[p].append(_xp_add(_xp_mul(prev[l], W[1][m - l]) for l in range(m + 1)))
        out.append(fsum(vm))
    return Series._raw(out)


# -- closed formula ---------------------------------------------------------

def exp_formula(a: VectorField) -> Series:
    """``exp(a)`` from the explicit sum over compositions of each index.

    The coefficient of ``r^(i+1)`` is the sum over ``i = i1 + ... + ik`` of
    ``(i1+1)(i1+i2+1)...(i1+...+i(k-1)+1) * c_i1 ... c_ik / k!`` (the empty
    product is 1 when ``k = 1``).
    """
    N = a.order
    c = a.coeffs
    out = []
    for i in range(1, N + 1):
        by_parts: dict[int, list[FieldElem]] = {}

        def walk(prefix: int, k: int, weight: int, mono: FieldElem):
            rest = i - prefix
            for part in range(1, rest + 1):
                cp = c[part - 1]
                if not cp:
                    continue
                term = cp if mono is None else mono * cp
                if part == rest:
                    by_parts.setdefault(k + 1, []).append(term.scale(weight))
                else:
                    walk(prefix + part, k + 1, weight * (prefix + part + 1), term)

        walk(0, 0, 1, None)
        out.append(fsum(fsum(terms) / factorial(k) for k, terms in by_parts.items()))
    return Series._raw(out)


# -- flows and commutation --------------------------------------------------

def flow(h: Series, alpha) -> Series:
    """``h^alpha = exp(alpha * log h)``; ``alpha`` may be any ring element or symbol."""
    alpha = FieldElem.coerce(alpha)
    if not alpha or h.is_identity():
        return Series._raw((ZERO,) * h.order)
    return exp(log(h).scale(alpha))


def _ratio(num: FieldElem, den: FieldElem) -> FieldElem | None:
    if den.is_constant():
        return num / den.constant_value()
    q = num.exact_div(den)
    if q is None:
        warnings.warn(
            f"fields are proportional but the ratio ({num})/({den}) is not a polynomial",
            NonPolynomialRatioWarning,
            stacklevel=3,
        )
    return q


def proportional(a: VectorField, b: VectorField, upto: int | None = None) -> FieldElem | None:
    """``lam`` with ``a = lam * b`` (compared on indices ``<= upto``), else ``None``.

    Proportionality is decided by cross-ratios ``ai*bp = ap*bi`` over the
    fraction field; when it holds but ``lam`` is not a polynomial the result
    is ``None`` and a :class:`NonPolynomialRatioWarning` is issued.
    """
    a._check(b)
    n = a.order if upto is None else min(upto, a.order)
    A, B = a.coeffs[:n], b.coeffs[:n]
    a_zero, b_zero = not any(A), not any(B)
    if a_zero and b_zero:
        raise IndeterminateError("indeterminate: both fields are zero")
    if b_zero:
        return None
    if a_zero:
        return ZERO
    p = next(i for i, x in enumerate(B) if x)
    ap, bp = A[p], B[p]
    for ai, bi in zip(A, B):
        if ai * bp != ap * bi:
            return None
    return _ratio(ap, bp)


def _lie_commute(a: VectorField, b: VectorField) -> bool:
    """Whether ``exp(a)`` and ``exp(b)`` commute modulo terms above the order.

    With ``p = ord a``, ``q = ord b``: the bracket vanishes below ``p + q`` and
    its index-``(p+q)`` coefficient is ``(p - q) ap bq``, so ``p != q`` forces
    non-commutation when ``p + q <= N``; for ``p = q`` the leading-term
    induction shows commutation iff ``a`` is proportional to ``b`` on indices
    ``<= N - p``.
    """
    N = a.order
    p, q = a.ord(), b.ord()
    if p is None or q is None or p + q > N:
        return True
    if p != q:
        return False
    A, B = a.coeffs, b.coeffs
    ap, bp = A[p - 1], B[p - 1]
    return all(A[i] * bp == ap * B[i] for i in range(p - 1, N - p))


def commute(f: Series, g: Series) -> bool:
    """Whether ``f`` and ``g`` commute at the truncation order.

    Decided by the commutator and cross-checked against the Lie-algebra
    criterion on ``log f`` and ``log g``.
    """
    direct = commutator(f, g).is_identity()
    via_logs = _lie_commute(log(f), log(g))
    if direct != via_logs:
        raise ConsistencyError(
            f"commutator says {direct} but the logarithms say {via_logs}"
        )
    return direct


def centralizer_member(g: Series, h: Series) -> FieldElem | None:
    """``lam`` with ``g = h^lam`` at the truncation order, else ``None``."""
    if h.is_identity():
        raise TrivialElementError("trivial base")
    lam = proportional(log(g), log(h))
    if lam is not None and flow(h, lam) != g:
        raise ConsistencyError("flow of the base does not reproduce the element")
    return lam
