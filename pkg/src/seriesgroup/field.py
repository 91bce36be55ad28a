"""Exact coefficient arithmetic: big rationals and sparse polynomials over Q.

Every coefficient of every series in the package is a :class:`FieldElem`, a
polynomial in transcendental symbols ``s0, s1, ...`` with ``gmpy2.mpq``
coefficients.  Symbols are handed out by a :class:`SymbolRegistry`; two
distinct symbols are algebraically independent simply because the polynomial
ring is free.

Monomials are packed into one integer (total degree in the low bits, then a
fixed-width field per symbol id), so multiplying monomials is an integer
addition.  This is an internal detail; the public views
(:meth:`FieldElem.terms`, JSON) expose ``{symbol id: exponent}`` maps without
zero entries.
"""

from __future__ import annotations

import os
import random
import re
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

import gmpy2
from gmpy2 import mpq

from .errors import (
    BlowupError,
    UnassignedSymbolError,
    ZeroDivisorError,
)

__all__ = [
    "Rational",
    "as_rational",
    "format_rational",
    "Symbol",
    "SymbolRegistry",
    "FieldElem",
    "fresh_symbol",
    "is_zero",
    "sample_evaluate",
    "random_point",
    "fsum",
    "dot",
    "ZERO",
    "ONE",
    "get_max_terms",
    "set_max_terms",
    "max_terms",
]

Rational = type(mpq(0))

DEFAULT_MAX_TERMS = 200_000
_max_terms = int(os.environ.get("SERIESGROUP_MAX_TERMS", DEFAULT_MAX_TERMS))


def get_max_terms() -> int:
    return _max_terms


def set_max_terms(limit: int) -> None:
    global _max_terms
    if limit < 1:
        raise ValueError("max terms must be positive")
    _max_terms = int(limit)


@contextmanager
def max_terms(limit: int):
    """Temporarily change the term-count guard."""
    previous = get_max_terms()
    set_max_terms(limit)
    try:
        yield
    finally:
        set_max_terms(previous)


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def as_rational(value) -> Rational:
    """Coerce ints, ``Fraction``, ``mpq``/``mpz`` or ``"p/q"`` strings to ``mpq``."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int) or type(value) is type(gmpy2.mpz(0)):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise ValueError(f"not a rational literal: {value!r}")
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ZeroDivisorError("zero divisor")
        return mpq(int(m.group(1)), den)
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def format_rational(q) -> str:
    """``"p/q"`` with the denominator omitted when it is 1."""
    return str(as_rational(q))


@dataclass(frozen=True, order=True)
class Symbol:
    id: int
    name: str

    def __str__(self):
        return self.name


def symbol_name(sid: int) -> str:
    return f"s{sid}"


_SYMBOL_NAME_RE = re.compile(r"^s(\d+)$")


def parse_symbol_name(name: str) -> int:
    m = _SYMBOL_NAME_RE.match(name)
    if not m:
        raise ValueError(f"not a symbol name: {name!r}")
    return int(m.group(1))


class SymbolRegistry:
    """Append-only supply of fresh transcendental symbols.

    Allocation is guarded by a lock, so a registry can be shared between
    threads.
    """

    def __init__(self, symbols: Iterable[Symbol] = ()):
        self._symbols: list[Symbol] = []
        self._lock = threading.Lock()
        for sym in symbols:
            if self._symbols and sym.id <= self._symbols[-1].id:
                raise ValueError("registry symbols must have increasing ids")
            self._symbols.append(sym)

    @property
    def next_id(self) -> int:
        return self._symbols[-1].id + 1 if self._symbols else 0

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(self._symbols)

    def fresh(self) -> Symbol:
        with self._lock:
            sid = self.next_id
            sym = Symbol(sid, symbol_name(sid))
            self._symbols.append(sym)
            return sym

    def get(self, sid: int) -> Symbol:
        for sym in self._symbols:
            if sym.id == sid:
                return sym
        raise KeyError(sid)

    def copy(self) -> "SymbolRegistry":
        return SymbolRegistry(self._symbols)

    def __len__(self):
        return len(self._symbols)

    def __iter__(self) -> Iterator[Symbol]:
        return iter(tuple(self._symbols))

    def __eq__(self, other):
        if not isinstance(other, SymbolRegistry):
            return NotImplemented
        return self._symbols == other._symbols

    def __repr__(self):
        return f"SymbolRegistry({[s.name for s in self._symbols]})"

    def to_json(self) -> list:
        return [{"id": s.id, "name": s.name} for s in self._symbols]

    @classmethod
    def from_json(cls, data) -> "SymbolRegistry":
        return cls(Symbol(int(d["id"]), str(d["name"])) for d in data)


def fresh_symbol(reg: SymbolRegistry) -> Symbol:
    return reg.fresh()


# Packed monomials: bits [0, W) hold the total degree, bits [W*(i+1), W*(i+2))
# the exponent of symbol i.  Monomial product is integer addition.
_W = 24
_MASK = (1 << _W) - 1


def _pack(exps: Mapping[int, int]) -> int:
    key = 0
    deg = 0
    for sid, e in exps.items():
        if e:
            if e > _MASK:
                raise BlowupError("blowup: exponent exceeds the supported range")
            key += e << (_W * (sid + 1))
            deg += e
    if deg > _MASK:
        raise BlowupError("blowup: degree exceeds the supported range")
    return key | deg


def _unpack(key: int) -> dict[int, int]:
    out = {}
    key >>= _W
    sid = 0
    while key:
        e = key & _MASK
        if e:
            out[sid] = e
        key >>= _W
        sid += 1
    return out


def _dense(key: int) -> tuple:
    out = []
    key >>= _W
    while key:
        out.append(key & _MASK)
        key >>= _W
    return tuple(out)


def _grlex_key(key: int):
    return (key & _MASK, _dense(key))


def _check_size(terms: dict) -> None:
    if len(terms) > _max_terms:
        raise BlowupError(
            f"blowup: polynomial with {len(terms)} terms exceeds the limit of {_max_terms}"
        )


def _check_degrees(a: "FieldElem", b: "FieldElem") -> None:
    if a.degree() + b.degree() > _MASK:
        raise BlowupError("blowup: degree exceeds the supported range")


def _to_key(exps) -> int:
    if isinstance(exps, int):
        return exps
    if isinstance(exps, Mapping):
        items: dict[int, int] = {}
        for sym, e in exps.items():
            sid = sym.id if isinstance(sym, Symbol) else (
                parse_symbol_name(sym) if isinstance(sym, str) else int(sym))
            e = int(e)
            if e < 0:
                raise ValueError("negative exponent")
            items[sid] = items.get(sid, 0) + e
        return _pack(items)
    if isinstance(exps, tuple):
        return _pack(dict(enumerate(exps)))
    raise TypeError(f"bad exponent vector {exps!r}")


class FieldElem:
    """An immutable polynomial in the registry symbols with rational coefficients.

    Supports ``+ - *`` with other elements, ints and rationals, and ``/`` by a
    nonzero integer or rational (coefficient-wise division).
    """

    __slots__ = ("_terms", "_hash", "_deg")

    def __init__(self, terms=None):
        clean: dict = {}
        if terms:
            for exps, coef in dict(terms).items():
                key = _to_key(exps)
                c = as_rational(coef)
                clean[key] = clean.get(key, 0) + c
            clean = {k: v for k, v in clean.items() if v}
        _check_size(clean)
        self._terms = clean
        self._hash = None
        self._deg = None

    @classmethod
    def _raw(cls, terms: dict) -> "FieldElem":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        obj._deg = None
        return obj

    @classmethod
    def constant(cls, value) -> "FieldElem":
        c = as_rational(value)
        return cls._raw({0: c} if c else {})

    @classmethod
    def symbol(cls, sym) -> "FieldElem":
        sid = sym.id if isinstance(sym, Symbol) else int(sym)
        return cls._raw({_pack({sid: 1}): mpq(1)})

    @classmethod
    def coerce(cls, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            return value
        if isinstance(value, Symbol):
            return cls.symbol(value)
        return cls.constant(value)

    # -- views ---------------------------------------------------------------

    def terms(self) -> list[tuple[dict[int, int], Rational]]:
        """Terms in canonical (graded lexicographic, leading first) order."""
        out = []
        for key in sorted(self._terms, key=_grlex_key, reverse=True):
            out.append((_unpack(key), self._terms[key]))
        return out

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self._terms.get(0, mpq(0))

    def symbols(self) -> set[int]:
        out = set()
        for key in self._terms:
            out.update(_unpack(key))
        return out

    def degree(self, sym=None) -> int:
        """Total degree, or the degree in one symbol; -1 for zero."""
        if not self._terms:
            return -1
        if sym is None:
            if self._deg is None:
                self._deg = max(k & _MASK for k in self._terms)
            return self._deg
        sid = sym.id if isinstance(sym, Symbol) else int(sym)
        shift = _W * (sid + 1)
        return max((k >> shift) & _MASK for k in self._terms)

    def leading_term(self):
        key = max(self._terms, key=_grlex_key)
        return key, self._terms[key]

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self):
        return FieldElem._raw({k: -v for k, v in self._terms.items()})

    def __add__(self, other):
        if not isinstance(other, FieldElem):
            try:
                other = FieldElem.constant(other)
            except TypeError:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        res = dict(a)
        for k, v in b.items():
            w = res.get(k)
            if w is None:
                res[k] = v
            else:
                w = w + v
                if w:
                    res[k] = w
                else:
                    del res[k]
        _check_size(res)
        return FieldElem._raw(res)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, FieldElem):
            try:
                other = FieldElem.constant(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FieldElem":
        c = as_rational(c)
        if not c:
            return FieldElem._raw({})
        if c == 1:
            return self
        return FieldElem._raw({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, FieldElem):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return FieldElem._raw({})
        _check_degrees(self, other)
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            return FieldElem._raw({k + kb: v * cb for k, v in a.items()})
        res: dict = {}
        get = res.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                w = get(k)
                res[k] = ca * cb if w is None else w + ca * cb
        res = {k: v for k, v in res.items() if v}
        _check_size(res)
        return FieldElem._raw(res)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FieldElem):
            if not other.is_constant():
                return NotImplemented
            other = other.constant_value()
        try:
            d = as_rational(other)
        except TypeError:
            return NotImplemented
        if not d:
            raise ZeroDivisorError("zero divisor")
        return FieldElem._raw({k: v / d for k, v in self._terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not ring elements")
        if self._terms and self.degree() * n > _MASK:
            raise BlowupError("blowup: degree exceeds the supported range")
        result = FieldElem.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def exact_div(self, other: "FieldElem") -> "FieldElem | None":
        """Quotient ``self / other`` if it is a polynomial, else ``None``."""
        if not other._terms:
            raise ZeroDivisorError("zero divisor")
        lk, lc = other.leading_term()
        rem = dict(self._terms)
        quot: dict = {}
        lexps = _unpack(lk)
        while rem:
            k = max(rem, key=_grlex_key)
            kexps = _unpack(k)
            if any(kexps.get(sid, 0) < e for sid, e in lexps.items()):
                return None
            m = k - lk
            c = rem[k] / lc
            quot[m] = c
            for ok, ov in other._terms.items():
                pk = ok + m
                w = rem.get(pk, 0) - c * ov
                if w:
                    rem[pk] = w
                else:
                    rem.pop(pk, None)
        return FieldElem._raw(quot)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, assignment: Mapping) -> Rational:
        """Exact value at a point; ``assignment`` maps Symbol or id to a rational."""
        point = {}
        for sym, val in assignment.items():
            sid = sym.id if isinstance(sym, Symbol) else int(sym)
            point[sid] = as_rational(val)
        missing = self.symbols() - point.keys()
        if missing:
            names = ", ".join(symbol_name(i) for i in sorted(missing))
            raise UnassignedSymbolError(f"unassigned symbol: {names}")
        powers: dict = {}
        total = mpq(0)
        for key, coef in self._terms.items():
            term = coef
            for sid, e in _unpack(key).items():
                p = powers.get((sid, e))
                if p is None:
                    p = powers[(sid, e)] = point[sid] ** e
                term *= p
            total += term
        return total

    # -- comparison / hashing ------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self._terms == other._terms
        try:
            other = FieldElem.constant(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- text / JSON ---------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, coef in self.terms():
            mono = "*".join(
                symbol_name(sid) + (f"^{e}" if e > 1 else "") for sid, e in exps.items()
            )
            neg = coef < 0
            mag = -coef if neg else coef
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"FieldElem({str(self)!r})"

    def to_json(self) -> list:
        return [
            {"coef": format_rational(c), "exps": {symbol_name(sid): e for sid, e in exps.items()}}
            for exps, c in self.terms()
        ]

    @classmethod
    def from_json(cls, data) -> "FieldElem":
        return cls({_to_key(t.get("exps", {})): as_rational(t["coef"]) for t in data})

    @classmethod
    def parse(cls, text: str) -> "FieldElem":
        """Parse ``"3/4*s0^2*s1 - s2 + 1"`` style text."""
        src = text.replace(" ", "")
        if not src:
            raise ValueError("empty polynomial")
        chunks = re.findall(r"[+-]?[^+-]+", src)
        if "".join(chunks) != src:
            raise ValueError(f"cannot parse polynomial {text!r}")
        total = cls._raw({})
        for chunk in chunks:
            sign = -1 if chunk.startswith("-") else 1
            body = chunk.lstrip("+-")
            coef = mpq(sign)
            exps: dict[int, int] = {}
            for factor in body.split("*"):
                m = re.fullmatch(r"s(\d+)(?:\^(\d+))?", factor)
                if m:
                    sid = int(m.group(1))
                    exps[sid] = exps.get(sid, 0) + int(m.group(2) or 1)
                else:
                    coef *= as_rational(factor)
            total = total + cls({_to_key(exps): coef})
        return total


ZERO = FieldElem._raw({})
ONE = FieldElem.constant(1)


def fsum(elems: Iterable[FieldElem]) -> FieldElem:
    """Sum of many elements, accumulated in place."""
    res: dict = {}
    get = res.get
    for e in elems:
        for k, v in e._terms.items():
            w = get(k)
            res[k] = v if w is None else w + v
    res = {k: v for k, v in res.items() if v}
    _check_size(res)
    return FieldElem._raw(res)


def dot(pairs: Iterable[tuple[FieldElem, FieldElem]]) -> FieldElem:
    """Sum of products ``a*b`` over ``pairs``, accumulated in place; zero factors are skipped."""
    res: dict = {}
    get = res.get
    for a, b in pairs:
        ta, tb = a._terms, b._terms
        if not ta or not tb:
            continue
        _check_degrees(a, b)
        if len(ta) < len(tb):
            ta, tb = tb, ta
        for kb, cb in tb.items():
            for ka, ca in ta.items():
                k = ka + kb
                w = get(k)
                res[k] = ca * cb if w is None else w + ca * cb
    res = {k: v for k, v in res.items() if v}
    _check_size(res)
    return FieldElem._raw(res)


def is_zero(a: FieldElem) -> bool:
    return a.is_zero()


def sample_evaluate(a: FieldElem, assignment: Mapping) -> Rational:
    return a.evaluate(assignment)


def random_point(symbol_ids: Iterable[int], rng: random.Random,
                 bound: int = 10**6, max_den: int = 1000) -> dict[int, Rational]:
    """A random rational point: numerators in [-bound, bound], denominators in [1, max_den]."""
    return {
        sid: mpq(rng.randint(-bound, bound), rng.randint(1, max_den))
        for sid in sorted(symbol_ids)
    }
