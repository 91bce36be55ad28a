"""Bounded evidence for the big-powers and separation conditions.

A tuple ``(u1, ..., uk)`` is commutation-free when consecutive entries do not
commute.  It is independent when ``u1^a1 ... uk^ak != 1`` for all exponents
``ai >= n``.  The search here replaces "all exponents" by the finite window
``[n, n + B]^k`` and "!= 1" by a nonzero coefficient at the available
truncation order, so a witness is one-sided evidence and never a proof.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .embed import _first_nonzero, _ladder
from .errors import OrderMismatchError, PreconditionError, SeriesGroupError, TrivialElementError
from .series import Series, commutator, compose, conjugate, identity, power, truncate

__all__ = [
    "WindowEntry",
    "TupleReport",
    "commutation_free",
    "independence_search",
    "separation_check",
    "default_order",
]

WINDOW_NOTE = "finite window at finite truncation order: evidence, not a proof"


@dataclass(frozen=True)
class WindowEntry:
    alpha: tuple[int, ...]
    witness_index: int | None
    order_used: int

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "witness_index": self.witness_index,
                "order_used": self.order_used}


@dataclass(frozen=True)
class TupleReport:
    """Outcome of a window search.

    ``witness_n`` is set only when every exponent vector of the window
    ``(witness_n, witness_n + B)`` gave a nonzero coefficient.
    """

    kind: str
    commutation_free: bool
    failing_pair: int | None
    witness_n: int | None
    window: tuple[int, int] | None
    order_used: int
    n_max: int
    B: int
    entries: tuple[WindowEntry, ...] = field(default=(), repr=False)
    note: str = WINDOW_NOTE

    @property
    def found(self) -> bool:
        return self.witness_n is not None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "commutation_free": self.commutation_free,
            "failing_pair": self.failing_pair,
            "witness_n": self.witness_n,
            "window": list(self.window) if self.window else None,
            "order_used": self.order_used,
            "n_max": self.n_max,
            "B": self.B,
            "note": self.note,
            "entries": [e.to_json() for e in self.entries],
        }

    def table(self) -> str:
        """Plain-text table of exponent vector against witness coefficient index."""
        head = "witness n = " + (str(self.witness_n) if self.found else "none")
        if self.window:
            head += f", window [{self.window[0]}, {self.window[1]}]"
        lines = [f"{self.kind}: {head}, order {self.order_used}", f"  ({self.note})"]
        for e in self.entries:
            idx = "-" if e.witness_index is None else str(e.witness_index)
            lines.append(f"  {e.alpha!s:<24} -> {idx} (order {e.order_used})")
        return "\n".join(lines) + "\n"


def _check_tuple(u: Sequence[Series]) -> int:
    if not u:
        raise SeriesGroupError("empty tuple")
    N = u[0].order
    for i, x in enumerate(u, start=1):
        if x.order != N:
            raise OrderMismatchError(f"order mismatch: entry {i} has order {x.order}, entry 1 has {N}")
        if x.is_identity():
            raise TrivialElementError(f"trivial tuple entry at index {i}")
    return N


def _commutes(a: Series, b: Series) -> bool:
    # a nonzero commutator coefficient at a low order already decides
    for m in _ladder(a.order):
        if not commutator(truncate(a, m), truncate(b, m)).is_identity():
            return False
    return True


def commutation_free(u: Sequence[Series]) -> tuple[bool, int | None]:
    """``(True, None)`` if no consecutive pair commutes, else ``(False, i)`` for the first pair ``(ui, ui+1)``."""
    _check_tuple(u)
    for i in range(len(u) - 1):
        if _commutes(u[i], u[i + 1]):
            return False, i + 1
    return True, None


def default_order(exponent_bound: int, word_lengths: Sequence[int], cap: int = 32) -> int:
    """Twice the total length of the longest window word, capped."""
    return max(1, min(cap, 2 * exponent_bound * sum(word_lengths)))


class _Grid:
    """Products ``g1 u1^a1 g2 ... uk^ak g(k+1)`` with memoized powers and prefixes."""

    def __init__(self, u: Sequence[Series], g: Sequence[Series] | None):
        self.u = list(u)
        self.g = list(g) if g is not None else None
        self.order = u[0].order
        self._trunc: dict[int, tuple[list[Series], list[Series] | None]] = {}
        self._pow: dict[tuple[int, int, int], Series] = {}
        self._prefix: dict[tuple[int, tuple[int, ...]], Series] = {}

    def _at(self, m: int):
        t = self._trunc.get(m)
        if t is None:
            us = [truncate(x, m) for x in self.u]
            gs = [truncate(x, m) for x in self.g] if self.g is not None else None
            t = self._trunc[m] = (us, gs)
        return t

    def _power(self, m: int, i: int, a: int) -> Series:
        key = (m, i, a)
        p = self._pow.get(key)
        if p is None:
            base = self._at(m)[0][i]
            prev = self._pow.get((m, i, a - 1))
            p = compose(prev, base) if prev is not None else power(base, a)
            self._pow[key] = p
        return p

    def product(self, alpha: tuple[int, ...], m: int) -> Series:
        key = (m, alpha)
        p = self._prefix.get(key)
        if p is not None:
            return p
        gs = self._at(m)[1]
        if not alpha:
            p = gs[0] if gs is not None else identity(m)
        else:
            j = len(alpha) - 1
            p = compose(self.product(alpha[:-1], m), self._power(m, j, alpha[-1]))
            if gs is not None:
                p = compose(p, gs[j + 1])
        self._prefix[key] = p
        return p

    def evaluate(self, alpha: tuple[int, ...]) -> WindowEntry:
        for m in _ladder(self.order):
            idx = _first_nonzero(self.product(alpha, m))
            if idx is not None:
                return WindowEntry(alpha, idx, m)
        return WindowEntry(alpha, None, self.order)


def _search(kind: str, grid: _Grid, k: int, n_max: int, B: int) -> TupleReport:
    if n_max < 1 or B < 0:
        raise SeriesGroupError("need n_max >= 1 and B >= 0")
    seen: dict[tuple[int, ...], WindowEntry] = {}
    entries: tuple[WindowEntry, ...] = ()
    window = None
    for n in range(1, n_max + 1):
        window = (n, n + B)
        batch = []
        ok = True
        for alpha in itertools.product(range(n, n + B + 1), repeat=k):
            e = seen.get(alpha)
            if e is None:
                e = seen[alpha] = grid.evaluate(alpha)
            batch.append(e)
            if e.witness_index is None:
                ok = False
                break
        entries = tuple(batch)
        if ok:
            used = max((e.order_used for e in entries), default=grid.order)
            return TupleReport(kind, True, None, n, window, used, n_max, B, entries)
    return TupleReport(kind, True, None, None, window, grid.order, n_max, B, entries)


def _truncated(xs: Sequence[Series], order: int | None) -> list[Series]:
    if order is None:
        return list(xs)
    return [truncate(x, order) for x in xs]


def independence_search(u: Sequence[Series], n_max: int, B: int, order: int | None = None) -> TupleReport:
    """Smallest ``n <= n_max`` with ``u1^a1 ... uk^ak`` nontrivial for all ``a`` in ``[n, n+B]^k``."""
    u = _truncated(u, order)
    _check_tuple(u)
    free, bad = commutation_free(u)
    if not free:
        raise PreconditionError(f"tuple is not commutation-free: entries {bad} and {bad + 1} commute", bad)
    return _search("independence", _Grid(u, None), len(u), n_max, B)


def separation_check(u: Sequence[Series], g: Sequence[Series], n_max: int, B: int,
                     order: int | None = None) -> TupleReport:
    """Window search for ``g1 u1^a1 g2 ... gk uk^ak g(k+1) != 1``.

    Hypothesis: ``[g(i+1)^-1 ui g(i+1), u(i+1)] != 1`` for every consecutive pair.
    """
    if len(g) != len(u) + 1:
        raise SeriesGroupError(f"length mismatch: {len(u)} entries need {len(u) + 1} interleaving elements, got {len(g)}")
    u = _truncated(u, order)
    g = _truncated(g, order)
    N = _check_tuple(u)
    for j, x in enumerate(g, start=1):
        if x.order != N:
            raise OrderMismatchError(f"order mismatch: g{j} has order {x.order}, tuple has {N}")
    for i in range(len(u) - 1):
        if _commutes(conjugate(u[i], g[i + 1]), u[i + 1]):
            raise PreconditionError(f"separation hypothesis fails at index {i + 1}", i + 1)
    return _search("separation", _Grid(u, g), len(u), n_max, B)
