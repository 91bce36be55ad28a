"""Executable embedding chains: one-parameter bases, free products, amalgams, centralizer extensions.

A :class:`Chain` is a finite sequence of construction steps together with the
generator series they produce.  Every step consumes fresh symbols from the
chain's registry; the step records carry enough information to replay the
whole chain at any truncation order (:meth:`Chain.rebuild`), which is how
certificates escalate.

Constructions, with ``conj(g, v) = v^-1 g v``:

* free product with a partner subgroup ``H``: ``c = exp(s e1 + s^2 e2)``,
  new generators ``conj(h, c^t)`` for fresh ``s, t``;
* amalgam over the centralizer of ``u``: ``c = u``, new generators
  ``conj(h, u^s)`` for fresh ``s``, which fixes ``u`` itself;
* centralizer extension: new generator ``u^s`` for fresh ``s``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    BlowupError,
    ConsistencyError,
    NameCollisionError,
    SeriesGroupError,
    TrivialElementError,
    UnknownGeneratorError,
)
from .field import FieldElem, SymbolRegistry, format_rational, random_point
from .liealg import VectorField, exp, flow
from .series import Series, commutator, compose, conjugate, identity, inverse, specialize, truncate
from .words import Word

__all__ = [
    "BASE",
    "FREE_PRODUCT",
    "AMALGAM",
    "CENTRALIZER_EXT",
    "StepRecord",
    "Chain",
    "Certificate",
    "one_param_base",
    "free_product_step",
    "amalgam_step",
    "centralizer_extension_step",
    "eval_word",
    "replay",
    "nontrivial_certificate",
    "CertificateEngine",
    "surface_group",
    "free_pair",
]

BASE = "OneParamBase"
FREE_PRODUCT = "FreeProduct"
AMALGAM = "Amalgam"
CENTRALIZER_EXT = "CentralizerExt"
_KINDS = (BASE, FREE_PRODUCT, AMALGAM, CENTRALIZER_EXT)

NONTRIVIAL = "Nontrivial"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class StepRecord:
    """One construction step; ``symbols`` are the registry ids it consumed, in order."""

    kind: str
    symbols: tuple[int, ...]
    names: tuple[str, ...]
    partners: tuple[tuple[str, Word], ...] = ()
    u: Word | None = None
    field: tuple[FieldElem, ...] | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SeriesGroupError(f"unknown step kind {self.kind!r}")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "symbols": list(self.symbols), "names": list(self.names)}
        if self.field is not None:
            out["field"] = [c.to_json() for c in self.field]
        if self.u is not None:
            out["u"] = self.u.to_json()
        if self.partners:
            out["partners"] = [{"name": n, "word": w.to_json()} for n, w in self.partners]
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "StepRecord":
        return cls(
            kind=data["kind"],
            symbols=tuple(int(i) for i in data.get("symbols", ())),
            names=tuple(data.get("names", ())),
            partners=tuple((p["name"], Word.from_json(p["word"])) for p in data.get("partners", ())),
            u=Word.from_json(data["u"]) if "u" in data else None,
            field=tuple(FieldElem.from_json(c) for c in data["field"]) if "field" in data else None,
        )


@dataclass(frozen=True)
class Chain:
    order: int
    registry: SymbolRegistry
    generators: Mapping[str, Series]
    steps: tuple[StepRecord, ...]
    _powers: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def names(self) -> list[str]:
        return list(self.generators)

    def generator(self, name: str) -> Series:
        try:
            return self.generators[name]
        except KeyError:
            raise UnknownGeneratorError(f"unknown generator {name!r}") from None

    def power(self, name: str, e: int) -> Series:
        key = (name, e)
        p = self._powers.get(key)
        if p is None:
            g = self.generator(name)
            if e == 1:
                p = g
            elif e == -1:
                p = inverse(g)
            elif e > 0:
                half = self.power(name, e // 2)
                p = compose(half, half)
                if e % 2:
                    p = compose(p, g)
            else:
                half = self.power(name, -((-e) // 2))
                p = compose(half, half)
                if (-e) % 2:
                    p = compose(p, self.power(name, -1))
            self._powers[key] = p
        return p

    def rebuild(self, order: int) -> "Chain":
        """Replay every step at another truncation order."""
        return replay(self.steps, order)

    def truncated(self, order: int) -> "Chain":
        """Same chain with every generator truncated; cheaper than :meth:`rebuild`."""
        if order == self.order:
            return self
        if order > self.order:
            return self.rebuild(order)
        gens = {n: truncate(g, order) for n, g in self.generators.items()}
        return Chain(order, self.registry, gens, self.steps)

    def specialized(self, point: Mapping[int, object]) -> "Chain":
        """Substitute rationals for the symbols in every generator."""
        gens = {n: specialize(g, point) for n, g in self.generators.items()}
        return Chain(self.order, self.registry, gens, self.steps)

    def relators(self) -> list[Word]:
        """Defining relations introduced by amalgam and extension steps."""
        out = []
        for rec in self.steps:
            if rec.kind == AMALGAM:
                renaming = {}
                for new, w in rec.partners:
                    if len(w.letters) == 1 and w.letters[0][1] == 1:
                        renaming[w.letters[0][0]] = new
                if rec.u.generators() <= renaming.keys():
                    out.append((rec.u * rec.u.rename(renaming).inverse()).reduced())
            elif rec.kind == CENTRALIZER_EXT:
                out.append(Word.commutator(Word.gen(rec.names[0]), rec.u).reduced())
        return out

    def is_relator_conjugate(self, w: Word) -> bool:
        """Whether ``w`` is, up to cyclic rotation and inversion, a recorded relator."""
        target = w.cyclically_reduced()
        if target.is_empty():
            return False
        for rel in self.relators():
            for cand in (rel.cyclically_reduced(), rel.inverse().cyclically_reduced()):
                if target in cand.rotations():
                    return True
        return False

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "registry": self.registry.to_json(),
            "generators": {n: g.to_json() for n, g in self.generators.items()},
            "steps": [s.to_json() for s in self.steps],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, data: Mapping) -> "Chain":
        order = int(data["order"])
        gens = {n: Series.from_json(g) for n, g in data["generators"].items()}
        for n, g in gens.items():
            if g.order != order:
                raise SeriesGroupError(f"generator {n} has order {g.order}, chain has {order}")
        return cls(
            order,
            SymbolRegistry.from_json(data["registry"]),
            gens,
            tuple(StepRecord.from_json(s) for s in data["steps"]),
        )

    @classmethod
    def loads(cls, text: str) -> "Chain":
        return cls.from_json(json.loads(text))

    def show(self) -> str:
        lines = [f"chain of order {self.order}"]
        lines.append("symbols: " + (", ".join(s.name for s in self.registry) or "none"))
        lines.append("steps:")
        for i, rec in enumerate(self.steps, start=1):
            syms = ", ".join(f"s{i}" for i in rec.symbols)
            desc = f"  {i}. {rec.kind}"
            if rec.field is not None:
                desc += f" field={VectorField._raw(rec.field)}"
            if rec.u is not None:
                desc += f" u={rec.u}"
            if rec.partners:
                desc += " partners=" + ", ".join(f"{n}<-{w}" for n, w in rec.partners)
            if syms:
                desc += f" symbols=[{syms}]"
            desc += " introduces " + ", ".join(rec.names)
            lines.append(desc)
        lines.append("generators:")
        for name, g in self.generators.items():
            lines.append(f"  {name} = {g}")
        return "\n".join(lines) + "\n"


# -- step realization -------------------------------------------------------

def _free_product_conjugator(order: int, s: FieldElem, t: FieldElem) -> Series:
    c = exp(VectorField.from_terms({1: s, 2: s * s}, order))
    return flow(c, t)


def _realize(chain: Chain, rec: StepRecord, point: Mapping[int, object] | None = None) -> dict[str, Series]:
    """New generators produced by ``rec`` on top of ``chain``.

    With ``point`` the step's symbols are replaced by those rationals from the
    start, which gives the specialization of the symbolic result at a fraction
    of the cost.
    """
    N = chain.order
    if rec.kind == BASE:
        cs = list(rec.field[:N]) + [FieldElem.constant(0)] * max(0, N - len(rec.field))
        return {rec.names[0]: exp(VectorField(cs))}
    if point is None:
        syms = [FieldElem.symbol(chain.registry.get(i)) for i in rec.symbols]
    else:
        syms = [FieldElem.constant(point[i]) for i in rec.symbols]
    if rec.kind == FREE_PRODUCT:
        conj = _free_product_conjugator(N, syms[0], syms[1])
        return {name: conjugate(eval_word(chain, w), conj) for name, w in rec.partners}
    U = eval_word(chain, rec.u)
    if U.is_identity():
        kind = "amalgam element" if rec.kind == AMALGAM else "centralizer element"
        raise TrivialElementError(f"trivial {kind}: {rec.u} evaluates to the identity")
    V = flow(U, syms[0])
    if rec.kind == AMALGAM:
        if conjugate(U, V) != U:
            raise ConsistencyError("amalgam conjugator does not fix u")
        return {name: conjugate(eval_word(chain, w), V) for name, w in rec.partners}
    if not commutator(V, U).is_identity():
        raise ConsistencyError("adjoined flow does not commute with u")
    return {rec.names[0]: V}


def _extend(chain: Chain, rec: StepRecord, registry: SymbolRegistry,
            point: Mapping[int, object] | None = None) -> Chain:
    new = _realize(Chain(chain.order, registry, chain.generators, chain.steps), rec, point)
    gens = dict(chain.generators)
    gens.update(new)
    return Chain(chain.order, registry, gens, chain.steps + (rec,))


def _check_new_names(chain: Chain, names: Sequence[str]) -> None:
    seen = set(chain.generators)
    for n in names:
        if n in seen:
            raise NameCollisionError(f"generator name collision: {n!r}")
        seen.add(n)


def _normalize_partners(chain: Chain, partners) -> tuple[tuple[str, Word], ...]:
    if partners is None:
        partners = list(chain.generators)
    out = []
    for p in partners:
        if isinstance(p, str):
            w = Word.parse(p)
            if len(w.letters) != 1 or w.letters[0][1] != 1:
                raise SeriesGroupError(f"partner {p!r} needs an explicit new name")
            out.append((w.letters[0][0] + "'", w))
        else:
            name, w = p
            out.append((name, Word.coerce(w)))
    for _, w in out:
        for g in w.generators():
            chain.generator(g)
    return tuple(out)


def replay(steps: Iterable[StepRecord], order: int, point: Mapping[int, object] | None = None) -> Chain:
    """Rebuild a chain from its step records, reallocating the same symbol ids.

    With ``point`` every symbol is specialized as soon as it is introduced.
    """
    steps = tuple(steps)
    if not steps or steps[0].kind != BASE:
        raise SeriesGroupError("a chain must start with a one-parameter base")
    registry = SymbolRegistry()
    chain = Chain(order, registry, {}, ())
    for rec in steps:
        registry = registry.copy()
        got = tuple(registry.fresh().id for _ in rec.symbols)
        if got != rec.symbols:
            raise SeriesGroupError(f"replay allocated symbols {got}, record says {rec.symbols}")
        chain = _extend(chain, rec, registry, point)
    return chain


# -- public construction steps ----------------------------------------------

def one_param_base(N: int, a: VectorField, name: str = "X") -> Chain:
    """Chain whose single generator is ``exp(a)``; ``a`` must have rational coefficients."""
    if N < 1:
        raise SeriesGroupError("order must be at least 1")
    if a.is_zero():
        raise TrivialElementError("trivial base")
    if any(not c.is_constant() for c in a.coeffs):
        raise SeriesGroupError("base field must have rational coefficients")
    rec = StepRecord(BASE, (), (name,), field=tuple(a.coeffs))
    return _extend(Chain(N, SymbolRegistry(), {}, ()), rec, SymbolRegistry())


def free_product_step(chain: Chain, partners) -> Chain:
    """Adjoin a conjugated copy of the partner subgroup generated by ``partners``.

    ``partners`` is a list of ``(new name, word over chain)`` pairs, or bare
    generator names (the copy is then named with a prime suffix).
    """
    if not chain.generators:
        raise SeriesGroupError("chain is empty")
    partners = _normalize_partners(chain, partners)
    if not partners:
        raise SeriesGroupError("free product needs at least one partner generator")
    _check_new_names(chain, [n for n, _ in partners])
    for name, w in partners:
        if eval_word(chain, w).is_identity():
            raise TrivialElementError(f"partner generator {name} <- {w} is the identity")
    registry = chain.registry.copy()
    s, t = registry.fresh(), registry.fresh()
    rec = StepRecord(FREE_PRODUCT, (s.id, t.id), tuple(n for n, _ in partners), partners=partners)
    return _extend(chain, rec, registry)


def amalgam_step(chain: Chain, partners, u) -> Chain:
    """Amalgamate a conjugated copy of the partner subgroup over the centralizer of ``u``.

    The caller guarantees that ``u`` lies in the partner subgroup and that the
    centralizers of ``u`` in the chain group and in the partner agree; neither
    is checked.
    """
    u = Word.coerce(u).reduced()
    partners = _normalize_partners(chain, partners)
    _check_new_names(chain, [n for n, _ in partners])
    if eval_word(chain, u).is_identity():
        raise TrivialElementError(f"trivial amalgam element: {u}")
    registry = chain.registry.copy()
    s = registry.fresh()
    rec = StepRecord(AMALGAM, (s.id,), tuple(n for n, _ in partners), partners=partners, u=u)
    return _extend(chain, rec, registry)


def centralizer_extension_step(chain: Chain, u, new_name: str) -> Chain:
    """Adjoin ``T = u^s`` for a fresh symbol ``s``."""
    u = Word.coerce(u).reduced()
    _check_new_names(chain, [new_name])
    if eval_word(chain, u).is_identity():
        raise TrivialElementError(f"trivial centralizer element: {u}")
    registry = chain.registry.copy()
    s = registry.fresh()
    rec = StepRecord(CENTRALIZER_EXT, (s.id,), (new_name,), u=u)
    return _extend(chain, rec, registry)


def eval_word(chain: Chain, w) -> Series:
    """Product of generator powers under the series group law."""
    w = Word.coerce(w).reduced()
    result = identity(chain.order)
    for name, e in w.letters:
        result = compose(result, chain.power(name, e))
    return result


# -- certificates -----------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """Finite-truncation evidence that a word is not the identity.

    ``Nontrivial`` is a proof (a coefficient that is a nonzero polynomial, or
    nonzero at a rational point); ``Inconclusive`` proves nothing.
    """

    verdict: str
    word: Word
    mode: str
    order_used: int
    witness_index: int | None = None
    witness_coefficient: FieldElem | None = None
    sample_point: Mapping[int, object] | None = None
    resamples: int = 0
    note: str = ""

    @property
    def nontrivial(self) -> bool:
        return self.verdict == NONTRIVIAL

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "word": str(self.word),
            "mode": self.mode,
            "order_used": self.order_used,
            "witness_index": self.witness_index,
            "witness_coefficient": (
                self.witness_coefficient.to_json() if self.witness_coefficient is not None else None
            ),
        }
        if self.sample_point is not None:
            out["sample_point"] = {f"s{k}": format_rational(v) for k, v in self.sample_point.items()}
            out["resamples"] = self.resamples
        if self.note:
            out["note"] = self.note
        return out


def _first_nonzero(f: Series) -> int | None:
    for i, c in enumerate(f.coeffs, start=1):
        if c:
            return i
    return None


def _ladder(order: int, start: int = 4) -> list[int]:
    """Truncation orders tried inside one chain order: start, 2*start, ..., order."""
    out = []
    m = min(start, order)
    while m < order:
        out.append(m)
        m *= 2
    out.append(order)
    return out


class CertificateEngine:
    """Certifies many words against one chain, sharing rebuilt chains and power caches.

    Sampled points depend only on ``(seed, order, attempt)``, so a batch gives
    the same certificates as certifying each word alone.
    """

    def __init__(self, chain: Chain, n_max: int | None = None, mode: str = "symbolic",
                 seed: int = 0, resamples: int = 1):
        if mode not in ("symbolic", "sampled"):
            raise SeriesGroupError(f"unknown certificate mode {mode!r}")
        self.chain = chain
        self.n_max = max(chain.order, n_max or chain.order)
        self.mode = mode
        self.seed = seed
        self.resamples = resamples
        self._chains: dict[int, Chain] = {chain.order: chain}
        self._views: dict[tuple, Chain] = {}

    def orders(self) -> list[int]:
        out = [self.chain.order]
        while out[-1] < self.n_max:
            out.append(min(2 * out[-1], self.n_max))
        return out

    def _chain_at(self, order: int) -> Chain:
        c = self._chains.get(order)
        if c is None:
            c = self._chains[order] = self.chain.rebuild(order)
        return c

    def point(self, order: int, attempt: int) -> dict:
        rng = random.Random(f"{self.seed}:{order}:{attempt}")
        return random_point([s.id for s in self.chain.registry], rng)

    def _view(self, order: int, attempt: int | None, m: int) -> Chain:
        key = (order, attempt, m)
        v = self._views.get(key)
        if v is None:
            if attempt is None:
                v = self._chain_at(order).truncated(m)
            else:
                full = self._view(order, attempt, order) if m != order else None
                if full is not None:
                    v = full.truncated(m)
                elif order in self._chains:
                    v = self._chains[order].specialized(self.point(order, attempt))
                else:
                    v = replay(self.chain.steps, order, self.point(order, attempt))
            self._views[key] = v
        return v

    def certify(self, w) -> Certificate:
        word = Word.coerce(w).reduced()
        if word.is_empty():
            return Certificate(INCONCLUSIVE, word, self.mode, self.chain.order,
                               note="reduced word is empty (trivial input)")
        for g in word.generators():
            self.chain.generator(g)
        note = ""
        if self.chain.is_relator_conjugate(word):
            note = "trivial by construction: conjugate of a recorded relator"
        attempts = [None] if self.mode == "symbolic" else list(range(1 + self.resamples))
        last_order = self.chain.order
        for order in self.orders():
            last_order = order
            for attempt in attempts:
                try:
                    for m in _ladder(order):
                        value = eval_word(self._view(order, attempt, m), word)
                        idx = _first_nonzero(value)
                        if idx is not None:
                            point = None if attempt is None else self.point(order, attempt)
                            return Certificate(
                                NONTRIVIAL, word, self.mode, m, idx, value[idx],
                                sample_point=point, resamples=attempt or 0, note=note,
                            )
                except BlowupError as exc:
                    raise BlowupError(f"{exc} (certifying {word} at order {order})") from exc
        return Certificate(INCONCLUSIVE, word, self.mode, last_order,
                           note=note or "all coefficients vanish up to the maximal order")


def nontrivial_certificate(chain: Chain, w, n_max: int | None = None, mode: str = "symbolic",
                           seed: int = 0, resamples: int = 1) -> Certificate:
    """Search for a coefficient proving ``w != 1``, doubling the order up to ``n_max``."""
    return CertificateEngine(chain, n_max, mode, seed, resamples).certify(w)


# -- built-in constructions -------------------------------------------------

def free_pair(N: int, names: tuple[str, str] = ("X", "Y")) -> Chain:
    """``X = exp(e1)`` and its free-product copy ``Y``: a free group of rank two."""
    x, y = names
    base = one_param_base(N, VectorField.basis(1, N), x)
    return free_product_step(base, [(y, Word.gen(x))])


def surface_group(k: int, N: int) -> Chain:
    """Chain presenting the orientable surface group of genus ``2k``.

    Builds ``F_2k`` from ``exp(e1)`` by ``2k - 1`` free products, then
    amalgamates a primed copy over the centralizer of ``u = [a1,b1]...[ak,bk]``,
    giving ``< a, b, a', b' | prod [ai,bi] = prod [ai',bi'] >``.
    """
    if k < 1:
        raise SeriesGroupError("surface_group needs k >= 1 (genus 2k)")
    if k == 1:
        pairs = [("A", "B")]
    else:
        pairs = [(f"A{i}", f"B{i}") for i in range(1, k + 1)]
    names = [n for pair in pairs for n in pair]
    chain = one_param_base(N, VectorField.basis(1, N), names[0])
    for name in names[1:]:
        chain = free_product_step(chain, [(name, Word.gen(names[0]))])
    u = Word()
    for a, b in pairs:
        u = u * Word.commutator(Word.gen(a), Word.gen(b))
    chain = amalgam_step(chain, [(n + "'", Word.gen(n)) for n in names], u)
    relator = u * u.rename({n: n + "'" for n in names}).inverse()
    if not eval_word(chain, relator).is_identity():
        raise ConsistencyError("surface relator does not evaluate to the identity")
    return chain
