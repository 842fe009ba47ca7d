"""Cellular automata on groups acting on partial configurations.

Besides the classical global map on full configurations, two extensions to
partial configurations are provided:

* ``coarse_apply`` only fires the rule at cells whose whole neighborhood is
  defined (support = interior of the support);
* ``fine_apply`` fires wherever the output is already forced by the defined
  part of the neighborhood, whatever the missing cells hold.

Rule tuples follow the declared neighborhood order: position i of the tuple
holds the state at offset N[i], i.e. at cell g.N[i] when evaluating at g.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .config import EMPTY, ConfigError, PartialConfig, StateSet, restrict
from .group import (
    ElementSet,
    GroupElement,
    GroupSpec,
    NotFiniteError,
    compose,
    enumerate_elements,
    inverse,
    translate_set,
)

__all__ = [
    "AutomatonError",
    "RuleTable",
    "Automaton",
    "LocElem",
    "SubElem",
]


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True)
class RuleTable:
    """Total lookup table Q^|N| -> Q.

    `kind` and `params` remember how the table was built so it can be
    written back in the same form.
    """

    table: Mapping[tuple[str, ...], str]
    kind: str = "table"
    params: tuple = ()

    @classmethod
    def from_entries(cls, entries: Mapping[Sequence[str], str] | Iterable[tuple[Sequence[str], str]]) -> RuleTable:
        items = entries.items() if isinstance(entries, Mapping) else entries
        table: dict[tuple[str, ...], str] = {}
        for key, out in items:
            key = tuple(str(s) for s in key)
            if key in table:
                raise AutomatonError(f"rule entry {key} given twice")
            table[key] = str(out)
        return cls(table)

    @classmethod
    def from_function(cls, fn: Callable[..., str], states: Sequence[str], arity: int) -> RuleTable:
        return cls({t: fn(*t) for t in itertools.product(states, repeat=arity)})

    @classmethod
    def constant(cls, value: str, states: Sequence[str], arity: int) -> RuleTable:
        value = str(value)
        return cls({t: value for t in itertools.product(states, repeat=arity)}, "constant", (value,))

    @classmethod
    def eca(cls, number: int) -> RuleTable:
        """Wolfram numbering over states "0","1" and neighborhood (-1, 0, 1)."""
        if not 0 <= number <= 255:
            raise AutomatonError(f"elementary rule number {number} outside 0..255")
        table = {}
        for l, c, r in itertools.product((0, 1), repeat=3):
            table[(str(l), str(c), str(r))] = str((number >> (4 * l + 2 * c + r)) & 1)
        return cls(table, "eca", (number,))

    def __hash__(self):
        return hash((frozenset(self.table.items()), self.kind, self.params))


@dataclass(frozen=True)
class LocElem:
    """A full local pattern centred at `center`: support is exactly center.N."""

    center: GroupElement
    pattern: PartialConfig
    neighborhood: ElementSet = field(repr=False)

    def __post_init__(self):
        if self.pattern.support != translate_set(self.center, self.neighborhood):
            raise AutomatonError(f"pattern {self.pattern} does not cover the neighborhood of {self.center!r}")

    def __repr__(self):
        return f"Loc({self.center!r}, {self.pattern!r})"


@dataclass(frozen=True)
class SubElem:
    """A sub-local pattern: centre g, mask M of N, pattern with support g.M."""

    center: GroupElement
    mask: ElementSet
    pattern: PartialConfig

    def __post_init__(self):
        if self.pattern.support != translate_set(self.center, self.mask):
            raise AutomatonError(f"pattern {self.pattern} does not match mask {sorted(self.mask)} at {self.center!r}")

    def __repr__(self):
        return f"Sub({self.center!r}, {self.pattern!r})"


def sub_leq(a: SubElem, b: SubElem) -> bool:
    return a.center == b.center and a.pattern <= b.pattern


@dataclass(frozen=True)
class Automaton:
    group: GroupSpec
    states: StateSet
    neighborhood: tuple[GroupElement, ...]
    rule: RuleTable

    def __post_init__(self):
        object.__setattr__(self, "states", StateSet(self.states))
        nbhd = tuple(self.neighborhood)
        if not nbhd:
            raise AutomatonError("neighborhood must be non-empty")
        for n in nbhd:
            if n.spec != self.group:
                raise AutomatonError(f"neighborhood offset {n!r} is not in {self.group}")
        if len(set(nbhd)) != len(nbhd):
            raise AutomatonError(f"neighborhood {nbhd} has repeated offsets")
        object.__setattr__(self, "neighborhood", nbhd)
        arity = len(nbhd)
        qs = set(self.states)
        for key, out in self.rule.table.items():
            if len(key) != arity:
                raise AutomatonError(f"rule entry {key} has arity {len(key)}, neighborhood has {arity}")
            if not set(key) <= qs or out not in qs:
                raise AutomatonError(f"rule entry {key} -> {out} uses an unknown state")
        missing = len(self.states) ** arity - len(self.rule.table)
        if missing:
            raise AutomatonError(f"rule table is not total: {missing} local configurations missing")

    @property
    def offsets(self) -> ElementSet:
        return frozenset(self.neighborhood)

    # -- local and global maps ----------------------------------------------

    def local_apply(self, local: Sequence[str]) -> str:
        local = tuple(local)
        if len(local) != len(self.neighborhood):
            raise AutomatonError(f"expected {len(self.neighborhood)} states, got {len(local)}")
        try:
            return self.rule.table[local]
        except KeyError:
            raise AutomatonError(f"unknown state in {local}") from None

    def _read(self, c: PartialConfig, g: GroupElement) -> tuple[str, ...]:
        return tuple(c[compose(g, n)] for n in self.neighborhood)

    def global_apply(self, c: PartialConfig) -> PartialConfig:
        if not self.group.is_finite:
            raise NotFiniteError("global_apply needs a finite group; use coarse_apply or fine_apply")
        cells = enumerate_elements(self.group)
        if len(c) != len(cells):
            raise ConfigError("global_apply needs a full-support configuration")
        return PartialConfig({g: self.rule.table[self._read(c, g)] for g in cells})

    def neighborhood_of(self, g: GroupElement) -> ElementSet:
        return translate_set(g, self.neighborhood)

    def interior(self, S: Iterable[GroupElement]) -> ElementSet:
        """Cells whose whole neighborhood lies in S.

        Any such g has g.n in S for every n, so g ranges over S.N^-1.
        """
        S = frozenset(S)
        inv = [inverse(n) for n in self.neighborhood]
        candidates = {compose(s, ni) for s in S for ni in inv}
        return frozenset(g for g in candidates if all(compose(g, n) in S for n in self.neighborhood))

    def coarse_apply(self, c: PartialConfig) -> PartialConfig:
        table = self.rule.table
        return PartialConfig({g: table[self._read(c, g)] for g in self.interior(c.support)})

    def neighborhood_restrict(self, c: PartialConfig, g: GroupElement) -> PartialConfig:
        return restrict(c, self.neighborhood_of(g))

    def determined_at(self, c: PartialConfig, g: GroupElement) -> str | None:
        """The forced output at g, or None if completions of c_g disagree."""
        known = []
        free = []
        for i, n in enumerate(self.neighborhood):
            q = c.get(compose(g, n))
            known.append(q)
            if q is None:
                free.append(i)
        table = self.rule.table
        seen = None
        for fill in itertools.product(self.states, repeat=len(free)):
            local = list(known)
            for i, q in zip(free, fill):
                local[i] = q
            out = table[tuple(local)]
            if seen is None:
                seen = out
            elif out != seen:
                return None
        return seen

    def fine_apply(self, c: PartialConfig, window: Iterable[GroupElement]) -> PartialConfig:
        out = {}
        for g in window:
            q = self.determined_at(c, g)
            if q is not None:
                out[g] = q
        return PartialConfig(out)

    def determined_set(self, c: PartialConfig, window: Iterable[GroupElement]) -> ElementSet:
        return self.fine_apply(c, window).support

    def background_determined(self) -> str | None:
        outputs = set(self.rule.table.values())
        return outputs.pop() if len(outputs) == 1 else None

    # -- centred local and sub-local patterns ----------------------------------

    def loc(self, g: GroupElement, pattern: PartialConfig) -> LocElem:
        return LocElem(g, pattern, self.offsets)

    def sub(self, g: GroupElement, pattern: PartialConfig) -> SubElem:
        """Sub element at g; the mask is recovered from the pattern's support."""
        gi = inverse(g)
        mask = frozenset(compose(gi, p) for p in pattern.support)
        if not mask <= self.offsets:
            raise AutomatonError(f"pattern {pattern} is not inside the neighborhood of {g!r}")
        return SubElem(g, mask, pattern)

    def loc_to_sub(self, e: LocElem) -> SubElem:
        return SubElem(e.center, self.offsets, e.pattern)

    def delta_bar(self, e: LocElem) -> PartialConfig:
        return PartialConfig({e.center: self.rule.table[self._read(e.pattern, e.center)]})

    def delta_under(self, e: SubElem) -> PartialConfig:
        q = self.determined_at(e.pattern, e.center)
        return EMPTY if q is None else PartialConfig({e.center: q})

    def loc_elements(self) -> list[LocElem]:
        out = []
        for g in enumerate_elements(self.group):
            cells = [compose(g, n) for n in self.neighborhood]
            for combo in itertools.product(self.states, repeat=len(cells)):
                out.append(LocElem(g, PartialConfig(zip(cells, combo)), self.offsets))
        return out

    def sub_elements(self) -> list[SubElem]:
        out = []
        nbhd = sorted(self.neighborhood)
        for g in enumerate_elements(self.group):
            for k in range(len(nbhd) + 1):
                for mask in itertools.combinations(nbhd, k):
                    cells = [compose(g, n) for n in mask]
                    for combo in itertools.product(self.states, repeat=k):
                        out.append(SubElem(g, frozenset(mask), PartialConfig(zip(cells, combo))))
        return out

    # -- neighborhood map g -> g.N ---------------------------------------------

    def neighborhood_collision(self) -> GroupElement | None:
        """A non-identity d with d.N = N, if one exists.

        g.N = h.N iff (g^-1 h).N = N, so g -> g.N is injective iff no such d
        exists. Any such d satisfies d.n0 in N, hence d is in N.n0^-1: a
        finite search, exact for every supported group.
        """
        n0 = self.neighborhood[0]
        n0i = inverse(n0)
        ident = self.group.identity
        nset = self.offsets
        for n in self.neighborhood:
            d = compose(n, n0i)
            if d != ident and translate_set(d, nset) == nset:
                return d
        return None

    def neighborhood_injective(self) -> bool:
        if all(m == 0 for m in self.group.moduli):
            # translations of Z^d act freely
            return True
        return self.neighborhood_collision() is None
