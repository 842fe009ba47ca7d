"""Partial configurations: finite-support maps from group elements to states.

Configurations are ordered by extension (c <= c' when c' agrees with c on
the support of c). Under that order the empty configuration is the bottom,
compatible families have joins, and non-empty families have meets.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping, Sequence

from .group import ElementSet, GroupElement, compose, inverse

__all__ = [
    "ConfigError",
    "IncompatibleError",
    "StateSet",
    "PartialConfig",
    "EMPTY",
    "restrict",
    "shift",
    "leq",
    "meet",
    "join",
    "enumerate_configs",
    "completions",
]


class ConfigError(ValueError):
    pass


class IncompatibleError(ConfigError):
    """Raised when a family has no upper bound; `position` is a conflicting cell."""

    def __init__(self, position: GroupElement, states: tuple[str, str]):
        super().__init__(f"configurations disagree at {position!r}: {states[0]!r} vs {states[1]!r}")
        self.position = position
        self.states = states


class StateSet(tuple):
    """Ordered, non-empty tuple of distinct state symbols."""

    def __new__(cls, states: Iterable[str]):
        states = tuple(str(s) for s in states)
        if not states:
            raise ConfigError("state set must be non-empty")
        if len(set(states)) != len(states):
            raise ConfigError(f"duplicate states in {states}")
        return super().__new__(cls, states)


class PartialConfig(Mapping):
    """Immutable finite partial function G -> Q.

    Behaves as a read-only mapping; iteration follows the canonical
    position order.
    """

    __slots__ = ("_entries", "_hash")

    def __init__(self, entries: Mapping[GroupElement, str] | Iterable[tuple[GroupElement, str]] = ()):
        if isinstance(entries, Mapping):
            items = entries.items()
        else:
            items = list(entries)
        d: dict[GroupElement, str] = {}
        for pos, state in items:
            if pos in d and d[pos] != state:
                raise ConfigError(f"position {pos!r} given twice")
            d[pos] = state
        self._entries = d
        self._hash = None

    def __getitem__(self, pos: GroupElement) -> str:
        return self._entries[pos]

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(sorted(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, pos) -> bool:
        return pos in self._entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._entries.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, PartialConfig):
            return self._entries == other._entries
        return NotImplemented

    @property
    def support(self) -> ElementSet:
        return frozenset(self._entries)

    def sorted_items(self) -> list[tuple[GroupElement, str]]:
        return sorted(self._entries.items())

    def __le__(self, other: PartialConfig) -> bool:
        return leq(self, other)

    def __repr__(self):
        body = ", ".join(f"{p!r}:{s}" for p, s in self.sorted_items())
        return "{" + body + "}"


EMPTY = PartialConfig()


def restrict(c: PartialConfig, S: Iterable[GroupElement]) -> PartialConfig:
    return PartialConfig({g: c[g] for g in S if g in c})


def shift(c: PartialConfig, g: GroupElement) -> PartialConfig:
    """The right shift action: (c < g)(h) = c(g.h), so support is g^-1 . |c|."""
    gi = inverse(g)
    return PartialConfig({compose(gi, s): q for s, q in c.items()})


def leq(c: PartialConfig, c2: PartialConfig) -> bool:
    if len(c) > len(c2):
        return False
    e2 = c2._entries
    for g, q in c._entries.items():
        if e2.get(g) != q:
            return False
    return True


def meet(family: Sequence[PartialConfig]) -> PartialConfig:
    """Greatest lower bound: the cells where every member agrees."""
    family = list(family)
    if not family:
        raise ConfigError("meet of an empty family does not exist")
    first, rest = family[0], family[1:]
    out = {}
    for g, q in first._entries.items():
        if all(c._entries.get(g) == q for c in rest):
            out[g] = q
    return PartialConfig(out)


def join(family: Iterable[PartialConfig]) -> PartialConfig:
    """Least upper bound of a pairwise compatible family (empty family gives EMPTY)."""
    out: dict[GroupElement, str] = {}
    for c in family:
        for g, q in c._entries.items():
            prev = out.setdefault(g, q)
            if prev != q:
                raise IncompatibleError(g, (prev, q))
    return PartialConfig(out)


def compatible(c: PartialConfig, c2: PartialConfig) -> bool:
    small, big = (c, c2) if len(c) <= len(c2) else (c2, c)
    return all(big._entries.get(g, q) == q for g, q in small._entries.items())


def enumerate_configs(window: Iterable[GroupElement], Q: Sequence[str]) -> list[PartialConfig]:
    """Every configuration with support inside `window`, (|Q|+1)^|window| of them.

    Order: lexicographic over positions (canonical order), undefined first,
    then states in the order of Q.
    """
    positions = sorted(set(window))
    choices = (None, *Q)
    out = []
    for combo in itertools.product(choices, repeat=len(positions)):
        out.append(PartialConfig({p: q for p, q in zip(positions, combo) if q is not None}))
    return out


def completions(c: PartialConfig, S: Iterable[GroupElement], Q: Sequence[str]) -> list[PartialConfig]:
    S = frozenset(S)
    if not c.support <= S:
        raise ConfigError(f"support {sorted(c.support)} is not inside {sorted(S)}")
    free = sorted(S - c.support)
    base = dict(c._entries)
    out = []
    for combo in itertools.product(Q, repeat=len(free)):
        d = dict(base)
        d.update(zip(free, combo))
        out.append(PartialConfig(d))
    return out
