"""Finitely generated abelian groups Z^a x Z/m1 x ... x Z/mk.

A group is described by a moduli vector: 0 stands for an infinite cyclic
factor, m >= 2 for Z/mZ. Elements are kept in reduced form so that
structural equality is group equality.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "GroupError",
    "SpecMismatchError",
    "NotFiniteError",
    "GroupSpec",
    "GroupElement",
    "ElementSet",
    "compose",
    "inverse",
    "enumerate_elements",
    "translate_set",
    "set_product",
    "element_set",
]


class GroupError(ValueError):
    pass


class SpecMismatchError(GroupError):
    pass


class NotFiniteError(GroupError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    moduli: tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        for m in moduli:
            if m < 0 or m == 1:
                raise GroupError(f"invalid modulus {m}: use 0 for Z or m >= 2 for Z/mZ")
        object.__setattr__(self, "moduli", moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def is_finite(self) -> bool:
        return all(m >= 2 for m in self.moduli)

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise NotFiniteError(f"group {self} is infinite")
        n = 1
        for m in self.moduli:
            n *= m
        return n

    @property
    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.rank)

    def element(self, *coords: int | Sequence[int]) -> GroupElement:
        """Build a reduced element; accepts `spec.element(1, 0)` or `spec.element([1, 0])`."""
        if len(coords) == 1 and not isinstance(coords[0], int):
            coords = tuple(coords[0])
        return GroupElement(self, tuple(coords))

    def elements(self, coords: Iterable[Sequence[int] | int]) -> ElementSet:
        return frozenset(self.element(c) for c in coords)

    def __str__(self):
        parts = ["Z" if m == 0 else f"Z/{m}" for m in self.moduli]
        return " x ".join(parts) if parts else "1"


@dataclass(frozen=True)
class GroupElement:
    spec: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.spec.rank:
            raise SpecMismatchError(
                f"element {self.coords} has {len(self.coords)} coordinates, group {self.spec} needs {self.spec.rank}"
            )
        reduced = tuple(int(x) % m if m else int(x) for x, m in zip(self.coords, self.spec.moduli))
        object.__setattr__(self, "coords", reduced)

    def __mul__(self, other: GroupElement) -> GroupElement:
        return compose(self, other)

    def __lt__(self, other: GroupElement) -> bool:
        return self.coords < other.coords

    def __le__(self, other: GroupElement) -> bool:
        return self.coords <= other.coords

    def __repr__(self):
        if self.spec.rank == 1:
            return str(self.coords[0])
        return "(" + ",".join(map(str, self.coords)) + ")"


# A finite set of elements. Iterate with sorted() for the canonical order.
ElementSet = frozenset


def _check_same(g: GroupElement, h: GroupElement) -> None:
    if g.spec != h.spec:
        raise SpecMismatchError(f"elements of {g.spec} and {h.spec} cannot be combined")


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    _check_same(g, h)
    return GroupElement(g.spec, tuple(a + b for a, b in zip(g.coords, h.coords)))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.spec, tuple(-a for a in g.coords))


def enumerate_elements(spec: GroupSpec) -> list[GroupElement]:
    """All elements of a finite group in lexicographic coordinate order."""
    if not spec.is_finite:
        raise NotFiniteError(f"cannot enumerate infinite group {spec}")
    return [GroupElement(spec, c) for c in itertools.product(*(range(m) for m in spec.moduli))]


def translate_set(g: GroupElement, S: Iterable[GroupElement]) -> ElementSet:
    return frozenset(compose(g, s) for s in S)


def set_product(S: Iterable[GroupElement], T: Iterable[GroupElement]) -> ElementSet:
    T = list(T)
    return frozenset(compose(s, t) for s in S for t in T)


def element_set(elements: Iterable[GroupElement]) -> ElementSet:
    return frozenset(elements)
