"""Finite posets, monotone maps and Kan extensions between them.

Everything here is explicit: posets are element lists with a materialized
order relation, monotone maps are lookup tables. A Kan extension claim is
checked three ways:

1. the extension inequality (f => h.i for left, h.i => f for right);
2. agreement with the pointwise formula (join over the elements mapped
   below b, or meet over those mapped above b);
3. optionally, extremality against every monotone map satisfying the
   inequality, found by a budgeted backtracking search.

`build_ca_kan_problems` materializes the extension problems attached to a
cellular automaton on a finite group.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Sequence

from . import config as cfg
from .automaton import Automaton, LocElem, SubElem, sub_leq
from .config import PartialConfig
from .group import GroupElement, NotFiniteError, enumerate_elements

__all__ = [
    "KanError",
    "PosetError",
    "MonotonicityError",
    "NoBoundError",
    "BudgetExceeded",
    "FinitePoset",
    "MonotoneMap",
    "KanProblem",
    "KanVerdict",
    "Enumeration",
    "two_cell_leq",
    "pointwise_left_kan",
    "pointwise_right_kan",
    "iter_monotone_maps",
    "enumerate_monotone_maps",
    "verify_kan",
    "CAInstance",
    "ca_instance",
    "build_ca_kan_problems",
    "sandwich_check",
]


class KanError(ValueError):
    pass


class PosetError(KanError):
    def __init__(self, message: str, witness: tuple):
        super().__init__(message)
        self.witness = witness


class MonotonicityError(KanError):
    def __init__(self, x, x2, fx, fx2):
        super().__init__(f"not monotone: {x!r} <= {x2!r} but {fx!r} is not <= {fx2!r}")
        self.witness = (x, x2, fx, fx2)


class NoBoundError(KanError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(Exception):
    """Raised by `iter_monotone_maps` once the visit budget is spent."""

    def __init__(self, visited: int):
        super().__init__(f"budget exhausted after {visited} partial assignments")
        self.visited = visited


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinitePoset:
    """A finite set with a partial order, stored as up-set bitmasks.

    `leq` is either a predicate or an explicit set of (x, y) pairs. `join`
    and `meet` may be supplied as oracles on families of elements; without
    them bounds are found from the relation table.
    """

    def __init__(
        self,
        elements: Iterable[Hashable],
        leq: Callable[[Any, Any], bool] | Iterable[tuple[Any, Any]],
        *,
        name: str = "",
        join: Callable[[list], Any] | None = None,
        meet: Callable[[list], Any] | None = None,
        validate: bool = True,
    ):
        self.elements = tuple(elements)
        self.name = name
        self.index = {x: k for k, x in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise KanError(f"poset {name!r} has repeated elements")
        n = len(self.elements)
        if callable(leq):
            rel = leq
            up = [sum(1 << j for j in range(n) if rel(self.elements[i], self.elements[j])) for i in range(n)]
        else:
            up = [0] * n
            for x, y in leq:
                up[self.index[x]] |= 1 << self.index[y]
        self.up = up
        down = [0] * n
        for i in range(n):
            for j in _bits(up[i]):
                down[j] |= 1 << i
        self.down = down
        self._join = join
        self._meet = meet
        if validate:
            self._validate()

    def _validate(self) -> None:
        E = self.elements
        for i in range(len(E)):
            if not self.up[i] >> i & 1:
                raise PosetError(f"not reflexive at {E[i]!r}", (E[i],))
        for i in range(len(E)):
            for j in _bits(self.up[i]):
                if j != i and self.up[j] >> i & 1:
                    raise PosetError(f"not antisymmetric: {E[i]!r}, {E[j]!r}", (E[i], E[j]))
                missing = self.up[j] & ~self.up[i]
                if missing:
                    k = next(_bits(missing))
                    raise PosetError(
                        f"not transitive: {E[i]!r} <= {E[j]!r} <= {E[k]!r}", (E[i], E[j], E[k])
                    )

    @classmethod
    def discrete(cls, elements: Iterable[Hashable], name: str = "") -> FinitePoset:
        return cls(elements, lambda x, y: x == y, name=name)

    @classmethod
    def chain(cls, n: int) -> FinitePoset:
        return cls(range(n), lambda x, y: x <= y, name=f"chain{n}")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __repr__(self):
        return f"FinitePoset({self.name or '?'}, {len(self)} elements)"

    def leq(self, x, y) -> bool:
        return bool(self.up[self.index[x]] >> self.index[y] & 1)

    def leq_idx(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def dual(self) -> FinitePoset:
        return FinitePoset(
            self.elements,
            [(self.elements[j], self.elements[i]) for i in range(len(self)) for j in _bits(self.up[i])],
            name=f"{self.name}^op",
            join=self._meet,
            meet=self._join,
            validate=False,
        )

    def linear_extension(self) -> list[int]:
        """Indices ordered so that every element comes after all elements below it."""
        # |down set| strictly grows along strict order, so sorting by it is a linear extension
        return sorted(range(len(self)), key=lambda i: (bin(self.down[i]).count("1"), i))

    def _lub_idx(self, idxs: Sequence[int]) -> int:
        upper = (1 << len(self)) - 1
        for i in idxs:
            upper &= self.up[i]
        for u in _bits(upper):
            if upper & ~self.up[u] == 0:
                return u
        raise NoBoundError(
            f"no least upper bound in {self.name or 'poset'}", tuple(self.elements[i] for i in idxs)
        )

    def _glb_idx(self, idxs: Sequence[int]) -> int:
        lower = (1 << len(self)) - 1
        for i in idxs:
            lower &= self.down[i]
        for u in _bits(lower):
            if lower & ~self.down[u] == 0:
                return u
        raise NoBoundError(
            f"no greatest lower bound in {self.name or 'poset'}", tuple(self.elements[i] for i in idxs)
        )

    def join(self, family: Iterable) -> Any:
        family = list(family)
        if self._join is not None:
            try:
                return self._join(family)
            except cfg.IncompatibleError as exc:
                raise NoBoundError(str(exc), (exc.position, exc.states)) from exc
        return self.elements[self._lub_idx([self.index[x] for x in family])]

    def meet(self, family: Iterable) -> Any:
        family = list(family)
        if self._meet is not None:
            if not family:
                raise NoBoundError(f"empty meet in {self.name or 'poset'}")
            return self._meet(family)
        return self.elements[self._glb_idx([self.index[x] for x in family])]

    def join_table(self, family: Iterable) -> Any:
        """Join computed from the relation table only, ignoring any oracle."""
        return self.elements[self._lub_idx([self.index[x] for x in family])]

    def meet_table(self, family: Iterable) -> Any:
        return self.elements[self._glb_idx([self.index[x] for x in family])]


class MonotoneMap:
    """A monotone function between finite posets, given by its table."""

    def __init__(self, domain: FinitePoset, codomain: FinitePoset, table, *, name: str = "", check: bool = True):
        self.domain = domain
        self.codomain = codomain
        self.name = name
        if callable(table):
            fn = table
            table = {x: fn(x) for x in domain.elements}
        idx = []
        for x in domain.elements:
            if x not in table:
                raise KanError(f"map {name!r} undefined at {x!r}")
            y = table[x]
            if y not in codomain.index:
                raise KanError(f"map {name!r} sends {x!r} to {y!r}, outside {codomain.name or 'codomain'}")
            idx.append(codomain.index[y])
        self.idx = tuple(idx)
        if check:
            self._check_monotone()

    @classmethod
    def from_indices(cls, domain, codomain, idx: Sequence[int], name: str = "") -> MonotoneMap:
        m = cls.__new__(cls)
        m.domain, m.codomain, m.name, m.idx = domain, codomain, name, tuple(idx)
        return m

    def _check_monotone(self) -> None:
        D, C = self.domain, self.codomain
        for i in range(len(D)):
            for j in _bits(D.up[i]):
                if not C.leq_idx(self.idx[i], self.idx[j]):
                    raise MonotonicityError(
                        D.elements[i], D.elements[j], C.elements[self.idx[i]], C.elements[self.idx[j]]
                    )

    def __call__(self, x):
        return self.codomain.elements[self.idx[self.domain.index[x]]]

    def table(self) -> dict:
        return {x: self.codomain.elements[k] for x, k in zip(self.domain.elements, self.idx)}

    def after(self, inner: MonotoneMap) -> MonotoneMap:
        """self . inner"""
        if inner.codomain is not self.domain:
            raise KanError("composition of maps with mismatched posets")
        return MonotoneMap.from_indices(
            inner.domain,
            self.codomain,
            [self.idx[k] for k in inner.idx],
            name=f"{self.name}.{inner.name}",
        )

    def __eq__(self, other):
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return self.domain is other.domain and self.codomain is other.codomain and self.idx == other.idx

    def __hash__(self):
        return hash(self.idx)

    def __repr__(self):
        return f"MonotoneMap({self.name or '?'}: {self.domain.name} -> {self.codomain.name})"


def _same_shape(f: MonotoneMap, g: MonotoneMap) -> None:
    if f.domain is not g.domain or f.codomain is not g.codomain:
        raise KanError(f"cannot compare {f!r} and {g!r}: different posets")


def two_cell_leq(f: MonotoneMap, g: MonotoneMap) -> bool:
    """f => g: pointwise comparison in the codomain."""
    _same_shape(f, g)
    C = f.codomain
    return all(C.leq_idx(a, b) for a, b in zip(f.idx, g.idx))


def two_cell_witness(f: MonotoneMap, g: MonotoneMap):
    """First domain element where f(x) <= g(x) fails, or None."""
    _same_shape(f, g)
    C = f.codomain
    for k, (a, b) in enumerate(zip(f.idx, g.idx)):
        if not C.leq_idx(a, b):
            return f.domain.elements[k]
    return None


def pointwise_left_kan(f: MonotoneMap, i: MonotoneMap, b) -> Any:
    """join { f(a) : i(a) <= b }"""
    if f.domain is not i.domain:
        raise KanError("f and i must share their domain")
    B = i.codomain
    family = [f.codomain.elements[fk] for ik, fk in zip(i.idx, f.idx) if B.leq_idx(ik, B.index[b])]
    return f.codomain.join(family)


def pointwise_right_kan(f: MonotoneMap, i: MonotoneMap, b) -> Any:
    """meet { f(a) : b <= i(a) }"""
    if f.domain is not i.domain:
        raise KanError("f and i must share their domain")
    B = i.codomain
    family = [f.codomain.elements[fk] for ik, fk in zip(i.idx, f.idx) if B.leq_idx(B.index[b], ik)]
    if not family:
        raise NoBoundError(f"no element of {f.domain.name} is mapped above {b!r}", (b,))
    return f.codomain.meet(family)


# -- exhaustive search ---------------------------------------------------------


def iter_monotone_maps(
    domain: FinitePoset,
    codomain: FinitePoset,
    constraint: Callable[[Any, Any], bool] | None = None,
    budget: int | None = None,
    stats: dict | None = None,
) -> Iterator[tuple[int, ...]]:
    """Yield index tables of all monotone maps satisfying a per-element constraint.

    `constraint(x, y)` says whether x may be sent to y. Elements are
    assigned along a linear extension; each tried value counts as one
    visited partial assignment. Raises BudgetExceeded when `budget` visits
    have been made without finishing. If given, `stats["visited"]` tracks
    the running count.
    """
    D, C = domain, codomain
    n, m = len(D), len(C)
    full = (1 << m) - 1
    allowed = []
    for x in D.elements:
        if constraint is None:
            allowed.append(full)
        else:
            allowed.append(sum(1 << k for k, y in enumerate(C.elements) if constraint(x, y)))
    if stats is None:
        stats = {}
    stats["visited"] = 0
    dom = _arc_consistent(D, C, allowed)
    if dom is None:
        return
    order = D.linear_extension()
    strict_up = [D.up[i] & ~(1 << i) for i in range(n)]
    assign = [0] * n
    visited = 0

    def rec(depth: int, dom: list[int]):
        nonlocal visited
        if depth == n:
            yield tuple(assign)
            return
        i = order[depth]
        above = list(_bits(strict_up[i]))
        for v in _bits(dom[i]):
            visited += 1
            if budget is not None and visited > budget:
                raise BudgetExceeded(visited - 1)
            stats["visited"] = visited
            assign[i] = v
            # forward check: everything above x must stay above v
            nxt = list(dom)
            nxt[i] = 1 << v
            cup = C.up[v]
            for y in above:
                nxt[y] &= cup
                if not nxt[y]:
                    break
            else:
                yield from rec(depth + 1, nxt)

    yield from rec(0, dom)


def _arc_consistent(D: FinitePoset, C: FinitePoset, dom: list[int]) -> list[int] | None:
    """Prune values with no support along any order constraint x <= y.

    A value v for x needs some w >= v in dom[y] for each y above x, and
    symmetrically below. Returns None when some domain empties.
    """
    dom = list(dom)
    pairs = [(i, j) for i in range(len(D)) for j in _bits(D.up[i]) if j != i]
    changed = True
    while changed:
        changed = False
        for i, j in pairs:
            lo = 0
            for v in _bits(dom[i]):
                if C.up[v] & dom[j]:
                    lo |= 1 << v
            hi = 0
            for w in _bits(dom[j]):
                if C.down[w] & lo:
                    hi |= 1 << w
            if lo != dom[i] or hi != dom[j]:
                if not lo or not hi:
                    return None
                dom[i], dom[j] = lo, hi
                changed = True
    return dom


@dataclass
class Enumeration:
    maps: list[MonotoneMap]
    complete: bool
    visited: int = 0


def enumerate_monotone_maps(
    domain: FinitePoset,
    codomain: FinitePoset,
    constraint: Callable[[Any, Any], bool] | None = None,
    budget: int | None = None,
) -> Enumeration:
    """Collect all constrained monotone maps; `complete` is False if the budget ran out."""
    maps = []
    stats: dict = {}
    try:
        for idx in iter_monotone_maps(domain, codomain, constraint, budget, stats):
            maps.append(MonotoneMap.from_indices(domain, codomain, idx))
    except BudgetExceeded as exc:
        return Enumeration(maps, False, exc.visited)
    return Enumeration(maps, True, stats["visited"])


# -- Kan problems ----------------------------------------------------------------


@dataclass
class KanProblem:
    """Is `candidate` the left/right Kan extension of f along i?"""

    side: str
    i: MonotoneMap
    f: MonotoneMap
    candidate: MonotoneMap
    name: str = ""

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise KanError(f"side must be 'left' or 'right', not {self.side!r}")
        if self.i.domain is not self.f.domain:
            raise KanError(f"{self.name}: i and f must have the same domain")
        if self.candidate.domain is not self.i.codomain:
            raise KanError(f"{self.name}: candidate must be defined on the codomain of i")
        if self.candidate.codomain is not self.f.codomain:
            raise KanError(f"{self.name}: candidate and f must land in the same poset")

    def constraint(self) -> Callable[[Any, Any], bool]:
        """Per-element form of f => h.i (left) or h.i => f (right) on h."""
        A, B, C = self.i.domain, self.i.codomain, self.f.codomain
        bounds: dict[int, list[int]] = {}
        for ik, fk in zip(self.i.idx, self.f.idx):
            bounds.setdefault(ik, []).append(fk)
        left = self.side == "left"

        def ok(b, y) -> bool:
            yk = C.index[y]
            for fk in bounds.get(B.index[b], ()):
                if left and not C.leq_idx(fk, yk):
                    return False
                if not left and not C.leq_idx(yk, fk):
                    return False
            return True

        return ok

    def satisfies(self, h: MonotoneMap) -> bool:
        hi = h.after(self.i)
        return two_cell_leq(self.f, hi) if self.side == "left" else two_cell_leq(hi, self.f)


@dataclass
class KanVerdict:
    problem: str
    constraint_holds: bool
    pointwise_agrees: bool
    exhaustive_extremal: bool | str
    witness: str | None = None
    visited: int = 0
    maps_checked: int = 0
    elapsed_ms: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.constraint_holds and self.pointwise_agrees and self.exhaustive_extremal is not False

    def to_json(self) -> dict:
        ex = self.exhaustive_extremal
        return {
            "problem": self.problem,
            "constraint": self.constraint_holds,
            "pointwise": self.pointwise_agrees,
            "exhaustive": ex if isinstance(ex, str) else str(ex).lower(),
            "witness": self.witness,
            "elapsed_ms": round(self.elapsed_ms, 3),
            **self.extras,
        }


def verify_kan(p: KanProblem, budget: int | None = 10**6, exhaustive: bool = True) -> KanVerdict:
    t0 = time.perf_counter()
    witnesses = []
    cand = p.candidate
    C = cand.codomain
    hi = cand.after(p.i)
    if p.side == "left":
        bad = two_cell_witness(p.f, hi)
    else:
        bad = two_cell_witness(hi, p.f)
    constraint_holds = bad is None
    if bad is not None:
        witnesses.append(f"constraint fails at {bad!r}: f={p.f(bad)!r}, candidate.i={hi(bad)!r}")

    pointwise_agrees = True
    formula = pointwise_left_kan if p.side == "left" else pointwise_right_kan
    for b in cand.domain.elements:
        try:
            expect = formula(p.f, p.i, b)
        except NoBoundError as exc:
            pointwise_agrees = False
            witnesses.append(f"pointwise formula undefined at {b!r}: {exc}")
            break
        if expect != cand(b):
            pointwise_agrees = False
            witnesses.append(f"pointwise mismatch at {b!r}: formula {expect!r}, candidate {cand(b)!r}")
            break

    extremal: bool | str = "skipped"
    visited = 0
    checked = 0
    if exhaustive:
        extremal = constraint_holds
        B = cand.domain
        stats: dict = {}
        it = iter_monotone_maps(B, C, p.constraint(), budget, stats)
        try:
            for idx in it:
                checked += 1
                for k in range(len(B)):
                    a, b = (cand.idx[k], idx[k]) if p.side == "left" else (idx[k], cand.idx[k])
                    if not C.leq_idx(a, b):
                        extremal = False
                        x = B.elements[k]
                        rival = C.elements[idx[k]]
                        witnesses.append(
                            f"competing map #{checked} sends {x!r} to {rival!r}, candidate gives {cand(x)!r}"
                        )
                        break
                if extremal is False:
                    break
            visited = stats.get("visited", 0)
        except BudgetExceeded as exc:
            visited = exc.visited
            if extremal is not False:
                extremal = "skipped"
    return KanVerdict(
        problem=p.name,
        constraint_holds=constraint_holds,
        pointwise_agrees=pointwise_agrees,
        exhaustive_extremal=extremal,
        witness="; ".join(witnesses) if witnesses else None,
        visited=visited,
        maps_checked=checked,
        elapsed_ms=(time.perf_counter() - t0) * 1000,
    )


# -- cellular automaton instances ---------------------------------------------------


@dataclass
class CAInstance:
    """Materialized posets and maps for an automaton on a finite group."""

    automaton: Automaton
    group_elements: list[GroupElement]
    conf: FinitePoset
    loc: FinitePoset
    sub: FinitePoset
    globals: FinitePoset
    coarse: MonotoneMap
    fine: MonotoneMap
    delta: MonotoneMap
    delta_bar: MonotoneMap
    delta_under: MonotoneMap
    pi2_loc: MonotoneMap
    pi2_sub: MonotoneMap
    incl_globals: MonotoneMap
    incl_loc_sub: MonotoneMap


def conf_poset(window: Iterable[GroupElement], states: Sequence[str], name: str = "Conf") -> FinitePoset:
    return FinitePoset(
        cfg.enumerate_configs(window, states), cfg.leq, name=name, join=cfg.join, meet=cfg.meet
    )


def ca_instance(A: Automaton) -> CAInstance:
    if not A.group.is_finite:
        raise NotFiniteError("Kan problems need a finite group")
    G = enumerate_elements(A.group)
    conf = conf_poset(G, A.states)
    full = [c for c in conf.elements if len(c) == len(G)]
    globals_ = FinitePoset(full, cfg.leq, name="Q^G")
    loc = FinitePoset.discrete(A.loc_elements(), name="Loc")
    sub = FinitePoset(A.sub_elements(), sub_leq, name="Sub")
    return CAInstance(
        automaton=A,
        group_elements=G,
        conf=conf,
        loc=loc,
        sub=sub,
        globals=globals_,
        coarse=MonotoneMap(conf, conf, A.coarse_apply, name="coarse"),
        fine=MonotoneMap(conf, conf, lambda c: A.fine_apply(c, G), name="fine"),
        delta=MonotoneMap(globals_, conf, A.global_apply, name="global"),
        delta_bar=MonotoneMap(loc, conf, A.delta_bar, name="delta_bar"),
        delta_under=MonotoneMap(sub, conf, A.delta_under, name="delta_under"),
        pi2_loc=MonotoneMap(loc, conf, lambda e: e.pattern, name="pi2"),
        pi2_sub=MonotoneMap(sub, conf, lambda e: e.pattern, name="pi2"),
        incl_globals=MonotoneMap(globals_, conf, lambda c: c, name="incl"),
        incl_loc_sub=MonotoneMap(loc, sub, A.loc_to_sub, name="incl"),
    )


def build_ca_kan_problems(
    A: Automaton | CAInstance, shifts: Iterable[GroupElement] | None = None
) -> list[tuple[str, KanProblem]]:
    """The extension problems attached to a finite-group automaton.

    P1: coarse map = left extension of delta_bar along pi2 : Loc -> Conf
    P2: fine map = right extension of the global map along Q^G -> Conf
    P3: delta_under = right extension of delta_bar along Loc -> Sub
    P4: fine map = left extension of delta_under along pi2 : Sub -> Conf
    P5[g]: shift by g on Conf = right extension of the global shift
           (only for at least two states; one problem per shift in `shifts`,
           every group element by default)
    """
    inst = A if isinstance(A, CAInstance) else ca_instance(A)
    aut = inst.automaton
    problems = [
        ("P1", KanProblem("left", inst.pi2_loc, inst.delta_bar, inst.coarse, "P1")),
        ("P2", KanProblem("right", inst.incl_globals, inst.delta, inst.fine, "P2")),
        ("P3", KanProblem("right", inst.incl_loc_sub, inst.delta_bar, inst.delta_under, "P3")),
        ("P4", KanProblem("left", inst.pi2_sub, inst.delta_under, inst.fine, "P4")),
    ]
    if len(aut.states) >= 2:
        for g in shifts if shifts is not None else inst.group_elements:
            name = f"P5[{g!r}]"
            f = MonotoneMap(inst.globals, inst.conf, lambda c, g=g: cfg.shift(c, g), name=f"shift{g!r}")
            cand = MonotoneMap(inst.conf, inst.conf, lambda c, g=g: cfg.shift(c, g), name=f"shift{g!r}")
            problems.append((name, KanProblem("right", inst.incl_globals, f, cand, name)))
    return problems


def sandwich_check(inst: CAInstance, budget: int | None = None) -> tuple[list[str], int, bool]:
    """Test coarse => h => fine for every monotone h with delta_bar => h.pi2.

    Returns (findings, maps checked, complete). Findings are counterexamples.
    """
    problem = KanProblem("left", inst.pi2_loc, inst.delta_bar, inst.coarse, "sandwich")
    conf = inst.conf
    lo, hi = inst.coarse.idx, inst.fine.idx
    findings = []
    checked = 0
    try:
        for idx in iter_monotone_maps(conf, conf, problem.constraint(), budget):
            checked += 1
            for k in range(len(conf)):
                if not conf.leq_idx(lo[k], idx[k]) or not conf.leq_idx(idx[k], hi[k]):
                    c = conf.elements[k]
                    findings.append(
                        f"map #{checked} at {c!r}: coarse {inst.coarse(c)!r}, h {conf.elements[idx[k]]!r}, fine {inst.fine(c)!r}"
                    )
                    break
    except BudgetExceeded:
        return findings, checked, False
    return findings, checked, True
