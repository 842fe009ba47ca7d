"""Randomized and exhaustive checks driven by the `verify` command."""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from . import config as cfg
from .automaton import Automaton, sub_leq
from .config import PartialConfig
from .group import GroupElement, GroupSpec, compose, enumerate_elements, inverse, set_product, translate_set
from .kanlab import build_ca_kan_problems, ca_instance, sandwich_check, verify_kan

SUITES = ("laws", "order", "transitions", "kan")

# radius of the box used to sample positions along infinite axes
BOX = 4
MAX_FAILURES = 10


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def check(self, ok: bool, what: Callable[[], str] | str) -> bool:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(what() if callable(what) else what)
        return ok

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "failed": self.failed,
            "failures": self.failures,
            "elapsed_ms": round(self.elapsed_ms, 3),
            **self.extras,
        }


def random_element(spec: GroupSpec, rng: random.Random, radius: int = BOX) -> GroupElement:
    return GroupElement(spec, tuple(rng.randrange(m) if m else rng.randint(-radius, radius) for m in spec.moduli))


def box(spec: GroupSpec, radius: int = BOX) -> list[GroupElement]:
    """All elements with infinite coordinates in [-radius, radius]."""
    axes = [range(m) if m else range(-radius, radius + 1) for m in spec.moduli]
    return [GroupElement(spec, c) for c in itertools.product(*axes)]


def random_config(
    spec: GroupSpec, states, rng: random.Random, cells: list[GroupElement] | None = None, density: float = 0.5
) -> PartialConfig:
    cells = cells if cells is not None else box(spec, 3)
    return PartialConfig({g: rng.choice(states) for g in cells if rng.random() < density})


def small_window(spec: GroupSpec, size: int = 3) -> list[GroupElement]:
    cells = enumerate_elements(spec) if spec.is_finite else box(spec, 1)
    cells.sort(key=lambda g: (sum(abs(x) for x in g.coords), g.coords))
    return cells[:size]


def laws_suite(A: Automaton, rng: random.Random, trials: int = 200) -> SuiteResult:
    r = SuiteResult("laws")
    G = A.group
    e = G.identity
    for _ in range(trials):
        g, h, k = (random_element(G, rng) for _ in range(3))
        r.check(compose(compose(g, h), k) == compose(g, compose(h, k)), lambda: f"associativity fails on {g!r},{h!r},{k!r}")
        r.check(compose(g, e) == g == compose(e, g), lambda: f"identity law fails on {g!r}")
        r.check(compose(g, inverse(g)) == e, lambda: f"inverse law fails on {g!r}")
        c = random_config(G, A.states, rng)
        r.check(cfg.shift(c, e) == c, lambda: f"shift by identity changes {c}")
        r.check(
            cfg.shift(cfg.shift(c, g), h) == cfg.shift(c, compose(g, h)),
            lambda: f"(c < g) < h != c < gh for c={c}, g={g!r}, h={h!r}",
        )
        S = frozenset(random_config(G, A.states, rng).support)
        r.check(len(translate_set(g, S)) == len(S), lambda: f"translation by {g!r} not injective on {sorted(S)}")
    if G.is_finite:
        cells = enumerate_elements(G)
        N = A.neighborhood
        for _ in range(trials):
            c = random_config(G, A.states, rng, cells, density=1.0)
            g = rng.choice(cells)
            lhs = cfg.restrict(cfg.shift(c, g), N)
            rhs = cfg.shift(cfg.restrict(c, translate_set(g, N)), g)
            r.check(lhs == rhs, lambda: f"restriction/shift exchange fails at g={g!r}, c={c}")
    return r


def order_suite(A: Automaton, rng: random.Random, trials: int = 200) -> SuiteResult:
    r = SuiteResult("order")
    G = A.group
    window = small_window(G)
    frag = cfg.enumerate_configs(window, A.states)
    for a, b in itertools.product(frag, repeat=2):
        if a == b:
            r.check(cfg.leq(a, a), lambda: f"not reflexive at {a}")
        elif cfg.leq(a, b):
            r.check(not cfg.leq(b, a), lambda: f"not antisymmetric: {a}, {b}")
            for c in frag:
                if cfg.leq(b, c):
                    r.check(cfg.leq(a, c), lambda: f"not transitive: {a} <= {b} <= {c}")
    # meets and joins against brute force over the fragment
    for a, b in itertools.product(frag, repeat=2):
        lower = [x for x in frag if cfg.leq(x, a) and cfg.leq(x, b)]
        glb = cfg.meet([a, b])
        r.check(glb in lower and all(cfg.leq(x, glb) for x in lower), lambda: f"meet of {a}, {b} is not the glb")
        upper = [x for x in frag if cfg.leq(a, x) and cfg.leq(b, x)]
        if upper:
            lub = cfg.join([a, b])
            r.check(lub in upper and all(cfg.leq(lub, x) for x in upper), lambda: f"join of {a}, {b} is not the lub")
        else:
            try:
                cfg.join([a, b])
                r.check(False, lambda: f"join of incompatible {a}, {b} did not raise")
            except cfg.IncompatibleError:
                r.check(True, "")
    # monotonicity of shift, coarse, fine
    cells = enumerate_elements(G) if G.is_finite else box(G, 2)
    probe = sorted(set_product(cells, A.neighborhood) | set(cells)) if not G.is_finite else cells
    for _ in range(trials):
        big = random_config(G, A.states, rng, cells, density=0.7)
        small = cfg.restrict(big, [x for x in big if rng.random() < 0.5])
        g = random_element(G, rng)
        r.check(cfg.leq(cfg.shift(small, g), cfg.shift(big, g)), lambda: f"shift by {g!r} not monotone on {small} <= {big}")
        r.check(cfg.leq(A.coarse_apply(small), A.coarse_apply(big)), lambda: f"coarse map not monotone on {small} <= {big}")
        r.check(
            cfg.leq(A.fine_apply(small, probe), A.fine_apply(big, probe)),
            lambda: f"fine map not monotone on {small} <= {big}",
        )
    if G.is_finite and len(A.states) ** len(A.neighborhood) * G.order <= 4096:
        subs = A.sub_elements()
        for x in subs:
            for y in subs:
                if sub_leq(x, y):
                    r.check(
                        cfg.leq(A.delta_under(x), A.delta_under(y)),
                        lambda: f"delta_under not monotone on {x} <= {y}",
                    )
    return r


def _det_by_completions(A: Automaton, c: PartialConfig, g: GroupElement) -> str | None:
    nb = A.neighborhood_of(g)
    outs = {A.local_apply(A._read(d, g)) for d in cfg.completions(cfg.restrict(c, nb), nb, A.states)}
    return outs.pop() if len(outs) == 1 else None


def transitions_suite(A: Automaton, rng: random.Random, trials: int = 200) -> SuiteResult:
    r = SuiteResult("transitions")
    G = A.group
    N = A.neighborhood
    Ninv = [inverse(n) for n in N]
    cells = enumerate_elements(G) if G.is_finite else box(G, 3)
    if G.is_finite:
        fulls = itertools.product(A.states, repeat=len(cells))
        if len(A.states) ** len(cells) > 4096:
            fulls = (tuple(rng.choice(A.states) for _ in cells) for _ in range(trials))
        for combo in fulls:
            c = PartialConfig(zip(cells, combo))
            glob = A.global_apply(c)
            r.check(A.coarse_apply(c) == glob, lambda: f"coarse != global on {c}")
            r.check(A.fine_apply(c, cells) == glob, lambda: f"fine != global on {c}")
    for _ in range(trials):
        c = random_config(G, A.states, rng, cells)
        window = set_product(c.support, Ninv) | set(cells) if not G.is_finite else cells
        coarse = A.coarse_apply(c)
        fine = A.fine_apply(c, window)
        r.check(coarse.support <= frozenset(window), lambda: f"window misses interior of {c}")
        r.check(cfg.leq(coarse, fine), lambda: f"coarse not below fine on {c}")
        g = rng.choice(cells)
        r.check(A.determined_at(c, g) == _det_by_completions(A, c, g), lambda: f"determined_at disagrees with completions at {g!r}, c={c}")
        S = c.support
        r.check(S <= A.interior(set_product(S, N)), lambda: f"S not inside int(S.N) for S={sorted(S)}")
        inner = A.interior(S)
        for h in inner:
            r.check(frozenset(N) <= cfg.shift(c, h).support, lambda: f"int/shift equivalence fails at {h!r}")
    injective = A.neighborhood_injective()
    r.extras["neighborhood_injective"] = injective
    witness = None
    if G.is_finite and G.order * len(A.states) ** len(N) <= 4096:
        locs = A.loc_elements()
    else:
        locs = []
        for _ in range(trials):
            g = random_element(G, rng)
            locs.append(A.loc(g, PartialConfig({compose(g, n): rng.choice(A.states) for n in N})))
    strict = 0
    for e in locs:
        bar = A.delta_bar(e)
        full = A.coarse_apply(e.pattern)
        r.check(cfg.leq(bar, full), lambda: f"delta_bar not below coarse at {e}")
        if bar != full:
            strict += 1
            if witness is None:
                witness = {"loc": repr(e), "delta_bar": repr(bar), "coarse": repr(full)}
    if injective:
        r.check(strict == 0, lambda: f"injective neighborhood but delta_bar != coarse.pi2 ({witness})")
    elif G.is_finite and locs:
        r.check(strict > 0, "non-injective neighborhood but no strict delta_bar/coarse witness")
    r.extras["strict_witness"] = witness
    d = A.neighborhood_collision()
    r.extras["collision"] = None if d is None else list(d.coords)
    return r


def kan_suite(A: Automaton, budget: int) -> SuiteResult:
    r = SuiteResult("kan")
    inst = ca_instance(A)
    verdicts = []
    skipped = 0
    for name, p in build_ca_kan_problems(inst):
        v = verify_kan(p, budget)
        verdicts.append(v.to_json())
        r.check(v.ok, lambda: f"{name}: {v.witness}")
        if v.exhaustive_extremal == "skipped":
            skipped += 1
    fi = inst.fine.after(inst.incl_globals)
    r.check(fi.idx == inst.delta.idx, "fine map restricted to global configurations differs from the global map")
    findings, checked, complete = sandwich_check(inst, budget)
    r.extras["problems"] = verdicts
    r.extras["budget_skipped"] = skipped
    r.extras["sandwich"] = {"maps_checked": checked, "complete": complete, "findings": findings}
    return r


def run_suites(A: Automaton, suites, budget: int, seed: int) -> list[SuiteResult]:
    results = []
    for name in suites:
        rng = random.Random(f"{seed}:{name}")
        t0 = time.perf_counter()
        if name == "laws":
            res = laws_suite(A, rng)
        elif name == "order":
            res = order_suite(A, rng)
        elif name == "transitions":
            res = transitions_suite(A, rng)
        elif name == "kan":
            res = kan_suite(A, budget)
        else:
            raise ValueError(f"unknown suite {name!r}")
        res.elapsed_ms = (time.perf_counter() - t0) * 1000
        results.append(res)
    return results
