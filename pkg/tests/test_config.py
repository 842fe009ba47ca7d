import itertools
import random

import pytest
from hypothesis import given, strategies as st

from kanca import config as cfg
from kanca.config import EMPTY, ConfigError, IncompatibleError, PartialConfig, StateSet
from kanca.group import GroupSpec, compose, enumerate_elements, translate_set

Z = GroupSpec((0,))
Z6 = GroupSpec((6,))
Q = ("0", "1")


def conf(spec, d):
    return PartialConfig({spec.element(k): v for k, v in d.items()})


positions = st.integers(-6, 6).map(Z.element)
configs = st.dictionaries(positions, st.sampled_from(("a", "b", "c")), max_size=6).map(PartialConfig)


def test_restrict_examples():
    c = conf(Z, {0: "a", 5: "b"})
    assert cfg.restrict(c, Z.elements([0])) == conf(Z, {0: "a"})
    assert cfg.restrict(c, c.support) == c
    assert cfg.restrict(c, ()) == EMPTY


def test_shift_left_by_five():
    c = conf(Z, {0: "a", 5: "b"})
    assert cfg.shift(c, Z.element(5)) == conf(Z, {-5: "a", 0: "b"})
    assert cfg.shift(c, Z.identity) == c


def test_shift_pointwise_definition_500_cases():
    # oracle: (c < g)(h) = c(g.h), checked cell by cell over a box
    rng = random.Random(11)
    box = [Z6.element(i) for i in range(6)]
    for _ in range(500):
        c = PartialConfig({p: rng.choice("ab") for p in box if rng.random() < 0.5})
        g, h = rng.choice(box), rng.choice(box)
        lhs = cfg.shift(cfg.shift(c, g), h)
        rhs = cfg.shift(c, compose(g, h))
        assert lhs == rhs
        for x in box:
            expected = c.get(compose(compose(g, h), x))
            assert lhs.get(x) == expected


@given(configs, positions, positions)
def test_right_action_laws(c, g, h):
    assert cfg.shift(c, Z.identity) == c
    assert cfg.shift(cfg.shift(c, g), h) == cfg.shift(c, compose(g, h))


def test_leq_examples():
    c = conf(Z, {0: "a", 1: "b"})
    assert cfg.leq(EMPTY, c)
    assert not cfg.leq(conf(Z, {0: "a"}), conf(Z, {0: "b"}))
    assert cfg.leq(c, c)
    assert c <= c


def test_meet_examples():
    a = conf(Z, {0: "a", 1: "a"})
    b = conf(Z, {0: "a", 1: "b"})
    assert cfg.meet([a, b]) == conf(Z, {0: "a"})
    assert cfg.meet([a]) == a
    assert cfg.meet([a, EMPTY]) == EMPTY
    with pytest.raises(ConfigError):
        cfg.meet([])


def test_join_examples():
    assert cfg.join([conf(Z, {0: "a"}), conf(Z, {1: "b"})]) == conf(Z, {0: "a", 1: "b"})
    assert cfg.join([]) == EMPTY
    with pytest.raises(IncompatibleError) as exc:
        cfg.join([conf(Z, {0: "a"}), conf(Z, {0: "b"})])
    assert exc.value.position == Z.element(0)


def test_enumerate_configs_counts():
    assert len(cfg.enumerate_configs(Z.elements([0, 1]), Q)) == 9
    assert cfg.enumerate_configs((), Q) == [EMPTY]
    frag = cfg.enumerate_configs(enumerate_elements(GroupSpec((3,))), Q)
    assert len(frag) == 27 == len(set(frag))
    assert frag[0] == EMPTY


def test_completions_examples():
    c = conf(Z, {5: "0"})
    done = cfg.completions(c, Z.elements([4, 5]), Q)
    assert len(done) == 2 and all(cfg.leq(c, d) and len(d) == 2 for d in done)
    assert cfg.completions(c, c.support, Q) == [c]
    assert len(cfg.completions(EMPTY, Z.elements([0, 1]), Q)) == 4
    with pytest.raises(ConfigError):
        cfg.completions(c, Z.elements([0]), Q)


def test_state_set_validation():
    assert StateSet(["0", "1"]) == ("0", "1")
    with pytest.raises(ConfigError):
        StateSet([])
    with pytest.raises(ConfigError):
        StateSet(["0", "0"])


@pytest.mark.parametrize("size", [0, 1, 2, 3])
def test_poset_axioms_on_windows(size):
    frag = cfg.enumerate_configs([Z.element(i) for i in range(size)], ("a", "b"))
    for a, b, c in itertools.product(frag, repeat=3):
        assert cfg.leq(a, a)
        if cfg.leq(a, b) and cfg.leq(b, a):
            assert a == b
        if cfg.leq(a, b) and cfg.leq(b, c):
            assert cfg.leq(a, c)


@pytest.mark.parametrize("size", [1, 2, 3])
def test_meet_join_are_bounds_brute_force(size):
    frag = cfg.enumerate_configs([Z.element(i) for i in range(size)], ("a", "b"))
    for a, b in itertools.product(frag, repeat=2):
        lower = [x for x in frag if x <= a and x <= b]
        assert [x for x in lower if all(y <= x for y in lower)] == [cfg.meet([a, b])]
        upper = [x for x in frag if a <= x and b <= x]
        least = [x for x in upper if all(x <= y for y in upper)]
        if least:
            assert least == [cfg.join([a, b])]
        else:
            with pytest.raises(IncompatibleError):
                cfg.join([a, b])


@given(configs, configs, positions)
def test_shift_monotone(c, d, g):
    small = cfg.meet([c, d])
    assert cfg.shift(small, g) <= cfg.shift(c, g)


def test_restriction_shift_exchange_full_support():
    N = Z6.elements([0, 1, 5])
    cells = enumerate_elements(Z6)
    rng = random.Random(4)
    for _ in range(100):
        c = PartialConfig({p: rng.choice("01") for p in cells})
        for g in cells:
            assert cfg.restrict(cfg.shift(c, g), N) == cfg.shift(cfg.restrict(c, translate_set(g, N)), g)


def test_full_configs_form_antichain():
    cells = enumerate_elements(GroupSpec((3,)))
    full = [c for c in cfg.enumerate_configs(cells, Q) if len(c) == 3]
    assert len(full) == 8
    for a, b in itertools.permutations(full, 2):
        assert not a <= b


def test_shifted_local_configs_antichain():
    # distinct local patterns c|g.N, for N of size 2 on Z/3, are pairwise incomparable
    cells = enumerate_elements(GroupSpec((3,)))
    N = [cells[0], cells[1]]
    locs = set()
    for c in cfg.enumerate_configs(cells, Q):
        if len(c) == 3:
            for g in cells:
                locs.add(cfg.restrict(c, translate_set(g, N)))
    for a, b in itertools.permutations(locs, 2):
        assert not a <= b


def test_partial_config_is_hashable_and_ordered():
    c = conf(Z, {3: "a", -1: "b"})
    assert list(c) == [Z.element(-1), Z.element(3)]
    assert {c: 1}[conf(Z, {-1: "b", 3: "a"})] == 1
    with pytest.raises(ConfigError):
        PartialConfig([(Z.element(0), "a"), (Z.element(0), "b")])
