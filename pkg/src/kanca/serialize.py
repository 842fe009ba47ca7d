"""JSON encoding of groups, configurations and automata.

Canonical output is compact JSON (no spaces) with a trailing newline;
`dumps(parse(text)) == text` holds for canonical files.
"""
from __future__ import annotations

import itertools
import json
from typing import Any

from .automaton import Automaton, AutomatonError, RuleTable
from .config import ConfigError, PartialConfig, StateSet
from .group import GroupElement, GroupError, GroupSpec

__all__ = [
    "ParseError",
    "dumps",
    "load_json",
    "group_to_json",
    "group_from_json",
    "element_to_json",
    "element_from_json",
    "config_to_json",
    "config_from_json",
    "automaton_to_json",
    "automaton_from_json",
    "parse_automaton",
    "parse_config",
]


class ParseError(ValueError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False) + "\n"


def load_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise ParseError(msg)


def group_to_json(spec: GroupSpec) -> dict:
    return {"moduli": list(spec.moduli)}


def group_from_json(obj: Any) -> GroupSpec:
    _expect(isinstance(obj, dict) and isinstance(obj.get("moduli"), list), "group must be {\"moduli\": [...]}")
    _expect(all(isinstance(m, int) and not isinstance(m, bool) for m in obj["moduli"]), "moduli must be integers")
    try:
        return GroupSpec(tuple(obj["moduli"]))
    except GroupError as exc:
        raise ParseError(str(exc)) from None


def element_to_json(g: GroupElement) -> list[int]:
    return list(g.coords)


def element_from_json(obj: Any, spec: GroupSpec) -> GroupElement:
    _expect(
        isinstance(obj, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in obj),
        f"position must be an integer array, got {obj!r}",
    )
    _expect(len(obj) == spec.rank, f"position {obj} has {len(obj)} coordinates, group {spec} needs {spec.rank}")
    return GroupElement(spec, tuple(obj))


def config_to_json(c: PartialConfig) -> dict:
    return {"entries": [[element_to_json(g), q] for g, q in c.sorted_items()]}


def config_from_json(obj: Any, spec: GroupSpec, states: StateSet | None = None) -> PartialConfig:
    _expect(isinstance(obj, dict) and isinstance(obj.get("entries"), list), "configuration must be {\"entries\": [...]}")
    entries = {}
    for k, item in enumerate(obj["entries"]):
        _expect(isinstance(item, list) and len(item) == 2, f"entry {k} must be [position, state]")
        g = element_from_json(item[0], spec)
        q = item[1]
        _expect(isinstance(q, str), f"entry {k}: state must be a string, got {q!r}")
        _expect(g not in entries, f"entry {k}: duplicate position {item[0]}")
        if states is not None:
            _expect(q in states, f"entry {k}: unknown state {q!r}")
        entries[g] = q
    return PartialConfig(entries)


def _rule_to_json(rule: RuleTable, states: StateSet, arity: int) -> dict:
    if rule.kind == "eca":
        return {"type": "eca", "number": rule.params[0]}
    if rule.kind == "constant":
        return {"type": "constant", "value": rule.params[0]}
    entries = [[list(t), rule.table[t]] for t in itertools.product(states, repeat=arity)]
    return {"type": "table", "entries": entries}


def automaton_to_json(A: Automaton) -> dict:
    return {
        "group": group_to_json(A.group),
        "states": list(A.states),
        "neighborhood": [element_to_json(n) for n in A.neighborhood],
        "rule": _rule_to_json(A.rule, A.states, len(A.neighborhood)),
    }


def automaton_from_json(obj: Any) -> Automaton:
    _expect(isinstance(obj, dict), "automaton must be a JSON object")
    for key in ("group", "states", "neighborhood", "rule"):
        _expect(key in obj, f"automaton is missing {key!r}")
    spec = group_from_json(obj["group"])
    _expect(isinstance(obj["states"], list) and all(isinstance(s, str) for s in obj["states"]), "states must be strings")
    _expect(isinstance(obj["neighborhood"], list), "neighborhood must be a list of positions")
    nbhd = tuple(element_from_json(n, spec) for n in obj["neighborhood"])
    rule = obj["rule"]
    _expect(isinstance(rule, dict) and "type" in rule, "rule must be an object with a 'type'")
    try:
        states = StateSet(obj["states"])
        kind = rule["type"]
        if kind == "eca":
            _expect(isinstance(rule.get("number"), int), "eca rule needs an integer 'number'")
            _expect(list(states) == ["0", "1"], "eca rules need states [\"0\",\"1\"]")
            _expect(len(nbhd) == 3, "eca rules need a 3-cell neighborhood")
            table = RuleTable.eca(rule["number"])
        elif kind == "constant":
            _expect(isinstance(rule.get("value"), str), "constant rule needs a string 'value'")
            table = RuleTable.constant(rule["value"], states, len(nbhd))
        elif kind == "table":
            _expect(isinstance(rule.get("entries"), list), "table rule needs 'entries'")
            pairs = []
            for k, e in enumerate(rule["entries"]):
                _expect(isinstance(e, list) and len(e) == 2 and isinstance(e[0], list), f"rule entry {k} must be [[states...], state]")
                pairs.append((e[0], e[1]))
            table = RuleTable.from_entries(pairs)
        else:
            raise ParseError(f"unknown rule type {kind!r}")
        return Automaton(spec, states, nbhd, table)
    except (AutomatonError, ConfigError) as exc:
        raise ParseError(str(exc)) from None


def parse_automaton(text: str, source: str = "<automaton>") -> Automaton:
    return automaton_from_json(load_json(text, source))


def parse_config(text: str, spec: GroupSpec, states: StateSet | None = None, source: str = "<config>") -> PartialConfig:
    return config_from_json(load_json(text, source), spec, states)
