"""Command line front end.

    kanca simulate --automaton A.json --config c.json --mode coarse|fine|global --steps K [--window "-10..10"] [--plot out.png]
    kanca verify   --automaton A.json [--suites laws,order,transitions,kan] [--budget B] [--seed S]
    kanca query    --automaton A.json --config c.json --what interior|determined [--window "-10..10"]

Exit status: 0 success, 1 verification failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from .automaton import Automaton
from .config import ConfigError, PartialConfig
from .group import GroupElement, GroupSpec, NotFiniteError, enumerate_elements
from .serialize import ParseError, config_to_json, dumps, element_to_json, parse_automaton, parse_config
from .suites import SUITES, run_suites

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_window(text: str | None, spec: GroupSpec) -> list[GroupElement] | None:
    """'-3..3' per infinite axis, comma separated; finite axes are always full."""
    if text is None:
        return None
    parts = [p.strip() for p in text.split(",") if p.strip()]
    n_inf = sum(1 for m in spec.moduli if m == 0)
    if len(parts) != n_inf:
        raise UsageError(f"window {text!r} gives {len(parts)} ranges, group {spec} has {n_inf} infinite axes")
    ranges = []
    for p in parts:
        lo, sep, hi = p.partition("..")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad window range {p!r}, expected LO..HI") from None
        if not sep or lo_i > hi_i:
            raise UsageError(f"bad window range {p!r}, expected LO..HI with LO <= HI")
        ranges.append(range(lo_i, hi_i + 1))
    it = iter(ranges)
    axes = [range(m) if m else next(it) for m in spec.moduli]
    return [GroupElement(spec, c) for c in itertools.product(*axes)]


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_automaton(path: str) -> Automaton:
    return parse_automaton(_read(path), source=path)


def load_config(path: str, A: Automaton) -> PartialConfig:
    return parse_config(_read(path), A.group, A.states, source=path)


def simulate(A: Automaton, c: PartialConfig, mode: str, steps: int, window=None) -> list[PartialConfig]:
    if steps < 0:
        raise UsageError("steps must be non-negative")
    G = A.group
    if mode == "global":
        if not G.is_finite:
            raise UsageError("global mode needs a finite group")
        if len(c) != G.order:
            raise UsageError("global mode needs a full-support configuration")
    if mode == "fine" and window is None:
        if not G.is_finite:
            raise UsageError("fine mode on an infinite group needs --window")
        window = enumerate_elements(G)
    snaps = [c]
    for _ in range(steps):
        if mode == "coarse":
            c = A.coarse_apply(c)
        elif mode == "fine":
            c = A.fine_apply(c, window)
        elif mode == "global":
            c = A.global_apply(c)
        else:
            raise UsageError(f"unknown mode {mode!r}")
        snaps.append(c)
    return snaps


def cmd_simulate(args, out) -> int:
    A = load_automaton(args.automaton)
    c = load_config(args.config, A)
    window = parse_window(args.window, A.group)
    snaps = simulate(A, c, args.mode, args.steps, window)
    for s in snaps:
        out.write(dumps(config_to_json(s)))
    if args.steps and len(snaps[0]) and not len(snaps[-1]):
        print(f"warning: configuration became empty by step {args.steps}", file=sys.stderr)
    if args.plot:
        if A.group.rank != 1:
            raise UsageError("--plot needs a one-dimensional group")
        if window is not None:
            cells = sorted(window)
        elif A.group.is_finite:
            cells = enumerate_elements(A.group)
        else:
            xs = [g.coords[0] for s in snaps for g in s]
            lo, hi = (min(xs), max(xs)) if xs else (0, 0)
            cells = [A.group.element(x) for x in range(lo, hi + 1)]
        from .plotting import plot_spacetime

        plot_spacetime(snaps, A.states, cells, args.plot, title=f"{args.mode}, {args.steps} steps")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    A = load_automaton(args.automaton)
    suites = [s.strip() for s in args.suites.split(",") if s.strip()]
    for s in suites:
        if s not in SUITES:
            raise UsageError(f"unknown suite {s!r}; choose from {','.join(SUITES)}")
    if args.budget <= 0:
        raise UsageError("budget must be positive")
    if "kan" in suites and not A.group.is_finite:
        raise UsageError(f"kan suite needs a finite group, {A.group} is infinite")
    results = run_suites(A, suites, args.budget, args.seed)
    ok = all(r.failed == 0 for r in results)
    report = {
        "automaton": args.automaton,
        "seed": args.seed,
        "budget": args.budget,
        "ok": ok,
        "suites": [r.to_json() for r in results],
    }
    out.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_query(args, out) -> int:
    A = load_automaton(args.automaton)
    c = load_config(args.config, A)
    window = parse_window(args.window, A.group)
    if args.what == "interior":
        cells = A.interior(c.support)
        if window is not None:
            cells = cells & frozenset(window)
        result = [element_to_json(g) for g in sorted(cells)]
    else:
        if window is None:
            if not A.group.is_finite:
                raise UsageError("determined query on an infinite group needs --window")
            window = enumerate_elements(A.group)
        fine = A.fine_apply(c, window)
        result = [[element_to_json(g), q] for g, q in fine.sorted_items()]
    out.write(dumps(result))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kanca", description="Cellular automata on partial configurations.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="iterate the coarse, fine or global map")
    s.add_argument("--automaton", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--mode", choices=("coarse", "fine", "global"), default="coarse")
    s.add_argument("--steps", type=int, default=1)
    s.add_argument("--window", help='per infinite axis, e.g. "-10..10" or "-3..3,-3..3"')
    s.add_argument("--plot", help="write a space-time diagram (1-D groups only)")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--automaton", required=True)
    v.add_argument("--suites", default=",".join(SUITES))
    v.add_argument("--budget", type=int, default=100_000, help="partial assignments per exhaustive search")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("query", help="interior or determined set of a configuration")
    q.add_argument("--automaton", required=True)
    q.add_argument("--config", required=True)
    q.add_argument("--what", choices=("interior", "determined"), required=True)
    q.add_argument("--window")
    q.set_defaults(func=cmd_query)
    return p


def _glue_window(argv: list[str]) -> list[str]:
    # argparse reads "--window -10..10" as two options; glue the value on
    out = []
    it = iter(argv)
    for a in it:
        if a == "--window":
            out.append(f"--window={next(it, '')}")
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None, out=None) -> int:
    argv = _glue_window(list(sys.argv[1:] if argv is None else argv))
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, ParseError, ConfigError, NotFiniteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
