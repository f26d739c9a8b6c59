"""Command-line interface: ``revbisim <command> ...``.

Exit codes: 0 equivalent / stable / success, 1 inequivalent / not stable /
violations found, 2 input error, 3 capacity exceeded.

Structures are given either as a path to an exchange-format file, as
``term:<text>`` in place of a path, or through ``--term`` / ``--term2``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpus
from .core import (CapacityError, ConfigStructure, InputError, auto_concurrency, causality,
                   check_capacity, config_key, depths, fmt_config, require_stable, validate)
from .equivalences import ALL_KINDS, Kind, check
from .genprop import LAWS, MODES, GenParams, run_laws
from .terms import translate
from .transitions import move_menu

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


def load_input(text: str) -> ConfigStructure:
    """A file path, or a term when prefixed with ``term:``."""
    if text.startswith("term:"):
        return translate(text[len("term:"):])
    try:
        data = Path(text).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {text}: {exc.strerror}") from None
    return ConfigStructure.loads(data)


def _inputs(args, needed: int) -> list[ConfigStructure]:
    # --term fills the first slot and --term2 the second; positionals fill the rest in order
    slots = [args.term, getattr(args, "term2", None)][:needed]
    slots = [None if t is None else t if t.startswith("term:") else "term:" + t for t in slots]
    rest = list(args.inputs)
    if len(rest) != slots.count(None):
        raise InputError(f"expected {needed} input(s), got {needed - slots.count(None) + len(rest)}")
    sources = [s if s is not None else rest.pop(0) for s in slots]
    return [load_input(s) for s in sources]


def _parse_config(structure: ConfigStructure, text: str) -> frozenset:
    text = text.strip().strip("{}")
    X = frozenset(e.strip() for e in text.split(",") if e.strip())
    return structure.require(X)


# -- commands -------------------------------------------------------------------


def cmd_validate(args) -> int:
    (s,) = _inputs(args, 1)
    check_capacity(s)
    report = validate(s)
    if args.json:
        print(json.dumps(report.to_dict()))
    else:
        print(report.render())
    return EXIT_OK if report.stable else EXIT_FAIL


def _describe(s: ConfigStructure, X: frozenset) -> list[str]:
    ctx = causality(s, X)
    order = [f"{d} < {e}" for d, e in sorted(ctx.strictly, key=lambda p: (config_key([p[0]]), p))]
    conc = sorted(" co ".join(sorted(p)) for p in ctx.concurrent)
    dep = depths(s, X)
    out = [f"configuration {fmt_config(X)}",
           f"  order: {', '.join(order) if order else '-'}",
           f"  concurrent: {', '.join(conc) if conc else '-'}",
           f"  depths: {' '.join(f'{e}:{dep[e]}' for e in sorted(dep)) if dep else '-'}",
           "  moves:"]
    menu = move_menu(s, X)
    out += [f"    {m.render()}" for m in menu] or ["    (none)"]
    return out


def cmd_info(args) -> int:
    (s,) = _inputs(args, 1)
    check_capacity(s)
    require_stable(s)
    if args.config == "all":
        chosen = list(s.configurations)
    elif args.config is not None:
        chosen = [_parse_config(s, args.config)]
    else:
        chosen = []
    print("events: " + (" ".join(f"{e}:{s.label(e)}" for e in s.events) or "-"))
    print(f"configurations ({len(s.configurations)}): "
          + " ".join(fmt_config(X) for X in s.configurations))
    for X in chosen:
        print("\n".join(_describe(s, X)))
    print("\n".join(auto_concurrency(s).lines()))
    return EXIT_OK


def cmd_check(args) -> int:
    C, D = _inputs(args, 2)
    kinds = list(ALL_KINDS) if args.eq == "all" else [Kind.parse(args.eq)]
    verdicts = [check(k, C, D, want_witness=args.witness) for k in kinds]
    if args.json:
        docs = [v.to_dict() for v in verdicts]
        print(json.dumps(docs[0] if args.eq != "all" else docs, indent=1))
    else:
        for v in verdicts:
            print(v.render())
            if v.witness is not None:
                print("\n".join("  " + line for line in v.witness.lines()))
    return EXIT_OK if all(v.equivalent for v in verdicts) else EXIT_FAIL


def cmd_corpus(args) -> int:
    yes, no = ("Y", "N") if args.ascii else ("✓", "✗")
    kinds = [str(k) for k in ALL_KINDS]
    width = max(len(e.name) for e in corpus.entries())
    print(" " * width + " " + " ".join(f"{k:>6}" for k in kinds))
    mismatches = 0
    for entry in corpus.entries():
        C, D = entry.structures()
        cells = []
        for k in kinds:
            actual = check(k, C, D).equivalent
            mark = yes if actual else no
            if k in entry.expected:
                want = entry.expected[k][0]
                ok = want == actual
                mismatches += not ok
                cell = f"{yes if want else no}/{mark}" + ("" if ok else "!")
            else:
                cell = f"?/{mark}"
            cells.append(f"{cell:>6}")
        print(f"{entry.name:<{width}} " + " ".join(cells))
    print(f"cells are expected/actual; '?' marks no recorded expectation; "
          f"{mismatches} mismatch(es)")
    return EXIT_OK if mismatches == 0 else EXIT_FAIL


def cmd_fuzz(args) -> int:
    laws = LAWS if args.laws == "all" else [x.strip() for x in args.laws.split(",") if x.strip()]
    try:
        params = GenParams(max_events=args.max_events, labels=args.labels, seed=args.seed,
                           mode=args.mode)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        reports = run_laws(laws, params, args.count, include_corpus=not args.no_corpus,
                           out_dir=args.out, workers=args.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    bad = 0
    for r in reports:
        print(r.line())
        for key, value in sorted(r.stats.items()):
            print(f"  {key}: {value}")
        for v in r.violations:
            bad += 1
            print(f"  violation on {v['instance']}: {'; '.join(v['details'])}")
    return EXIT_OK if bad == 0 else EXIT_FAIL


def cmd_translate(args) -> int:
    (s,) = _inputs(args, 1)
    text = s.dumps()
    if args.output:
        Path(args.output).write_text(text + "\n")
        print(f"{len(s.events)} events, {len(s.configurations)} configurations")
    else:
        print(text)
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="revbisim",
                                description="Stable configuration structures and "
                                            "forward/reverse bisimulations.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def inputs(sp, two=False):
        sp.add_argument("inputs", nargs="*", help="structure files, or term:<text>")
        sp.add_argument("--term", help="first input as a process term")
        if two:
            sp.add_argument("--term2", help="second input as a process term")

    sp = sub.add_parser("validate", help="check the stability axioms")
    inputs(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("info", help="list configurations, causality and moves")
    inputs(sp)
    sp.add_argument("--config", help="comma-separated event ids, or 'all'")
    sp.set_defaults(func=cmd_info)

    sp = sub.add_parser("check", help="decide an equivalence")
    inputs(sp, two=True)
    sp.add_argument("--eq", default="all", help="one of " + ", ".join(map(str, ALL_KINDS))
                    + ", or 'all'")
    sp.add_argument("--witness", action="store_true", help="print a distinguishing strategy")
    sp.add_argument("--json", action="store_true", help="print verdict documents")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("corpus", help="run the built-in example corpus")
    sp.add_argument("--ascii", action="store_true", help="Y/N instead of check marks")
    sp.set_defaults(func=cmd_corpus)

    sp = sub.add_parser("fuzz", help="test laws on generated structures")
    sp.add_argument("--laws", default="all", help="comma-separated: " + ", ".join(LAWS))
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-events", type=int, default=8)
    sp.add_argument("--labels", type=int, default=2)
    sp.add_argument("--mode", choices=MODES, default="prime")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-corpus", action="store_true", help="generated instances only")
    sp.add_argument("--out", type=Path, help="directory for counterexample files")
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("translate", help="write the structure of a term")
    inputs(sp)
    sp.add_argument("-o", "--output", help="output file (default: stdout)")
    sp.set_defaults(func=cmd_translate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
