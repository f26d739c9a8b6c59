"""Acceptance criteria, one test each.

Every test records a single ``CRITERION <n> PASS|FAIL`` line and enforces
its time budget.  The lines are printed in the pytest terminal summary (see
``conftest.py``), and directly when the module is run as a script with
``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from contextlib import contextmanager

from revbisim.core import validate
from revbisim.corpus import (ABSORPTION_LEFT, ABSORPTION_RIGHT, entries, exclusive_switch,
                             parallel_switch, strictness_witnesses)
from revbisim.equivalences import ALL_KINDS, check, replay_witness
from revbisim.genprop import GenParams, generate, generate_pair, random_term, run_laws
from revbisim.oracle import naive_equivalent, naive_hh_equivalent
from revbisim.terms import translate
from revbisim.transitions import FWD, REV

GENERATED = GenParams(max_events=8, seed=2024)
RESULTS: list[str] = []


@contextmanager
def criterion(number: int, title: str, budget_s: float):
    start = time.perf_counter()
    status, detail = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if elapsed > budget_s:
            detail = f" over budget {budget_s:g} s"
            raise AssertionError(f"criterion {number} took {elapsed:.1f} s, budget {budget_s} s")
        status = "PASS"
    except AssertionError as exc:
        detail = detail or f" ({exc})"
        raise
    finally:
        elapsed = time.perf_counter() - start
        line = f"CRITERION {number} {status}: {title} [{elapsed:.2f} s]{detail}"
        RESULTS.append(line)
        print(line, flush=True)


def eq(kind, left, right, witness=False):
    return check(kind, translate(left), translate(right), want_witness=witness)


def test_criterion_01_switch_structures():
    with criterion(1, "inclusive switch fails only bounded intersections; exclusive switch "
                      "is stable and not prime", 1):
        r = validate(parallel_switch())
        failing = [n for n in ("rooted", "connected", "boundedUnions", "boundedIntersections")
                   if not getattr(r, n)]
        assert failing == ["boundedIntersections"]
        assert r.witnesses["boundedIntersections"] == (
            frozenset({"0", "b"}), frozenset({"1", "b"}), frozenset({"0", "1", "b"}))
        d = validate(exclusive_switch())
        assert d.stable and not d.primeIntersections


def test_criterion_02_step_and_reverse_step():
    with criterion(2, "a|a vs a.a and a|a vs (a|a)+a.a", 5):
        assert eq("ib", "a|a", "a.a").equivalent
        assert not eq("sb", "a|a", "a.a").equivalent
        assert eq("sb", "a|a", "(a|a)+a.a").equivalent
        assert not eq("hh", "a|a", "(a|a)+a.a").equivalent
        v = eq("rsb", "a|a", "(a|a)+a.a", witness=True)
        assert not v.equivalent
        assert replay_witness("rsb", translate("a|a"), translate("(a|a)+a.a"), v.witness)[0]
        last = [path[-1][1] for path in v.witness.paths()]
        assert last and all(m.direction == REV and m.labels == ("a", "a") for m in last)


def test_criterion_03_interleaving_and_absorption():
    with criterion(3, "interleaving law, auto-concurrency under rb, absorption law witness", 10):
        assert eq("ib", "a|b", "a.b+b.a").equivalent
        assert not eq("rb", "a|b", "a.b+b.a").equivalent
        assert not eq("sb", "a|b", "a.b+b.a").equivalent
        assert eq("rb", "a|a", "a.a").equivalent
        assert not eq("sb", "a|a", "a.a").equivalent
        assert eq("sb", ABSORPTION_LEFT, ABSORPTION_RIGHT).equivalent
        v = eq("rb", ABSORPTION_LEFT, ABSORPTION_RIGHT, witness=True)
        assert not v.equivalent
        C, D = translate(ABSORPTION_LEFT), translate(ABSORPTION_RIGHT)
        assert replay_witness("rb", C, D, v.witness)[0]
        wanted = [(FWD, ("a",)), (FWD, ("b",)), (REV, ("a",)), (FWD, ("c",))]
        rounds = [[(m.direction, m.labels) for _, m in p][::2] for p in v.witness.paths()]
        assert any(r[:4] == wanted for r in rounds)


def test_criterion_04_depth():
    with criterion(4, "a|b vs (a|b)+a.b under sb and db; absorption under db", 5):
        assert eq("sb", "a|b", "(a|b)+a.b").equivalent
        assert not eq("db", "a|b", "(a|b)+a.b").equivalent
        assert eq("db", ABSORPTION_LEFT, ABSORPTION_RIGHT).equivalent


def _laws(laws, count, params=GENERATED, include_corpus=True):
    reports = run_laws(laws, params, count, include_corpus=include_corpus)
    for r in reports:
        RESULTS.append(f"  {r.line()} {r.stats or ''}".rstrip())
    return reports


def test_criterion_05_hierarchy():
    with criterion(5, "inclusions on corpus plus 200 generated pairs", 300):
        (r,) = _laws(["hierarchy"], 200)
        assert r.instances >= 200 + len(entries())
        assert r.violations == [] and r.capacity_errors == 0
        for name, (holds, fails, entry) in strictness_witnesses().items():
            C, D = next(e for e in entries() if e.name == entry).structures()
            assert check(holds, C, D).equivalent, name
            assert not check(fails, C, D).equivalent, name


def test_criterion_06_coincidences():
    with criterion(6, "rsb, rhsb, rhesb, rdb coincide on corpus plus 200 generated pairs", 300):
        reports = _laws(["rsb=rhsb", "rdb=rhesb=rsb"], 200)
        for r in reports:
            assert r.instances >= 200
            assert r.violations == [] and r.capacity_errors == 0


def test_criterion_07_rb_equals_hh_without_equidepth_autoconcurrency():
    with criterion(7, "rb = hh on 100 filtered pairs, at least 10 auto-concurrent", 600):
        (gen,) = _laws(["rb=hh-noeqac"], 100, include_corpus=False)
        assert gen.instances == 100
        assert gen.stats["autoConcurrent"] >= 10
        assert gen.violations == [] and gen.capacity_errors == 0
        (corp,) = _laws(["rb=hh-noeqac"], 0)
        assert corp.violations == []


def test_criterion_08_lemmas():
    with criterion(8, "label, min, lift, level and depth-matching properties", 300):
        reports = _laws(["labels-lemma", "min-lemma", "lift-lemma", "levels", "depth-match"], 100)
        for r in reports:
            assert r.instances >= len(entries())
            assert r.violations == [] and r.capacity_errors == 0


def test_criterion_09_oracle_agreement():
    with criterion(9, "naive oracle agrees on 50 pairs (5 events; hh at 4 events)", 600):
        small, tiny = GenParams(max_events=5, seed=99), GenParams(max_events=4, seed=98)
        mismatches = []
        for e in entries():
            C, D = e.structures()
            if max(len(C.events), len(D.events)) > 5:
                continue
            for kind in ALL_KINDS:
                naive = (naive_hh_equivalent(C, D) if str(kind) == "hh"
                         else naive_equivalent(str(kind), C, D))
                if check(kind, C, D).equivalent != naive:
                    mismatches.append((e.name, str(kind)))
        for i in range(50):
            C, D, _ = generate_pair(small, i)
            for kind in ALL_KINDS:
                if str(kind) == "hh":
                    continue
                if check(kind, C, D).equivalent != naive_equivalent(str(kind), C, D):
                    mismatches.append((i, str(kind)))
            C, D, _ = generate_pair(tiny, i)
            if check("hh", C, D).equivalent != naive_hh_equivalent(C, D):
                mismatches.append((i, "hh"))
        assert mismatches == []


def test_criterion_10_properties():
    with criterion(10, "terms validate, witnesses replay, generation is reproducible", 60):
        rng = random.Random(10)
        for _ in range(300):
            t = random_term(rng, rng.randint(0, 6), ["a", "b", "c"])
            assert validate(translate(t)).stable
        pairs = [e.structures() for e in entries()]
        pairs += [generate_pair(GENERATED, i)[:2] for i in range(60)]
        replayed = 0
        for C, D in pairs:
            for kind in ALL_KINDS:
                v = check(kind, C, D, want_witness=True)
                if not v.equivalent:
                    assert replay_witness(kind, C, D, v.witness) == (True, None)
                    replayed += 1
        assert replayed > 0
        for mode in ("prime", "rejection", "gadget"):
            p = GenParams(max_events=8, seed=31337, mode=mode)
            assert generate(p).dumps() == generate(p).dumps()
        a = [tuple(s.dumps() for s in generate_pair(GENERATED, i)[:2]) for i in range(30)]
        b = [tuple(s.dumps() for s in generate_pair(GENERATED, i)[:2]) for i in range(30)]
        assert a == b


def test_gadget_coverage():
    with criterion(11, "gadget mode yields a stable non-prime structure within 100 instances",
                   60):
        found = 0
        for seed in range(100):
            r = validate(generate(GenParams(max_events=8, seed=seed, mode="gadget")))
            assert r.stable
            found += not r.primeIntersections
        assert found >= 1


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
