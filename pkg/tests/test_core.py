import json

import pytest
from hypothesis import given, settings, strategies as st

from revbisim.core import (CapacityError, ConfigStructure, InputError, NotStableError,
                           auto_concurrency, causality, check_capacity, choice, depths, lift,
                           minimal_events, par, prefix, rename, require_stable, slice_depths, slice_geq,
                           slice_leq, validate)
from revbisim.corpus import exclusive_switch, parallel_switch
from revbisim.oracle import naive_stable
from revbisim.terms import translate


def cs(configs, labels):
    return ConfigStructure([list(c) for c in configs], labels)


def test_parallel_switch_fails_only_bounded_intersections():
    r = validate(parallel_switch())
    assert r.rooted and r.connected and r.boundedUnions
    assert not r.boundedIntersections
    assert r.witnesses["boundedIntersections"] == (frozenset("0b"), frozenset("1b"), frozenset("01b"))
    assert "boundedIntersections: FAIL [{0,b},{1,b} <= {0,1,b}]" in r.lines()
    assert not r.stable


def test_exclusive_switch_is_stable_but_not_prime():
    r = validate(exclusive_switch())
    assert r.stable
    assert not r.primeIntersections


def test_missing_root():
    r = validate(cs([["a"]], {"a": "a"}))
    assert not r.rooted
    assert r.lines()[0] == "rooted: FAIL"


def test_disconnected():
    r = validate(cs([[], ["a", "b"]], {"a": "a", "b": "b"}))
    assert not r.connected
    assert r.witnesses["connected"] == (frozenset("ab"),)


def test_bounded_unions_failure():
    # {a} and {b} are both below {a,b,c} but {a,b} is missing
    s = cs([[], ["a"], ["b"], ["a", "b", "c"], ["a", "c"]], {"a": "x", "b": "x", "c": "y"})
    assert not validate(s).boundedUnions


def test_require_stable_raises():
    with pytest.raises(NotStableError):
        require_stable(parallel_switch())


@pytest.mark.parametrize("doc, message", [
    ({"events": []}, "needs"),
    ({"events": [{"id": "a", "label": "x"}, {"id": "a", "label": "y"}],
      "configurations": [[]]}, "twice"),
    ({"events": [{"id": "a", "label": "x"}], "configurations": [[], ["b"]]}, "b"),
    ({"events": [{"id": "a", "label": "x"}, {"id": "b", "label": "x"}],
      "configurations": [[], ["b", "a"]]}, "sorted"),
])
def test_malformed_documents(doc, message):
    with pytest.raises(InputError, match=message):
        ConfigStructure.from_dict(doc)


def test_duplicate_configuration_rejected():
    with pytest.raises(InputError):
        cs([[], ["a"], ["a"]], {"a": "a"})


def test_round_trip_exchange_format():
    s = translate("(a | b) + a.b")
    again = ConfigStructure.loads(s.dumps())
    assert again == s
    doc = json.loads(s.dumps())
    assert all(c == sorted(c) for c in doc["configurations"])


def test_causality_of_sequence():
    s = translate("a.b")
    ctx = causality(s, {"e1", "e2"})
    assert ctx.lt("e1", "e2") and not ctx.lt("e2", "e1")
    assert ctx.concurrent == frozenset()
    assert depths(s, {"e1", "e2"}) == {"e1": 1, "e2": 2}


def test_causality_of_parallel():
    s = translate("a | b")
    ctx = causality(s, {"e1", "e2"})
    assert ctx.co("e1", "e2")
    assert ctx.concurrent == {frozenset({"e1", "e2"})}


def test_or_causation_is_per_configuration():
    s = exclusive_switch()
    assert causality(s, {"0", "b"}).lt("0", "b")
    assert causality(s, {"1", "b"}).lt("1", "b")
    assert causality(s, {"0", "1"}).co("0", "1")


def test_unknown_configuration():
    with pytest.raises(InputError):
        causality(translate("a.b"), {"e2"})


def test_minimal_events_and_slices():
    s = translate("a.b.c | d")
    X = frozenset(s.events)
    assert minimal_events(s, X) == {"e1", "e4"}
    assert slice_leq(s, X, 1) == {"e1", "e4"}
    assert slice_geq(s, X, 2) == {"e2", "e3"}
    assert slice_depths(s, X, 2, 2) == {"e2"}


def test_lift_residual_structure():
    s = translate("a.b + c")
    lifted = lift(s, {"e1"})
    assert lifted.configurations == (frozenset(), frozenset({"e2"}))
    assert lifted.label("e2") == "b"


def test_lift_requires_minimal_set():
    with pytest.raises(InputError):
        lift(translate("a.b"), {"e1", "e2"})


def test_auto_concurrency_reports():
    r = auto_concurrency(translate("a | a"))
    assert r.hasAutoConcurrency and r.hasEquidepthAutoConcurrency
    r = auto_concurrency(translate("a | b.a"))
    assert r.hasAutoConcurrency and not r.hasEquidepthAutoConcurrency
    r = auto_concurrency(translate("a.a"))
    assert not r.hasAutoConcurrency


def test_combinators():
    a, b = translate("a"), rename(translate("b"), "r")
    assert len(par(a, b).configurations) == 4
    assert len(choice(a, b).configurations) == 3
    seq = prefix("x", "c", a)
    assert len(seq.configurations) == 3
    assert validate(seq).stable


def test_capacity_guard(monkeypatch):
    s = translate("a | b | c")
    monkeypatch.setenv("CSR_MAX_EVENTS", "2")
    with pytest.raises(CapacityError):
        check_capacity(s)
    monkeypatch.setenv("CSR_MAX_EVENTS", "3")
    check_capacity(s)


# random small families against the axioms as literally stated

families = st.sets(st.frozensets(st.sampled_from("abc")), max_size=8)


@settings(max_examples=300, deadline=None)
@given(families)
def test_validate_agrees_with_naive_axioms(family):
    events = sorted(set().union(*family)) if family else []
    s = ConfigStructure([sorted(c) for c in family], {e: "x" for e in events})
    assert validate(s).stable == naive_stable(s)


@settings(max_examples=200, deadline=None)
@given(families)
def test_prime_test_matches_closure(family):
    events = sorted(set().union(*family)) if family else []
    s = ConfigStructure([sorted(c) for c in family], {e: "x" for e in events})
    closed = all(X & Y in family for X in family for Y in family)
    assert validate(s).primeIntersections == closed
