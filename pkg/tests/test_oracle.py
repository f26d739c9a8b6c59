"""The naive checkers on hand-known cases, and agreement with the engine."""

import pytest

from revbisim.equivalences import ALL_KINDS, check
from revbisim.genprop import GenParams, generate_pair
from revbisim.oracle import (Naive, SearchBudgetExceeded, naive_equivalent,
                             naive_hh_equivalent, naive_isomorphisms)
from revbisim.terms import translate

E = frozenset


def test_naive_order_and_depth():
    n = Naive(translate("a.b | c"))
    X = E({"e1", "e2", "e3"})
    assert n.lt(X) == {("e1", "e2")}
    assert n.depth(X, "e2") == 2 and n.depth(X, "e3") == 1


def test_naive_isomorphisms_count():
    s = translate("a | a")
    n = Naive(s)
    full = E(s.events)
    assert len(naive_isomorphisms(n, full, n, full)) == 2
    t = Naive(translate("a.a"))
    assert naive_isomorphisms(n, full, t, E({"e1", "e2"})) == []


@pytest.mark.parametrize("kind, left, right, want", [
    ("ib", "a | a", "a.a", True),
    ("sb", "a | a", "a.a", False),
    ("rb", "a | a", "a.a", True),
    ("rb", "a | b", "a.b + b.a", False),
    ("db", "a | b", "(a | b) + a.b", False),
    ("rsb", "a", "a + a", True),
])
def test_naive_known_verdicts(kind, left, right, want):
    assert naive_equivalent(kind, translate(left), translate(right)) == want


def test_naive_hh():
    assert naive_hh_equivalent(translate("a"), translate("a + a"))
    assert not naive_hh_equivalent(translate("a | a"), translate("(a | a) + a.a"))


def test_budget():
    C, D = translate("a | a | a"), translate("a.a.a + (a | a | a)")
    with pytest.raises(SearchBudgetExceeded):
        naive_equivalent("rb", C, D, budget=1)


def test_agreement_on_small_generated_pairs():
    params = GenParams(max_events=4, seed=21)
    for i in range(15):
        C, D, _ = generate_pair(params, i)
        for kind in ALL_KINDS:
            if str(kind) == "hh":
                want = naive_hh_equivalent(C, D)
            else:
                want = naive_equivalent(str(kind), C, D)
            assert check(kind, C, D).equivalent == want, (kind, C.to_dict(), D.to_dict())
