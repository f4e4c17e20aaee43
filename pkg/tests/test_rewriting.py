import random

from cayleykit.presentation import presentation_from_strings
from cayleykit.rewriting import (
    CompletionBudget,
    critical_pairs,
    knuth_bendix_complete,
    verify_confluence,
)
from cayleykit.words import word_key


def test_z2_completes_to_sorted_normal_forms():
    p = presentation_from_strings("z2", ["a", "b"], ["abAB"])
    rs = knuth_bendix_complete(p)
    assert rs.confluent
    assert verify_confluence(rs)
    alpha = p.alphabet
    # normal forms are a-power then b-power
    assert rs.normal_form(alpha.parse_word("abaB")) == (1, 1)
    assert rs.normal_form(alpha.parse_word("ba")) == (1, 2)
    assert rs.normal_form(alpha.parse_word("abAB")) == ()
    assert rs.normal_form(alpha.parse_word("BBaa")) == (1, 1, -2, -2)


def test_free_group_trivial_rules():
    p = presentation_from_strings("f2", ["a", "b"], [])
    rs = knuth_bendix_complete(p)
    assert rs.confluent
    assert len(rs.rules) == 4  # the four cancellation rules only


def test_surface_budget_failure():
    p = presentation_from_strings("s", ["a", "b", "c", "d"], ["abABcdCD"])
    rs = knuth_bendix_complete(p, CompletionBudget(max_rules=2, max_equations=50))
    assert not rs.confluent


def test_rule_order_independence_on_confluent_system():
    """Rewriting by rules in randomized order reaches the same normal form."""
    p = presentation_from_strings("z2", ["a", "b"], ["abAB"])
    rs = knuth_bendix_complete(p)
    rng = random.Random(7)
    letters = [1, -1, 2, -2]
    for _ in range(200):
        w = tuple(rng.choice(letters) for _ in range(rng.randint(0, 10)))
        nf = rs.normal_form(w)
        # apply rules in random order until irreducible
        cur = list(w)
        while True:
            hits = []
            for lhs, rhs in rs.rules:
                for i in range(len(cur) - len(lhs) + 1):
                    if tuple(cur[i : i + len(lhs)]) == lhs:
                        hits.append((i, lhs, rhs))
            if not hits:
                break
            i, lhs, rhs = rng.choice(hits)
            cur[i : i + len(lhs)] = list(rhs)
        assert tuple(cur) == nf


def test_rules_strictly_decrease_shortlex():
    p = presentation_from_strings("z3", ["a", "b", "c"], ["abAB", "acAC", "bcBC"])
    rs = knuth_bendix_complete(p)
    assert rs.confluent
    for lhs, rhs in rs.rules:
        assert word_key(lhs) > word_key(rhs)


def test_critical_pairs_detect_nonconfluence():
    # rules {ba -> ab} alone with cancellation: the overlap b(aA) needs aA -> e
    r1 = ((2, 1), (1, 2))
    r2 = ((1, -1), ())
    pairs = critical_pairs(r1, r2)
    assert pairs  # ba|aA overlap exists
