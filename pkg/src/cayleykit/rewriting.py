"""Knuth-Bendix completion for group presentations, shortlex ordered.

Rules are pairs of letter tuples (lhs, rhs) with lhs strictly greater in
shortlex.  The free-group cancellation rules (x.x^-1 -> empty) are always
part of the system.  Completion either terminates within budget with a
confluent system, or returns a partial system flagged non-confluent whose
rules are still sound consequences of the relators (usable as a reducer,
not as a normal form).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import PreconditionError
from .presentation import GroupPresentation
from .words import Word, word_key


@dataclass
class CompletionBudget:
    max_rules: int = 2000
    max_lhs_len: int = 24
    max_equations: int = 200_000


@dataclass
class RewritingSystem:
    n_generators: int
    rules: Tuple[Tuple[Word, Word], ...]
    confluent: bool
    budget: CompletionBudget
    equations_processed: int = 0

    def _index(self) -> Dict[int, List[Tuple[Word, Word]]]:
        by_first = getattr(self, "_by_first", None)
        if by_first is None:
            by_first = {}
            for lhs, rhs in self.rules:
                by_first.setdefault(lhs[0], []).append((lhs, rhs))
            for bucket in by_first.values():
                bucket.sort(key=lambda r: -len(r[0]))
            self._by_first = by_first
        return by_first

    def rewrite(self, word: Sequence[int]) -> Word:
        """Reduce to an irreducible word (leftmost, longest-lhs-first)."""
        w = list(word)
        by_first = self._index()
        changed = True
        while changed:
            changed = False
            i = 0
            while i < len(w):
                bucket = by_first.get(w[i])
                if bucket:
                    for lhs, rhs in bucket:
                        n = len(lhs)
                        if tuple(w[i : i + n]) == lhs:
                            w[i : i + n] = list(rhs)
                            i = max(0, i - self.budget.max_lhs_len)
                            changed = True
                            break
                    else:
                        i += 1
                else:
                    i += 1
        return tuple(w)

    def normal_form(self, word: Sequence[int]) -> Word:
        if not self.confluent:
            raise PreconditionError(
                "rewriting system is not confluent; normal forms are not canonical"
            )
        return self.rewrite(word)


def _orient(u: Word, v: Word) -> Optional[Tuple[Word, Word]]:
    ku, kv = word_key(u), word_key(v)
    if ku == kv:
        return None
    return (u, v) if ku > kv else (v, u)


def _inverse_rules(n_generators: int) -> List[Tuple[Word, Word]]:
    rules = []
    for i in range(1, n_generators + 1):
        rules.append(((i, -i), ()))
        rules.append(((-i, i), ()))
    return rules


def _reduce_with(rules: List[Tuple[Word, Word]], word: Word) -> Word:
    w = list(word)
    changed = True
    while changed:
        changed = False
        for i in range(len(w)):
            for lhs, rhs in rules:
                n = len(lhs)
                if n <= len(w) - i and tuple(w[i : i + n]) == lhs:
                    w[i : i + n] = list(rhs)
                    changed = True
                    break
            if changed:
                break
    return tuple(w)


def critical_pairs(r1: Tuple[Word, Word], r2: Tuple[Word, Word]):
    """Overlap and inclusion ambiguities between two rules."""
    (l1, rh1), (l2, rh2) = r1, r2
    pairs = []
    # suffix of l1 overlaps prefix of l2
    for k in range(1, min(len(l1), len(l2)) + (0 if l1 == l2 else 1)):
        if l1[len(l1) - k :] == l2[:k]:
            whole_via_1 = rh1 + l2[k:]
            whole_via_2 = l1[: len(l1) - k] + rh2
            pairs.append((whole_via_1, whole_via_2))
    # l2 strictly inside l1
    if len(l2) < len(l1):
        for i in range(len(l1) - len(l2) + 1):
            if l1[i : i + len(l2)] == l2:
                pairs.append((rh1, l1[:i] + rh2 + l1[i + len(l2) :]))
    return pairs


def knuth_bendix_complete(
    presentation: GroupPresentation,
    budget: Optional[CompletionBudget] = None,
) -> RewritingSystem:
    """Run completion on the presentation's relator equations.

    ``confluent`` is True only if the equation queue emptied within budget
    with every critical pair resolving; otherwise the partial rule set is
    returned with ``confluent`` False and callers must fall back to bounded
    search or another oracle.
    """
    budget = budget or CompletionBudget()
    n = len(presentation.alphabet)
    rules: List[Tuple[Word, Word]] = list(_inverse_rules(n))
    queue = deque((r, ()) for r in presentation.relators)
    complete = True
    processed = 0

    def enqueue_pairs(rule):
        for other in list(rules):
            for a, b in critical_pairs(rule, other) + critical_pairs(other, rule):
                queue.append((a, b))

    for rule in list(rules):
        enqueue_pairs(rule)

    while queue:
        processed += 1
        if processed > budget.max_equations or len(rules) > budget.max_rules:
            complete = False
            break
        u, v = queue.popleft()
        u = _reduce_with(rules, u)
        v = _reduce_with(rules, v)
        oriented = _orient(u, v)
        if oriented is None:
            continue
        lhs, rhs = oriented
        if len(lhs) > budget.max_lhs_len:
            complete = False
            continue
        # interreduce: pull out rules whose sides the new rule touches
        keep = []
        for old in rules:
            ol, orh = old
            contains = any(
                ol[i : i + len(lhs)] == lhs for i in range(len(ol) - len(lhs) + 1)
            )
            if contains:
                queue.append((ol, orh))
            else:
                if any(
                    orh[i : i + len(lhs)] == lhs
                    for i in range(len(orh) - len(lhs) + 1)
                ):
                    queue.append((ol, orh))
                else:
                    keep.append(old)
        rules = keep
        rules.append((lhs, rhs))
        enqueue_pairs((lhs, rhs))

    rules_sorted = tuple(sorted(rules, key=lambda r: (word_key(r[0]), word_key(r[1]))))
    return RewritingSystem(
        n_generators=n,
        rules=rules_sorted,
        confluent=complete,
        budget=budget,
        equations_processed=processed,
    )


def verify_confluence(system: RewritingSystem) -> bool:
    """Independent critical-pair check: every ambiguity joins to one word."""
    rules = list(system.rules)
    for r1 in rules:
        for r2 in rules:
            for a, b in critical_pairs(r1, r2):
                if system.rewrite(a) != system.rewrite(b):
                    return False
    return True
