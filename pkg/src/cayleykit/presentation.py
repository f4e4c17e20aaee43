"""Finite group presentations: parsing, Dehn's algorithm, augmentation.

The presentation file grammar is line oriented UTF-8:

    name: <identifier>
    gens: <id> <id> ...
    rel: <word>           # zero or more
    # comments and blank lines are ignored

A word concatenates generator names; capitalizing the first character
denotes the inverse (``abAB`` = a.b.a^-1.b^-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import ParseError, PreconditionError, BudgetError
from .words import (
    Alphabet,
    Word,
    cyclic_normal_form,
    cyclic_reduce,
    cyclic_rotations,
    free_reduce,
    invert,
    word_key,
)


@dataclass(frozen=True)
class GroupPresentation:
    name: str
    alphabet: Alphabet
    relators: Tuple[Word, ...]
    augmentation_bound: Optional[int] = None

    @property
    def generators(self) -> Sequence[str]:
        return self.alphabet.names

    def format_relators(self):
        return [self.alphabet.format_word(r) for r in self.relators]

    def symmetrized_relators(self) -> Tuple[Word, ...]:
        """All cyclic rotations of all relators and their inverses."""
        seen = []
        seen_set = set()
        for r in self.relators:
            _, core = cyclic_reduce(r)
            for w in (core, invert(core)):
                for rot in cyclic_rotations(w):
                    if rot and rot not in seen_set:
                        seen_set.add(rot)
                        seen.append(rot)
        return tuple(seen)


def parse_presentation(text: str) -> GroupPresentation:
    """Parse the external presentation file format.

    Rejects duplicate generators, relators with unknown symbols, and
    relators that freely reduce to the empty word.
    """
    name = None
    gens: Optional[list] = None
    relator_specs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(f"expected 'key: value', got {line!r}", line=lineno)
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "name":
            name = value
        elif key == "gens":
            if gens is not None:
                raise ParseError("duplicate gens: line", line=lineno)
            gens = value.split()
            if not gens:
                raise ParseError("empty generator list", line=lineno)
        elif key == "rel":
            relator_specs.append((lineno, value))
        else:
            raise ParseError(f"unknown key {key!r}", line=lineno)
    if gens is None:
        raise ParseError("missing gens: line")
    alphabet = Alphabet(gens)
    relators = []
    for lineno, spec in relator_specs:
        if not spec:
            continue
        word = alphabet.parse_word(spec, line=lineno)
        reduced = free_reduce(word)
        if not reduced:
            raise ParseError(
                f"relator {spec!r} freely reduces to the empty word", line=lineno
            )
        relators.append(reduced)
    return GroupPresentation(
        name=name or "anonymous",
        alphabet=alphabet,
        relators=tuple(relators),
    )


def presentation_from_strings(name, gens, relator_strings) -> GroupPresentation:
    alphabet = Alphabet(list(gens))
    relators = []
    for s in relator_strings:
        w = free_reduce(alphabet.parse_word(s))
        if not w:
            raise ParseError(f"relator {s!r} freely reduces to the empty word")
        relators.append(w)
    return GroupPresentation(name=name, alphabet=alphabet, relators=tuple(relators))


# ---------------------------------------------------------------------------
# Metric small cancellation and Dehn's algorithm


def enumerate_pieces(presentation: GroupPresentation):
    """Maximal piece length among symmetrized relators.

    A piece is a common prefix of two distinct members of the symmetrized
    relator set (all rotations of all relators and inverses).
    """
    sym = presentation.symmetrized_relators()
    longest = 0
    for i, u in enumerate(sym):
        for v in sym[i + 1 :]:
            n = 0
            for a, b in zip(u, v):
                if a != b:
                    break
                n += 1
            longest = max(longest, n)
    return longest


def is_c_prime_sixth(presentation: GroupPresentation) -> bool:
    """Metric C'(1/6) check by exhaustive piece enumeration."""
    if not presentation.relators:
        return False
    shortest = min(len(r) for r in presentation.relators)
    return enumerate_pieces(presentation) * 6 < shortest


class DehnTable:
    """Precomputed long-subword replacements for greedy Dehn reduction.

    Maps every subword s with ``2|s| > |r|`` of a symmetrized relator r to
    the inverse of its complement, which is strictly shorter.  Ambiguous
    subwords keep the shortlex-least replacement.
    """

    def __init__(self, presentation: GroupPresentation):
        self.table = {}
        self.max_len = 0
        for rel in presentation.symmetrized_relators():
            n = len(rel)
            for cut in range(n // 2 + 1, n + 1):
                s = rel[:cut]
                repl = invert(rel[cut:])
                if s not in self.table or word_key(repl) < word_key(self.table[s]):
                    self.table[s] = repl
                self.max_len = max(self.max_len, cut)

    def leftmost_longest(self, word: Sequence[int]):
        """First position (scanning left to right) with the longest match there."""
        n = len(word)
        for start in range(n):
            for length in range(min(self.max_len, n - start), 0, -1):
                s = tuple(word[start : start + length])
                if s in self.table:
                    return start, length, self.table[s]
        return None


def dehn_reduce(presentation: GroupPresentation, word: Sequence[int]) -> Word:
    """Greedy Dehn reduction of a based word.

    Repeatedly replaces the leftmost-longest subword that is more than half
    of a symmetrized relator by the shorter complement, then freely
    reduces.  Under C'(1/6) (or a full augmentation set) the result is
    empty exactly when the word is trivial; the final triviality check
    scans cyclically so based stalls cannot hide a trivial word.
    """
    if not presentation.relators and presentation.augmentation_bound is None:
        return free_reduce(word)
    if not is_c_prime_sixth(presentation) and presentation.augmentation_bound is None:
        raise PreconditionError(
            f"presentation {presentation.name!r} fails C'(1/6) and carries no augmentation"
        )
    table = DehnTable(presentation)
    w = list(free_reduce(word))
    while True:
        hit = table.leftmost_longest(w)
        if hit is None:
            # peel conjugating letters and retry on the cyclic core
            pre, core = cyclic_reduce(w)
            if pre and core:
                reduced_core = dehn_reduce_core(table, list(core))
                candidate = free_reduce(tuple(pre) + reduced_core + invert(pre))
                if len(candidate) < len(w):
                    w = list(candidate)
                    continue
            break
        start, length, repl = hit
        w[start : start + length] = list(repl)
        w = list(free_reduce(w))
    if w and is_trivial(presentation, tuple(w), _table=table):
        return ()
    return tuple(w)


def dehn_reduce_core(table: DehnTable, w: list) -> Word:
    while True:
        hit = table.leftmost_longest(w)
        if hit is None:
            return tuple(free_reduce(w))
        start, length, repl = hit
        w[start : start + length] = list(repl)
        w = list(free_reduce(w))


def is_trivial(presentation: GroupPresentation, word: Sequence[int], _table=None) -> bool:
    """Exact word-problem decision for C'(1/6) (or augmented) presentations.

    Works on the cyclic word, so wrapped relator subwords are found; valid
    by Greendlinger's lemma.
    """
    table = _table or DehnTable(presentation)
    _, w = cyclic_reduce(word)
    while w:
        # scan the doubled word so matches may wrap the base point
        doubled = w + w[: min(len(w), table.max_len) - 1]
        found = None
        n = len(w)
        for start in range(n):
            for length in range(min(table.max_len, n), 0, -1):
                s = doubled[start : start + length]
                if len(s) == length and s in table.table:
                    found = (start, length, table.table[s])
                    break
            if found:
                break
        if not found:
            return False
        start, length, repl = found
        rotated = w[start:] + w[:start]
        rotated = repl + rotated[length:]
        _, w = cyclic_reduce(rotated)
    return True


# ---------------------------------------------------------------------------
# Augmentation: adjoin all short trivial words as relators


def augmentation_cost(n_generators: int, bound: int) -> int:
    """Upper bound on the number of freely reduced words shorter than bound."""
    k = 2 * n_generators
    total = 0
    count = 1
    for length in range(1, bound):
        count = k if length == 1 else count * (k - 1)
        total += count
    return total


def augment_presentation(
    presentation: GroupPresentation,
    bound: int,
    solver,
    guard: int = 5_000_000,
) -> GroupPresentation:
    """Adjoin as relators all trivial words of length < bound.

    ``solver`` decides triviality (a zoo oracle or Dehn).  The adjoined set
    is closed under cyclic permutation and inversion.  Raises BudgetError
    when the enumeration would exceed ``guard`` candidate words; the bound
    is a user parameter precisely because it is only known after
    measurement.
    """
    n = len(presentation.alphabet)
    cost = augmentation_cost(n, bound)
    if cost > guard:
        raise BudgetError(
            f"augmentation to length {bound} would enumerate about {cost} words",
            reached=guard,
        )
    letters = presentation.alphabet.letters
    canonical = set()
    for r in presentation.relators:
        canonical.add(cyclic_normal_form(r))

    def extend(word):
        if (
            len(word) >= 2
            and word[0] != -word[-1]
            and cyclic_normal_form(word) not in canonical
            and solver.is_trivial(word)
        ):
            canonical.add(cyclic_normal_form(word))
        if len(word) + 1 >= bound:
            return
        for l in letters:
            if word and word[-1] == -l:
                continue
            extend(word + (l,))

    for l in letters:
        extend((l,))

    closed = set()
    for w in canonical:
        if not w:
            continue
        for u in (w, invert(w)):
            for rot in cyclic_rotations(u):
                closed.add(rot)
    relators = sorted(closed, key=word_key)
    return GroupPresentation(
        name=presentation.name,
        alphabet=presentation.alphabet,
        relators=tuple(relators),
        augmentation_bound=bound,
    )
