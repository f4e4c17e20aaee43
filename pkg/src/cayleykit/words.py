"""Words over a finite generating set.

A letter is a nonzero int: ``+k`` is the k-th generator (1-based), ``-k``
its formal inverse.  A word is a tuple of letters; the empty tuple is the
identity.  The canonical letter order interleaves inverses with their
generators (a < a^-1 < b < b^-1 < ...), which fixes the shortlex order
used everywhere for deterministic tie-breaking.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Tuple

from .errors import ParseError

Word = Tuple[int, ...]

EMPTY: Word = ()


def letter_key(letter: int) -> int:
    """Total order on letters: +1, -1, +2, -2, ..."""
    return (abs(letter) - 1) * 2 + (0 if letter > 0 else 1)


def word_key(word: Sequence[int]):
    """Shortlex sort key: length first, then letterwise order."""
    return (len(word), tuple(letter_key(l) for l in word))


def shortlex_less(u: Sequence[int], v: Sequence[int]) -> bool:
    return word_key(u) < word_key(v)


def invert(word: Sequence[int]) -> Word:
    return tuple(-l for l in reversed(word))


def free_reduce(word: Iterable[int]) -> Word:
    """Unique freely reduced word equal to the input in the free group."""
    out: list[int] = []
    for l in word:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def free_multiply(u: Sequence[int], v: Sequence[int]) -> Word:
    """Freely reduced product of two already reduced words."""
    out = list(u)
    for l in v:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def is_reduced(word: Sequence[int]) -> bool:
    return all(word[i] != -word[i + 1] for i in range(len(word) - 1))


def cyclic_reduce(word: Sequence[int]) -> Tuple[Word, Word]:
    """Return (conjugator, core) with word = conjugator . core . conjugator^-1.

    The core is freely and cyclically reduced.
    """
    w = list(free_reduce(word))
    pre: list[int] = []
    while len(w) >= 2 and w[0] == -w[-1]:
        pre.append(w[0])
        w = w[1:-1]
    return tuple(pre), tuple(w)


def cyclic_rotations(word: Sequence[int]):
    w = tuple(word)
    return [w[i:] + w[:i] for i in range(len(w))] or [EMPTY]


def cyclic_normal_form(word: Sequence[int]) -> Word:
    """Least rotation (shortlex) among rotations of the word and its inverse.

    Used to deduplicate relators and cells up to based orientation.
    """
    _, core = cyclic_reduce(word)
    if not core:
        return EMPTY
    candidates = cyclic_rotations(core) + cyclic_rotations(invert(core))
    return min(candidates, key=word_key)


class Alphabet:
    """Named generators with parsing and formatting of letter strings.

    The external word grammar: a word is a concatenation of generator
    names, where capitalizing the first character denotes the inverse
    (``abAB`` is a.b.a^-1.b^-1).  Multi-character names are matched
    greedily, longest first.
    """

    def __init__(self, names: Sequence[str]):
        if not names:
            raise ParseError("empty generator list")
        seen = set()
        for name in names:
            if not name or not name[0].isalpha() or not name.isalnum():
                raise ParseError(f"invalid generator name {name!r}")
            if name[0].isupper():
                raise ParseError(
                    f"generator name {name!r} must start lowercase (uppercase marks inverses)"
                )
            if name in seen:
                raise ParseError(f"duplicate generator name {name!r}")
            seen.add(name)
        self.names = list(names)
        self._index = {name: i + 1 for i, name in enumerate(names)}
        # longest-match table: name or capitalized name -> signed index
        self._match = {}
        for name, i in self._index.items():
            self._match[name] = i
            self._match[name[0].upper() + name[1:]] = -i
        self._lengths = sorted({len(n) for n in self._match}, reverse=True)

    def __len__(self) -> int:
        return len(self.names)

    @property
    def letters(self) -> Tuple[int, ...]:
        """All letters in canonical order: +1, -1, +2, -2, ..."""
        out = []
        for i in range(1, len(self.names) + 1):
            out.extend((i, -i))
        return tuple(out)

    def parse_word(self, text: str, line=None, column_offset=0) -> Word:
        word = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            for n in self._lengths:
                chunk = text[pos : pos + n]
                if chunk in self._match:
                    word.append(self._match[chunk])
                    pos += n
                    break
            else:
                raise ParseError(
                    f"unknown generator symbol at {text[pos:]!r}",
                    line=line,
                    column=column_offset + pos + 1,
                )
        return tuple(word)

    def format_word(self, word: Sequence[int]) -> str:
        out = []
        for l in word:
            name = self.names[abs(l) - 1]
            out.append(name if l > 0 else name[0].upper() + name[1:])
        return "".join(out)
