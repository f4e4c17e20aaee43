import pytest
from hypothesis import given, strategies as st

from cayleykit.errors import ParseError
from cayleykit.words import (
    Alphabet,
    cyclic_normal_form,
    cyclic_reduce,
    free_multiply,
    free_reduce,
    invert,
    word_key,
)

letters = st.integers(min_value=1, max_value=3).flatmap(
    lambda k: st.sampled_from([k, -k])
)
words = st.lists(letters, max_size=24).map(tuple)


def test_parse_and_format_roundtrip():
    a = Alphabet(["a", "b"])
    w = a.parse_word("abAB")
    assert w == (1, 2, -1, -2)
    assert a.format_word(w) == "abAB"


def test_parse_multichar_names():
    a = Alphabet(["s1", "s2"])
    assert a.parse_word("s1s2S1") == (1, 2, -1)
    assert a.format_word((1, 2, -1)) == "s1s2S1"


def test_parse_unknown_symbol_position():
    a = Alphabet(["a"])
    with pytest.raises(ParseError) as exc:
        a.parse_word("aeA")
    assert exc.value.column == 2


def test_duplicate_generator_rejected():
    with pytest.raises(ParseError):
        Alphabet(["a", "a"])


def test_free_reduce_examples():
    assert free_reduce((1, -1, 2)) == (2,)
    assert free_reduce(()) == ()
    assert free_reduce((1, 2, -2, -1)) == ()


@given(words)
def test_free_reduce_idempotent_and_shorter(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    assert len(r) <= len(w)


@given(words)
def test_inverse_cancels(w):
    assert free_multiply(free_reduce(w), invert(free_reduce(w))) == ()


@given(words)
def test_cyclic_reduce_conjugates(w):
    pre, core = cyclic_reduce(w)
    assert free_reduce(tuple(pre) + core + invert(pre)) == free_reduce(w)
    assert not (len(core) >= 2 and core[0] == -core[-1])


@given(words)
def test_cyclic_normal_form_rotation_invariant(w):
    _, core = cyclic_reduce(w)
    if core:
        rotated = core[1:] + core[:1]
        assert cyclic_normal_form(core) == cyclic_normal_form(rotated)
        assert cyclic_normal_form(core) == cyclic_normal_form(invert(core))


def test_shortlex_order():
    assert word_key((1,)) < word_key((-1,))
    assert word_key((-1,)) < word_key((2,))
    assert word_key((2, 2)) > word_key((-2,))
