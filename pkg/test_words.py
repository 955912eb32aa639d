#!/usr/bin/env python3
import pytest

from errors import UnknownLabelError
from geodesics import canonical_cyclic_form, word_root
from words import (cyclic_reduce, free_reduce, generator_labels, inverse, is_cyclically_reduced, parse_word,
                   shortlex_key)


def test_reductions():
    assert free_reduce('aAb') == 'b'
    assert free_reduce('abBA') == ''
    assert cyclic_reduce('Aba') == 'b'
    assert is_cyclically_reduced('ab')
    assert not is_cyclically_reduced('abA')
    assert inverse('abC') == 'cBA'


def test_canonical_form_is_conjugation_invariant():
    assert canonical_cyclic_form('ba') == 'ab'
    assert canonical_cyclic_form('AB') == 'ab'
    assert canonical_cyclic_form('cabC') == canonical_cyclic_form('ab')
    assert canonical_cyclic_form('aA') == ''


def test_parse_word_formats():
    labels = generator_labels(4)
    assert parse_word('abAB', labels) == 'abAB'
    assert parse_word('a b a^-1 b^-1', labels) == 'abAB'
    assert parse_word('a.b^{-1}', labels) == 'aB'
    with pytest.raises(UnknownLabelError):
        parse_word('ax', labels)


def test_shortlex_order():
    assert shortlex_key('a') < shortlex_key('A') < shortlex_key('b') < shortlex_key('aa')


def test_word_root():
    assert word_root('abab') == ('ab', 2)
    assert word_root('aaa') == ('a', 3)
    assert word_root('abA') == ('abA', 1)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
