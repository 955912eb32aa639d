#!/usr/bin/env python3
"""Closed geodesic enumeration."""
from functools import lru_cache

import numpy as np
import pytest

import hyptrig
import moebius
from config import SearchSettings
from errors import EnumerationBudgetError
from geodesics import (axis_offsets, canonical_cyclic_form, certify_spectrum, class_from_word, enumerate_geodesics,
                       enumerate_spectrum, find_class, power_class, systole)
from surface import build_surface, genus2_dumbbell, genus2_theta
from words import inverse

SETTINGS = SearchSettings(max_word_length=8, element_budget=200_000, workers=2)


@lru_cache(maxsize=None)
def dumbbell_surface():
    return build_surface(genus2_dumbbell(0.1, 2.0, 2.0))


@lru_cache(maxsize=None)
def theta_surface():
    return build_surface(genus2_theta(2.0, 2.0, 2.0))


@lru_cache(maxsize=None)
def dumbbell_short_spectrum():
    return enumerate_geodesics(dumbbell_surface(), 0.35, SETTINGS)


def test_axis_offsets_vertical_and_circle():
    offsets = axis_offsets(np.array([0.0, -1.0]), np.array([np.inf, 1.0]), [1j, 2j])
    assert offsets[0] == pytest.approx(0.0)
    assert offsets[1] == pytest.approx(0.0)
    far = axis_offsets(np.array([1.0]), np.array([np.inf]), [1j])
    assert far[0] == pytest.approx(np.arcsinh(1.0))


def test_systole_is_short_separating_curve():
    cls, length = systole(dumbbell_surface(), SETTINGS)
    assert length == pytest.approx(0.1, abs=1e-9)
    assert cls.primitive


def test_powers_of_systole_are_listed():
    classes = dumbbell_short_spectrum()
    lengths = [c.length for c in classes]
    assert lengths == pytest.approx([0.1, 0.2, 0.3], abs=1e-8)
    assert [c.primitive for c in classes] == [True, False, False]
    assert [c.power for c in classes] == [1, 2, 3]
    assert classes[1].root_word == classes[0].word


def test_power_class():
    root = dumbbell_short_spectrum()[0]
    cube = power_class(root, 3)
    assert cube.length == pytest.approx(0.3, abs=1e-9)
    assert not cube.primitive
    assert cube.power == 3


def test_gluing_curves_appear_in_spectrum():
    group = theta_surface()
    classes = enumerate_geodesics(group, 2.2, SETTINGS)
    assert classes
    assert all(c.length <= 2.2 + 1e-9 for c in classes)
    for name, word in group.gluing_words.items():
        cls = class_from_word(group, word)
        assert cls.length == pytest.approx(2.0, abs=1e-8)
        assert any(abs(c.length - 2.0) < 1e-8 for c in classes)
    _, length = systole(group, SETTINGS)
    assert length <= 2.0 + 1e-8


def test_lengths_are_conjugation_invariant():
    group = theta_surface()
    a, b, c = group.labels[:3]
    first = class_from_word(group, a + b + c)
    second = class_from_word(group, b + c + a)
    third = class_from_word(group, inverse(a + b + c))
    assert first.word == second.word == third.word
    assert first.length == pytest.approx(second.length, rel=1e-10)


def test_class_from_word_powers():
    group = theta_surface()
    a, b = group.labels[:2]
    cls = class_from_word(group, (a + b) * 3)
    assert cls.power == 3
    assert not cls.primitive
    assert cls.root_word == canonical_cyclic_form(a + b)
    single = class_from_word(group, a + b)
    assert cls.length == pytest.approx(3 * single.length, rel=1e-9)


def test_find_class():
    classes = dumbbell_short_spectrum()
    assert find_class(classes, classes[0].word) is classes[0]
    assert find_class(classes, 'zz') is None


def test_certify_spectrum_stabilizes():
    _, _, stabilized = certify_spectrum(dumbbell_surface(), 0.35, SETTINGS)
    assert stabilized


def test_word_length_cap_marks_spectrum_incomplete():
    capped = SearchSettings(max_word_length=4, element_budget=200_000)
    spectrum = enumerate_spectrum(dumbbell_surface(), 2.5, capped)
    assert spectrum.truncated_by == 'word_length'
    assert not spectrum.complete
    first, wider, _ = certify_spectrum(dumbbell_surface(), 2.5, capped)
    assert not first.complete
    assert len(wider.classes) >= len(first.classes)


def test_budget_error_carries_partial_result():
    tiny = SearchSettings(max_word_length=8, element_budget=50)
    with pytest.raises(EnumerationBudgetError) as info:
        enumerate_spectrum(theta_surface(), 4.0, tiny)
    assert info.value.certified_cutoff >= 0.0
    assert all(c.length <= info.value.certified_cutoff + 1e-9 for c in info.value.partial)


def test_figure_eight_length_matches_formula():
    group = theta_surface()
    first, second, _ = group.pants_boundary_words[0]
    cls = class_from_word(group, first + inverse(second))
    assert cls.length == pytest.approx(hyptrig.figure_eight_length(2.0, 2.0, 2.0), abs=1e-6)
    assert moebius.translation_length(cls.matrix) == pytest.approx(cls.length)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
