#!/usr/bin/env python3
"""Intersection numbers by axis linking."""
from functools import lru_cache

import numpy as np
import pytest

import intersect
from config import SearchSettings
from errors import IndeterminateError, OracleRefusal
from geodesics import class_from_word, enumerate_geodesics
from intersect import (LiftOrbits, crossing_points, intersection_matrix, intersection_number, intersection_oracle,
                       is_simple, self_intersection, shares_axis)
from surface import build_surface, genus2_dumbbell, genus2_theta, twist_conjugate
from words import inverse

SETTINGS = SearchSettings(max_word_length=8, element_budget=200_000, oracle_word_length=5, workers=2)


@lru_cache(maxsize=None)
def theta_surface():
    return build_surface(genus2_theta(2.0, 2.0, 2.0))


@lru_cache(maxsize=None)
def dumbbell_surface():
    return build_surface(genus2_dumbbell(0.1, 2.0, 2.0))


def gluing_class(group, name):
    return class_from_word(group, group.gluing_words[name])


def figure_eight(group):
    first, second, _ = group.pants_boundary_words[0]
    return class_from_word(group, first + inverse(second))


def stable_letter(group, gluing):
    return next(g.label for g in group.generators if g.source == f'stable:{gluing}')


def test_gluing_curves_are_disjoint_and_simple():
    group = theta_surface()
    c0, c1 = gluing_class(group, 'c0'), gluing_class(group, 'c1')
    result = intersection_number(group, c0, c1, SETTINGS)
    assert result.count == 0
    assert result.stabilized
    assert is_simple(group, c0, SETTINGS)


def test_figure_eight_has_one_self_crossing():
    group = theta_surface()
    result = self_intersection(group, figure_eight(group), SETTINGS)
    assert result.stabilized
    assert result.count == 1
    assert len(result.crossings) == 2


def test_figure_eight_misses_the_cuffs():
    group = theta_surface()
    eight = figure_eight(group)
    for name in ('c0', 'c1', 'c2'):
        assert intersection_number(group, eight, gluing_class(group, name), SETTINGS).count == 0


def test_power_of_simple_curve():
    group = theta_surface()
    square = class_from_word(group, group.gluing_words['c0'] * 2)
    assert square.power == 2
    assert self_intersection(group, square, SETTINGS).count == 1


def test_separating_curve_misses_the_loops():
    group = dumbbell_surface()
    sep = gluing_class(group, 'sep')
    for name in ('loop0', 'loop1'):
        assert intersection_number(group, sep, gluing_class(group, name), SETTINGS).count == 0


def test_dual_curve_crosses_its_loop_once():
    group = dumbbell_surface()
    dual = class_from_word(group, stable_letter(group, 'loop0'))
    loop = gluing_class(group, 'loop0')
    result = intersection_number(group, loop, dual, SETTINGS)
    assert result.stabilized
    assert result.count == 1
    assert intersection_number(group, dual, loop, SETTINGS).count == 1
    assert intersection_number(group, gluing_class(group, 'sep'), dual, SETTINGS).count == 0


def test_crossing_points_lie_in_upper_half_plane():
    group = dumbbell_surface()
    dual = class_from_word(group, stable_letter(group, 'loop0'))
    points = crossing_points(group, gluing_class(group, 'loop0'), dual, SETTINGS)
    assert len(points) == 1
    assert points[0].imag > 0


def test_oracle_agrees_on_short_classes():
    group = theta_surface()
    eight = figure_eight(group)
    c0 = gluing_class(group, 'c0')
    assert intersection_oracle(group, eight, eight, SETTINGS).count == 1
    assert intersection_oracle(group, c0, eight, SETTINGS).count == 0


def test_oracle_refuses_long_classes():
    group = theta_surface()
    eight = figure_eight(group)
    with pytest.raises(OracleRefusal):
        intersection_oracle(group, eight, eight, SearchSettings(oracle_cutoff=3.0))


def test_matrix_is_symmetric_with_self_counts_on_diagonal():
    group = theta_surface()
    classes = [gluing_class(group, 'c0'), gluing_class(group, 'c1'), figure_eight(group)]
    matrix, stabilized = intersection_matrix(group, classes, SETTINGS)
    assert stabilized
    assert (matrix == matrix.T).all()
    assert list(matrix.diagonal()) == [0, 0, 1]


def test_generators_of_thin_dumbbell_are_simple():
    group = dumbbell_surface()
    for label in group.labels:
        result = self_intersection(group, class_from_word(group, label), SETTINGS)
        assert result.stabilized, label
        assert result.count == 0, label


def test_dual_curve_power_crossings():
    group = dumbbell_surface()
    letter = stable_letter(group, 'loop0')
    loop = gluing_class(group, 'loop0')
    result = intersection_number(group, loop, class_from_word(group, letter * 2), SETTINGS)
    assert result.stabilized
    assert result.count == 2
    assert len(result.crossings) == 1


def test_intersection_is_bilinear_in_powers():
    group = theta_surface()
    base = intersection_number(group, class_from_word(group, 'ab'), class_from_word(group, 'cd'), SETTINGS)
    assert base.stabilized
    assert base.count >= 1
    for m in (1, 2, 3):
        for n in (1, 2, 3):
            result = intersection_number(group, class_from_word(group, 'ab' * m), class_from_word(group, 'cd' * n),
                                         SETTINGS)
            assert result.count == m * n * base.count, (m, n)


def test_self_intersection_of_powers():
    group = theta_surface()
    eight = figure_eight(group)
    root_word = group.pants_boundary_words[0][0] + inverse(group.pants_boundary_words[0][1])
    square = class_from_word(group, root_word * 2)
    assert square.power == 2
    assert self_intersection(group, square, SETTINGS).count == 4 * self_intersection(group, eight, SETTINGS).count + 1


def test_twist_by_a_full_loop_length_is_an_isometry():
    spec = genus2_dumbbell(0.1, 2.0, 2.0)
    twisted = build_surface(twist_conjugate(spec, 'loop0', 2.0))
    settings = SearchSettings(max_word_length=10, element_budget=200_000, workers=2)
    lengths = [c.length for c in enumerate_geodesics(dumbbell_surface(), 3.0, settings)]
    twisted_lengths = [c.length for c in enumerate_geodesics(twisted, 3.0, settings)]
    assert len(lengths) == len(twisted_lengths)
    assert twisted_lengths == pytest.approx(lengths, abs=1e-6)
    dual = class_from_word(twisted, stable_letter(twisted, 'loop0'))
    assert intersection_number(twisted, gluing_class(twisted, 'loop0'), dual, SETTINGS).count == 1


def test_oracle_agrees_with_axis_counts_on_thin_dumbbell():
    group = dumbbell_surface()
    settings = SearchSettings(max_word_length=8, element_budget=200_000, oracle_word_length=6, workers=2)
    classes = [c for c in enumerate_geodesics(group, 4.0, settings) if c.primitive][:6]
    compared = 0
    for i, a in enumerate(classes):
        for b in classes[i:]:
            oracle = intersection_oracle(group, a, b, settings)
            if not oracle.stabilized:
                continue
            compared += 1
            assert intersection_number(group, a, b, settings).count == oracle.count, (a.word, b.word)
    assert compared


def test_counts_respect_the_universal_bound():
    group = dumbbell_surface()
    classes = [c for c in enumerate_geodesics(group, 3.0, SETTINGS) if c.primitive]
    matrix, _ = intersection_matrix(group, classes, SETTINGS)
    systole = min(c.length for c in classes)
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            assert matrix[i, j] <= 4.0 / systole ** 2 * a.length * b.length + 1e-6


def test_matrix_marks_indeterminate_pairs(monkeypatch):
    group = theta_surface()
    classes = [gluing_class(group, 'c0'), figure_eight(group)]
    count = intersect.intersection_number

    def flaky(group, first, second, settings=None):
        if first.word != second.word:
            raise IndeterminateError("shared axis", first=first.word, second=second.word)
        return count(group, first, second, settings)

    monkeypatch.setattr(intersect, 'intersection_number', flaky)
    matrix, stabilized = intersection_matrix(group, classes, SETTINGS)
    assert not stabilized
    assert matrix[0, 1] == matrix[1, 0] == -1
    assert list(matrix.diagonal()) == [0, 1]


def test_shares_axis_recognizes_one_geodesic_in_two_words():
    group = dumbbell_surface()
    sep = gluing_class(group, 'sep')
    other_side = class_from_word(group, group.pants_boundary_words[1][0])
    assert shares_axis(group, sep, sep, SETTINGS)
    assert shares_axis(group, sep, other_side, SETTINGS)
    assert not shares_axis(group, sep, gluing_class(group, 'loop0'), SETTINGS)


def test_lift_orbits_merge_modulo_the_period():
    orbits = LiftOrbits(2.0, 1e-6)
    new = orbits.add_many(np.array([0, 0, 0, 1]), np.array([0.5, 2.5 + 1e-9, 0.7, 0.5]),
                          np.array([0.1, 0.1 - 1e-9, 0.1, 0.1]))
    assert list(new) == [True, False, True, True]
    assert orbits.count() == 2
    assert len(orbits) == 3


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
