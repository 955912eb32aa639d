#!/usr/bin/env python3
"""Collar arcs, the collar audit and the cusp model."""
import math
from functools import lru_cache

import pytest

import hyptrig
from annulus import (band_arc, collar_arcs, collar_audit, cusp_arc, cusp_grid_max, cusp_model_experiment,
                     cusp_pair_bounds, cusp_truncation_max_winding, thin_length, thin_part_pairs)
from config import SearchSettings
from errors import DomainError
from geodesics import class_from_word
from hyptrig import ArcKind
from surface import build_surface, genus2_dumbbell

SETTINGS = SearchSettings(max_word_length=8, element_budget=200_000)


@lru_cache(maxsize=None)
def dumbbell_surface():
    return build_surface(genus2_dumbbell(0.1, 2.0, 2.0))


def gluing_class(group, name):
    return class_from_word(group, group.gluing_words[name])


def dual_class(group):
    label = next(g.label for g in group.generators if g.source == 'stable:loop0')
    return class_from_word(group, label)


def test_perpendicular_arc_is_type1():
    arc = band_arc(-1.0, 1.0, 1.0, 0.5, 'sep')
    assert arc.kind is ArcKind.TYPE1
    assert arc.winding == 0
    assert arc.length == pytest.approx(2.0)
    assert not arc.flagged


def test_type1_arc_winding():
    # endpoints far apart along the core make the arc wind
    arc = band_arc(-1.0, math.exp(3.0), 2.0, 0.5, 'sep')
    assert arc.kind is ArcKind.TYPE1
    assert arc.winding >= 1
    assert arc.length >= hyptrig.type1_length_lower(0.5, arc.winding) - 1e-9


def test_type2_arc_depth():
    arc = band_arc(1.0, 3.0, 2.0, 0.5, 'sep')
    assert arc.kind is ArcKind.TYPE2
    assert arc.depth == pytest.approx(math.acosh(2.0))
    assert band_arc(1.0, 3.0, 1.0, 0.5, 'sep') is None


def test_core_arc():
    arc = band_arc(0.0, math.inf, 1.0, 0.5, 'sep')
    assert arc.kind is ArcKind.CORE
    assert arc.length == 0.5


def test_gluing_curve_is_its_own_core():
    group = dumbbell_surface()
    arcs = collar_arcs(group, gluing_class(group, 'loop0'), 'loop0', settings=SETTINGS)
    assert [a.kind for a in arcs] == [ArcKind.CORE]


def test_dual_curve_crosses_the_collar():
    group = dumbbell_surface()
    arcs = collar_arcs(group, dual_class(group), 'loop0', settings=SETTINGS)
    assert len(arcs) == 1
    assert arcs[0].kind is ArcKind.TYPE1
    assert arcs[0].length >= hyptrig.type1_length_lower(2.0, arcs[0].winding) - 1e-9


def test_disjoint_curve_stays_outside_the_collar():
    group = dumbbell_surface()
    assert collar_arcs(group, gluing_class(group, 'sep'), 'loop0', settings=SETTINGS) == []
    assert thin_length(group, gluing_class(group, 'sep'), 'loop0', SETTINGS) == 0.0


def test_thin_part_crossings():
    group = dumbbell_surface()
    loop, dual = gluing_class(group, 'loop0'), dual_class(group)
    assert thin_part_pairs(group, loop, dual, 'loop0', SETTINGS) == 1
    assert thin_part_pairs(group, dual, dual, 'loop0', SETTINGS) == 0


def test_collar_audit_clean_on_simple_curves():
    group = dumbbell_surface()
    classes = [gluing_class(group, 'sep'), gluing_class(group, 'loop0'), dual_class(group)]
    simple = {c.word: True for c in classes}
    audit = collar_audit(group, classes, 'loop0', simple, SETTINGS)
    assert audit.cuff_length == pytest.approx(2.0)
    assert audit.findings == []
    assert len(audit.pair_rows) == 6


def test_cusp_arc_lengths():
    assert cusp_arc(5).length == pytest.approx(math.acosh(51.0), abs=1e-12)
    assert cusp_arc(1).length == pytest.approx(1.762747, abs=1e-6)
    with pytest.raises(DomainError):
        cusp_arc(0)
    with pytest.raises(DomainError):
        cusp_arc(2.0)


def test_cusp_bounds():
    assert cusp_pair_bounds(5, 9) == (5, 7)
    assert cusp_truncation_max_winding(0.1) == 20
    assert cusp_truncation_max_winding(0.5) == 4
    with pytest.raises(DomainError):
        cusp_truncation_max_winding(1.0)


def test_cusp_grid_maximum_is_diagonal():
    value, n, m = cusp_grid_max(20)
    assert n == m == 20
    assert value == pytest.approx(20 / cusp_arc(20).length ** 2)


def test_cusp_model_ratios():
    rows = cusp_model_experiment([0.1, 0.001, 1e-4])
    assert rows[0].predicted == pytest.approx(0.943058, abs=1e-6)
    assert rows[0].ratio == pytest.approx(0.389, abs=1e-3)
    assert rows[1].ratio == pytest.approx(0.6935, abs=1e-3)
    assert rows[2].ratio == pytest.approx(0.7556, abs=1e-3)
    assert [r.max_winding for r in rows] == [20, 2000, 20000]
    assert rows[1].ratio < rows[2].ratio
    with pytest.raises(DomainError):
        cusp_model_experiment([0.7])


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
