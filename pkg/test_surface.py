#!/usr/bin/env python3
"""Surface construction from Fenchel-Nielsen data."""
from functools import lru_cache

import pytest

import moebius
from errors import SpecError
from surface import (PantsDecompositionSpec, build_surface, conjugate_group, genus2_dumbbell, genus2_theta,
                     gluing_holonomy, holonomy, load_spec, surface_check, twist_conjugate)
from words import inverse


@lru_cache(maxsize=None)
def theta_surface():
    return build_surface(genus2_theta(2.0, 2.0, 2.0))


@lru_cache(maxsize=None)
def dumbbell_surface():
    return build_surface(genus2_dumbbell(0.1, 2.0, 2.0))


def test_spec_validation():
    with pytest.raises(SpecError):
        PantsDecompositionSpec.from_dict({'pants': 3, 'gluings': []})
    with pytest.raises(SpecError):
        genus2_dumbbell(-0.1)
    with pytest.raises(SpecError):
        PantsDecompositionSpec.from_dict({
            'pants': 2,
            'gluings': [
                {'name': 'x', 'slots': [[0, 0], [1, 0]], 'length': 1.0},
                {'name': 'y', 'slots': [[0, 1], [1, 1]], 'length': 1.0},
                {'name': 'z', 'slots': [[0, 1], [1, 2]], 'length': 1.0},
            ],
        })


def test_spec_round_trip_through_dict():
    spec = genus2_theta(1.0, 2.0, 3.0, twists=(0.5, 0.0, -0.5))
    again = PantsDecompositionSpec.from_dict(spec.to_dict())
    assert again == spec


def test_load_spec_builders():
    spec = load_spec({'builder': 'dumbbell', 'short': 0.2, 'loops': [1.5, 2.5]})
    assert spec.gluing('sep').length == 0.2
    assert spec.gluing('loop1').length == 2.5
    assert load_spec({'builder': 'theta', 'lengths': [1, 2, 3]}).gluing('c2').length == 3.0
    with pytest.raises(SpecError):
        load_spec({'builder': 'dumbbell'})
    with pytest.raises(SpecError):
        load_spec({'builder': 'chain'})


def test_relations_and_cuff_lengths():
    for group in (theta_surface(), dumbbell_surface()):
        assert group.relation_residual <= 1e-8
        for gluing in group.decomposition.gluings:
            length = moebius.translation_length(gluing_holonomy(group, gluing.name))
            assert length == pytest.approx(gluing.length, abs=1e-8)


def test_pants_boundary_product_is_identity():
    group = theta_surface()
    for words in group.pants_boundary_words:
        product = holonomy(group, ''.join(words))
        assert product.isclose(moebius.MoebiusTransform.identity(), tolerance=1e-8)


def test_glued_cuffs_are_inverse_conjugates():
    group = dumbbell_surface()
    spec = group.decomposition
    for gluing in spec.gluings:
        first = holonomy(group, group.pants_boundary_words[gluing.first[0]][gluing.first[1]])
        second = holonomy(group, group.pants_boundary_words[gluing.second[0]][gluing.second[1]])
        assert abs(abs(first.trace) - abs(second.trace)) < 1e-8


def test_surface_check_ok():
    check = surface_check(dumbbell_surface(), radius=4.0, max_word_length=5, properness_bound=1.0)
    assert check.ok
    assert check.near_identity == 0
    assert check.properness_violations == ['loop0', 'loop1']


def test_twist_conjugate_keeps_lengths():
    spec = twist_conjugate(genus2_dumbbell(0.1), 'sep', 0.05)
    assert spec.gluing('sep').twist == pytest.approx(0.05)
    group = build_surface(spec)
    length = moebius.translation_length(gluing_holonomy(group, 'sep'))
    assert length == pytest.approx(0.1, abs=1e-8)
    with pytest.raises(SpecError):
        twist_conjugate(spec, 'missing', 1.0)


def test_conjugate_group_preserves_traces():
    group = theta_surface()
    S = moebius.MoebiusTransform(2.0, 1.0, 1.0, 1.0)
    moved = conjugate_group(group, S)
    a, b, c = group.labels[:3]
    for word in (a + b, a + b.upper(), a + b + c, inverse(a + c + b)):
        assert abs(holonomy(moved, word).trace) == pytest.approx(abs(holonomy(group, word).trace), rel=1e-9)


def test_element_ball_sorted_and_deduplicated():
    group = theta_surface()
    ball = group.ball(3.0, 6, 100_000)
    assert ball.words[0] == ''
    assert list(ball.metric) == sorted(ball.metric)
    assert ball.within(3.0) == len(ball)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
