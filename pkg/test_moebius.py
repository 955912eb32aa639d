#!/usr/bin/env python3
"""PSL(2, R) arithmetic and axis geometry."""
import math

import numpy as np
import pytest

import moebius
from errors import DomainError, IndeterminateError, NotHyperbolicError
from moebius import Axis, MoebiusTransform


def test_normalized_form():
    T = MoebiusTransform(-2.0, 0.0, 0.0, -0.5)
    assert T.a * T.d - T.b * T.c == pytest.approx(1.0)
    assert T.a > 0
    with pytest.raises(DomainError):
        MoebiusTransform(1.0, 2.0, 2.0, 4.0)


def test_compose_and_inverse():
    rng = np.random.default_rng(3)
    for _ in range(20):
        T = moebius.random_transform(rng)
        assert moebius.compose(T, T.inverse()).isclose(MoebiusTransform.identity())
        assert (T @ T).isclose(T.power(2))


def test_translation_length_and_axis():
    T = moebius.translation(2.0)
    assert moebius.translation_length(T) == pytest.approx(2.0)
    axis = moebius.axis_of(moebius.translation(1.0))
    assert axis.repelling == 0.0
    assert math.isinf(axis.attracting)
    assert moebius.trace_to_length(3.0) == pytest.approx(1.924847, abs=1e-6)
    with pytest.raises(NotHyperbolicError):
        moebius.trace_to_length(2.0)


def test_axis_of_conjugate():
    S = MoebiusTransform(1.0, 1.0, 0.0, 1.0)
    T = moebius.conjugate(S, moebius.translation(1.5))
    axis = moebius.axis_of(T)
    assert axis.repelling == pytest.approx(1.0)
    assert math.isinf(axis.attracting)
    assert axis.translation_length == pytest.approx(1.5)


def test_axes_cross():
    imaginary = Axis(0.0, math.inf, 1.0)
    assert moebius.axes_cross(imaginary, Axis(-1.0, 1.0, 1.0))
    assert not moebius.axes_cross(imaginary, Axis(1.0, 3.0, 1.0))
    with pytest.raises(IndeterminateError):
        moebius.axes_cross(imaginary, Axis(0.0, 2.0, 1.0))


def test_crossing_point_and_angle():
    imaginary = Axis(0.0, math.inf, 1.0)
    other = Axis(-1.0, 1.0, 1.0)
    z = moebius.crossing_point(imaginary, other)
    assert z == pytest.approx(1j)
    assert moebius.crossing_angle(imaginary, other) == pytest.approx(math.pi / 2)


def test_common_perpendicular():
    imaginary = Axis(0.0, math.inf, 1.0)
    other = Axis(1.0, 4.0, 1.0)
    on_x, on_y, length = moebius.common_perpendicular(imaginary, other)
    assert on_x == pytest.approx(2j)
    assert moebius.hyperbolic_distance(on_x, on_y) == pytest.approx(length)
    assert moebius.axis_distance(other, on_x) == pytest.approx(length, rel=1e-9)


def test_normalizer_sends_axis_to_imaginary_axis():
    axis = Axis(2.0, -3.0, 1.0)
    foot = moebius.foot_point(axis, 1j)
    N = moebius.normalizer(axis, foot)
    assert abs(N.apply(2.0)) < 1e-12
    assert math.isinf(N.apply(-3.0)) or abs(N.apply(-3.0)) > 1e12
    assert N.apply(foot) == pytest.approx(1j)


def test_stack_helpers_agree_with_scalar():
    rng = np.random.default_rng(5)
    transforms = [moebius.random_transform(rng) for _ in range(10)]
    mats = moebius.stack(transforms)
    p = 0.3 + 1.2j
    displacements = moebius.stack_displacement(mats, p)
    for T, value in zip(transforms, displacements):
        assert value == pytest.approx(moebius.displacement(T, p), abs=1e-9)
    traces = moebius.stack_traces(mats)
    assert traces == pytest.approx([T.trace for T in transforms])


def test_boundary_to_circle():
    assert moebius.boundary_to_circle(math.inf) == 1.0
    assert moebius.boundary_to_circle(0.0) == 0.0
    assert moebius.boundary_to_circle(1.0) == pytest.approx(0.5)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
