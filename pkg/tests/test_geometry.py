import numpy as np
import pytest
from hypothesis import given, strategies as st

from elastocald.geometry import (ClosedCurve, OpenArc, arc_nodes, circle, closed_nodes, ellipse,
                                 kite, parabolic_arc, parse_curve, spiral_arc, straight_arc)

CLOSED = [circle(), ellipse(), kite()]
ARCS = [straight_arc(), parabolic_arc(), spiral_arc()]


@pytest.mark.parametrize("curve", CLOSED, ids=lambda c: c.name)
def test_closed_frame_orientation(curve):
    s = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    x, nu, tau, speed = curve.frame(s)
    np.testing.assert_allclose(np.linalg.norm(nu, axis=1), 1.0)
    np.testing.assert_allclose(tau, np.stack([-nu[:, 1], nu[:, 0]], -1))
    # counter-clockwise: signed area positive, normal points outward
    dx = curve.derivative(s)
    area = 0.5 * np.mean(x[:, 0] * dx[:, 1] - x[:, 1] * dx[:, 0]) * 2 * np.pi
    assert area > 0
    centroid = x.mean(axis=0)
    if curve.name.startswith(("circle", "ellipse")):
        assert np.all(np.sum((x - centroid) * nu, axis=1) > 0)


@pytest.mark.parametrize("curve", CLOSED + ARCS, ids=lambda c: c.name)
def test_derivatives_match_finite_differences(curve):
    p = np.linspace(-0.9, 0.9, 7)
    h = 1e-6
    fd = (curve.position(p + h) - curve.position(p - h)) / (2 * h)
    np.testing.assert_allclose(curve.derivative(p), fd, atol=1e-8)
    fd2 = (curve.derivative(p + h) - curve.derivative(p - h)) / (2 * h)
    np.testing.assert_allclose(curve.second_derivative(p), fd2, atol=1e-7)


def test_arc_frame_conventions():
    arc = parabolic_arc()
    theta = np.linspace(0.1, 3.0, 9)
    x, nu, tau, jac = arc.frame(theta)
    t = np.cos(theta)
    np.testing.assert_allclose(jac, np.sqrt(1 + 4 * t * t))
    np.testing.assert_allclose(tau, np.stack([-nu[:, 1], nu[:, 0]], -1))
    # tau points along increasing theta
    fd = arc.position(np.cos(theta + 1e-6)) - arc.position(np.cos(theta - 1e-6))
    assert np.all(np.sum(fd * tau, axis=1) > 0)


def test_lengths_and_curvature():
    assert straight_arc().length() == pytest.approx(2.0, rel=1e-12)
    assert parabolic_arc().length() == pytest.approx(np.sqrt(5) + np.arcsinh(2) / 2, rel=1e-6)
    np.testing.assert_allclose(circle(2.0).curvature(np.linspace(0, 6, 5)), 0.5)


def test_node_sets():
    ns = closed_nodes(circle(), 8)
    assert ns.n == 8
    np.testing.assert_allclose(ns.points[2], [0.0, 1.0], atol=1e-15)
    an = arc_nodes(straight_arc(), 2)
    np.testing.assert_allclose(an.params, [np.pi / 4, 3 * np.pi / 4])
    with pytest.raises(ValueError):
        closed_nodes(circle(), 7)
    with pytest.raises(ValueError):
        arc_nodes(straight_arc(), 1)


def test_degenerate_curve_rejected():
    flat = ClosedCurve(lambda s: np.stack([np.cos(s), 0 * s], -1),
                       lambda s: np.stack([0 * s, 0 * s], -1), name="point")
    with pytest.raises(ValueError, match="degenerate"):
        flat.frame(np.array([0.0]))


@given(st.integers(min_value=3, max_value=12))
def test_from_samples_reproduces_ellipse(k):
    n = 2 * k + 6
    s = 2 * np.pi * np.arange(n) / n
    c = ClosedCurve.from_samples(ellipse(1.5, 0.7).position(s))
    probe = np.linspace(0.05, 6.2, 11)
    np.testing.assert_allclose(c.position(probe), ellipse(1.5, 0.7).position(probe), atol=1e-12)
    np.testing.assert_allclose(c.derivative(probe), ellipse(1.5, 0.7).derivative(probe), atol=1e-11)


def test_arc_from_samples():
    n = 12
    t = np.cos((2 * np.arange(n) + 1) * np.pi / (2 * n))
    arc = OpenArc.from_samples(parabolic_arc().position(t))
    probe = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(arc.position(probe), parabolic_arc().position(probe), atol=1e-12)
    np.testing.assert_allclose(arc.derivative(probe), parabolic_arc().derivative(probe), atol=1e-11)


@pytest.mark.parametrize("spec,kind,name", [
    ("circle:r=2", ClosedCurve, "circle:r=2.0"), ("ellipse:a=3,b=1", ClosedCurve, "ellipse:a=3.0,b=1.0"),
    ("kite", ClosedCurve, "kite"), ("arc:straight", OpenArc, "arc:straight"),
    ("arc:parabola", OpenArc, "arc:parabola"), ("arc:spiral", OpenArc, "arc:spiral"),
    ("arc:parabola:scale=2", OpenArc, "arc:parabola:scale=2.0")])
def test_parse_curve(spec, kind, name):
    c = parse_curve(spec)
    assert isinstance(c, kind)
    assert c.name == name


@pytest.mark.parametrize("spec", ["square", "arc:zigzag", "circle:r=abc"])
def test_parse_curve_errors(spec):
    with pytest.raises(ValueError):
        parse_curve(spec)
