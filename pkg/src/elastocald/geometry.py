"""Smooth closed curves and open arcs with analytic derivatives.

Closed curves are 2*pi periodic in ``s`` and must run counter-clockwise, so the
outward normal is the right normal of the tangent and the unit tangent equals
``tau = (-nu_2, nu_1)``.  Open arcs are parameterized over ``t in [-1, 1]`` and
sampled through ``t = cos(theta)``; their normal is the left normal of the
parameterization direction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

DEGENERATE_SPEED = 1e-12


def _stack(x, y):
    return np.stack(np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float)), axis=-1)


@dataclass(frozen=True)
class NodeSet:
    """Geometric data at quadrature nodes; ``params`` are s (closed) or theta (arc)."""

    params: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    speed: np.ndarray
    sin_theta: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.params)

    @property
    def jacobian(self) -> np.ndarray:
        return self.speed


class _Curve:
    def __init__(self, position: Callable, derivative: Callable,
                 second: Optional[Callable] = None, name: str = "curve"):
        self._pos = position
        self._d1 = derivative
        self._d2 = second
        self.name = name

    def position(self, p):
        return self._pos(np.asarray(p, float))

    def derivative(self, p):
        return self._d1(np.asarray(p, float))

    def second_derivative(self, p):
        if self._d2 is None:
            raise NotImplementedError(f"{self.name} has no second derivative")
        return self._d2(np.asarray(p, float))

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


class ClosedCurve(_Curve):
    """Counter-clockwise 2*pi-periodic curve."""

    def frame(self, s):
        """Return ``(points, outward normals, unit tangents, speed)`` at parameters ``s``."""
        s = np.asarray(s, float)
        x = self.position(s)
        dx = self.derivative(s)
        speed = np.hypot(dx[..., 0], dx[..., 1])
        if np.any(speed < DEGENERATE_SPEED):
            raise ValueError(f"degenerate curve {self.name}: |x'| below {DEGENERATE_SPEED}")
        tangent = dx / speed[..., None]
        normal = np.stack([tangent[..., 1], -tangent[..., 0]], axis=-1)
        return x, normal, tangent, speed

    def curvature(self, s):
        dx = self.derivative(s)
        ddx = self.second_derivative(s)
        cross = dx[..., 0] * ddx[..., 1] - dx[..., 1] * ddx[..., 0]
        return cross / np.hypot(dx[..., 0], dx[..., 1]) ** 3

    def diameter(self, n: int = 256) -> float:
        pts = self.position(np.linspace(0, 2 * np.pi, n, endpoint=False))
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diff ** 2).sum(-1)).max())

    @classmethod
    def from_samples(cls, points, name: str = "sampled") -> "ClosedCurve":
        """Trigonometric interpolant through equispaced samples ``points`` (n, 2)."""
        pts = np.asarray(points, float)
        n = len(pts)
        coef = np.fft.fft(pts, axis=0) / n
        freqs = np.fft.fftfreq(n, 1.0 / n)
        if n % 2 == 0:
            coef[n // 2] *= 0.5
            coef = np.vstack([coef, coef[n // 2:n // 2 + 1]])
            freqs = np.append(freqs, n // 2)
            freqs[n // 2] = -n // 2

        def evaluate(s, order):
            s = np.asarray(s, float)
            phase = np.exp(1j * np.multiply.outer(s, freqs))
            factor = (1j * freqs) ** order
            return np.real(np.tensordot(phase * factor, coef, axes=([-1], [0])))

        return cls(lambda s: evaluate(s, 0), lambda s: evaluate(s, 1),
                   lambda s: evaluate(s, 2), name)


class OpenArc(_Curve):
    """Smooth arc x(t), t in [-1, 1]."""

    def frame_t(self, t):
        t = np.asarray(t, float)
        x = self.position(t)
        dx = self.derivative(t)
        speed = np.hypot(dx[..., 0], dx[..., 1])
        if np.any(speed < DEGENERATE_SPEED):
            raise ValueError(f"degenerate arc {self.name}: |x'| below {DEGENERATE_SPEED}")
        tangent = dx / speed[..., None]
        normal = np.stack([-tangent[..., 1], tangent[..., 0]], axis=-1)
        return x, normal, tangent, speed

    def frame(self, theta):
        """Geometry at ``t = cos(theta)``: points, normals, unit tangents tau, Jacobian.

        The returned tangent is ``tau = (-nu_2, nu_1)``, which points against
        increasing ``t``.
        """
        x, normal, tangent, speed = self.frame_t(np.cos(theta))
        return x, normal, -tangent, speed

    def jacobian(self, theta):
        return self.frame(theta)[3]

    def length(self, n: int = 200) -> float:
        # Gauss-Legendre in t: |x'(t)| is smooth on [-1, 1]
        t, w = np.polynomial.legendre.leggauss(n)
        return float(np.sum(w * np.linalg.norm(self.derivative(t), axis=-1)))

    def diameter(self, n: int = 256) -> float:
        pts = self.position(np.cos(np.linspace(0, np.pi, n)))
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diff ** 2).sum(-1)).max())

    @classmethod
    def from_samples(cls, points, name: str = "sampled-arc") -> "OpenArc":
        """Chebyshev interpolant through samples at t_j = cos((2j+1)pi/(2n))."""
        pts = np.asarray(points, float)
        n = len(pts)
        nodes = np.cos((2 * np.arange(n) + 1) * np.pi / (2 * n))
        cheb = np.polynomial.chebyshev
        cx = cheb.chebfit(nodes, pts[:, 0], n - 1)
        cy = cheb.chebfit(nodes, pts[:, 1], n - 1)
        dcx, dcy = cheb.chebder(cx), cheb.chebder(cy)
        ddcx, ddcy = cheb.chebder(dcx), cheb.chebder(dcy)
        return cls(lambda t: _stack(cheb.chebval(t, cx), cheb.chebval(t, cy)),
                   lambda t: _stack(cheb.chebval(t, dcx), cheb.chebval(t, dcy)),
                   lambda t: _stack(cheb.chebval(t, ddcx), cheb.chebval(t, ddcy)),
                   name)


# ---------------------------------------------------------------------------
# Node generation
# ---------------------------------------------------------------------------
def closed_params(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def closed_nodes(curve: ClosedCurve, n: int) -> NodeSet:
    """Equispaced nodes s_j = 2*pi*j/n; n must be even."""
    if n % 2 or n < 4:
        raise ValueError(f"closed node count must be even and >= 4, got {n}")
    s = closed_params(n)
    x, nu, tau, speed = curve.frame(s)
    return NodeSet(s, x, nu, tau, speed)


def arc_params(m: int) -> np.ndarray:
    return (2.0 * np.arange(m) + 1.0) * np.pi / (2.0 * m)


def arc_nodes(arc: OpenArc, m: int) -> NodeSet:
    """Interior nodes theta_j = (2j+1)pi/(2m), j = 0..m-1."""
    if m < 2:
        raise ValueError(f"arc mode count must be >= 2, got {m}")
    theta = arc_params(m)
    x, nu, tau, jac = arc.frame(theta)
    return NodeSet(theta, x, nu, tau, jac, np.sin(theta))


# ---------------------------------------------------------------------------
# Built-in shapes
# ---------------------------------------------------------------------------
def circle(r: float = 1.0, center=(0.0, 0.0)) -> ClosedCurve:
    cx, cy = center
    return ClosedCurve(lambda s: _stack(cx + r * np.cos(s), cy + r * np.sin(s)),
                       lambda s: _stack(-r * np.sin(s), r * np.cos(s)),
                       lambda s: _stack(-r * np.cos(s), -r * np.sin(s)),
                       f"circle:r={r}")


def ellipse(a: float = 2.0, b: float = 1.0) -> ClosedCurve:
    return ClosedCurve(lambda s: _stack(a * np.cos(s), b * np.sin(s)),
                       lambda s: _stack(-a * np.sin(s), b * np.cos(s)),
                       lambda s: _stack(-a * np.cos(s), -b * np.sin(s)),
                       f"ellipse:a={a},b={b}")


def kite() -> ClosedCurve:
    return ClosedCurve(
        lambda s: _stack(np.cos(s) + 0.65 * np.cos(2 * s) - 0.65, 1.5 * np.sin(s)),
        lambda s: _stack(-np.sin(s) - 1.3 * np.sin(2 * s), 1.5 * np.cos(s)),
        lambda s: _stack(-np.cos(s) - 2.6 * np.cos(2 * s), -1.5 * np.sin(s)),
        "kite")


def straight_arc() -> OpenArc:
    return OpenArc(lambda t: _stack(t, np.zeros_like(t)),
                   lambda t: _stack(np.ones_like(t), np.zeros_like(t)),
                   lambda t: _stack(np.zeros_like(t), np.zeros_like(t)),
                   "arc:straight")


def parabolic_arc(scale: float = 1.0) -> OpenArc:
    """x(t) = scale * (t, t^2)."""
    return OpenArc(lambda t: _stack(scale * t, scale * t * t),
                   lambda t: _stack(scale * np.ones_like(t), 2.0 * scale * t),
                   lambda t: _stack(np.zeros_like(t), 2.0 * scale * np.ones_like(t)),
                   f"arc:parabola" if scale == 1.0 else f"arc:parabola:scale={scale}")


def spiral_arc() -> OpenArc:
    """x(t) = r(t) (cos a(t), sin a(t)) with r = 1 + t/4, a = 3(t+1)/2."""
    def pos(t):
        r, a = 1.0 + 0.25 * t, 1.5 * (t + 1.0)
        return _stack(r * np.cos(a), r * np.sin(a))

    def d1(t):
        r, a = 1.0 + 0.25 * t, 1.5 * (t + 1.0)
        return _stack(0.25 * np.cos(a) - 1.5 * r * np.sin(a),
                      0.25 * np.sin(a) + 1.5 * r * np.cos(a))

    def d2(t):
        r, a = 1.0 + 0.25 * t, 1.5 * (t + 1.0)
        return _stack(-0.75 * np.sin(a) - 2.25 * r * np.cos(a),
                      0.75 * np.cos(a) - 2.25 * r * np.sin(a))

    return OpenArc(pos, d1, d2, "arc:spiral")


def _parse_kv(parts):
    out = {}
    for item in parts:
        if not item:
            continue
        key, _, value = item.partition("=")
        out[key.strip()] = float(value)
    return out


def parse_curve(text: str):
    """Build a curve from strings such as ``circle:r=1``, ``kite`` or ``arc:parabola``."""
    head, _, rest = text.strip().partition(":")
    head = head.lower()
    if head == "arc":
        kind, _, opts = rest.partition(":")
        kv = _parse_kv(opts.split(","))
        if kind == "straight":
            return straight_arc()
        if kind == "parabola":
            return parabolic_arc(kv.get("scale", 1.0))
        if kind == "spiral":
            return spiral_arc()
        raise ValueError(f"unknown arc kind {kind!r}")
    kv = _parse_kv(rest.split(","))
    if head == "circle":
        return circle(kv.get("r", 1.0))
    if head == "ellipse":
        return ellipse(kv.get("a", 2.0), kv.get("b", 1.0))
    if head == "kite":
        return kite()
    raise ValueError(f"unknown curve {text!r}")
