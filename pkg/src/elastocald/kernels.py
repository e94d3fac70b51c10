"""Fundamental solution of time-harmonic elasticity and the kernels built on it.

Every kernel here is a linear combination of ``H_n(k r)`` values with
coefficients that are rational in ``r`` and free of logarithms.  Replacing
``H_n`` by ``(2i/pi) J_n`` in the same formulas therefore yields the smooth
coefficient multiplying ``ln r``; all functions take ``part="full"`` or
``part="log"`` to select between the two.

Arrays are vectorized over leading dimensions: points are ``(..., 2)`` and
tensor kernels are ``(..., 2, 2)``.  Gradients are stored as ``[..., k, i, j]``
meaning the derivative in direction ``k`` of entry ``(i, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .material import Material, constants
from .special_fn import bessel_j_all, hankel1_regular_all

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
"""Quarter-turn rotation A; ``A @ nu`` is the unit tangent."""

_R_FLOOR = 1e-150


@dataclass
class Radial:
    """Radial profiles of ``Pi = a I + b e e^T`` and of the scalar helpers.

    ``da``/``db`` are r-derivatives; ``gs``/``gp`` are the scalar Helmholtz
    kernels at the shear/pressure wavenumbers and ``dg`` the r-derivative of
    ``gs - gp``.
    """

    a: np.ndarray
    b: np.ndarray
    da: np.ndarray
    db: np.ndarray
    gs: np.ndarray
    gp: np.ndarray
    dg: np.ndarray


def _check_part(part):
    if part not in ("full", "log"):
        raise ValueError(f"part must be 'full' or 'log', got {part!r}")


def radial(m: Material, r, part: str = "full") -> Radial:
    """Radial profiles at distances ``r`` (r = 0 allowed only for ``part='log'``)."""
    _check_part(part)
    r = np.asarray(r, float)
    if m.omega == 0.0:
        return _radial_static(m, r, part)
    rr = np.where(r > 0.0, r, _R_FLOOR)
    ks, kp = m.ks, m.kp
    if part == "full":
        if np.any(r <= 0.0):
            raise ValueError("full kernels are singular at r = 0")
        h0s, h1s, h2s = hankel1_regular_all(ks * rr)
        h0p, h1p, h2p = hankel1_regular_all(kp * rr)
        # pole terms of k H1(k r) and k^2 H2(k r) do not depend on k and cancel
        d1 = ks * h1s - kp * h1p
        d2 = ks * ks * h2s - kp * kp * h2p
        h1s_plain = h1s - 2j / (np.pi * ks * rr)
        h1p_plain = h1p - 2j / (np.pi * kp * rr)
        d3 = ks ** 3 * h1s_plain - kp ** 3 * h1p_plain
    else:
        scale = 2j / np.pi
        j0s, j1s, j2s = bessel_j_all(ks * rr)
        j0p, j1p, j2p = bessel_j_all(kp * rr)
        h0s, h0p = scale * j0s, scale * j0p
        h1s_plain = scale * j1s
        d1 = scale * (ks * j1s - kp * j1p)
        d2 = scale * (ks * ks * j2s - kp * kp * j2p)
        d3 = scale * (ks ** 3 * j1s - kp ** 3 * j1p)
    c = 1j / (4.0 * m.rho * m.omega ** 2)
    a = (1j / (4.0 * m.mu)) * h0s - c * d1 / rr
    b = c * d2
    da = -(1j / (4.0 * m.mu)) * ks * h1s_plain + c * d2 / rr
    db = c * d3 - 2.0 * b / rr
    return Radial(*(np.asarray(v, complex) for v in
                    (a, b, da, db, 0.25j * h0s, 0.25j * h0p, -0.25j * d1)))


def _radial_static(m, r, part):
    pc = constants(m)
    zero = np.zeros(r.shape)
    if part == "log":
        a = np.full(r.shape, -pc.c1, dtype=complex)
        g = np.full(r.shape, -1.0 / (2.0 * np.pi), dtype=complex)
        return Radial(a, zero + 0j, zero + 0j, zero + 0j, g, g, zero + 0j)
    if np.any(r <= 0.0):
        raise ValueError("full kernels are singular at r = 0")
    logr = np.log(r)
    g = np.asarray(-logr / (2.0 * np.pi), complex)
    return Radial(np.asarray(-pc.c1 * logr, complex), np.full(r.shape, pc.c2, dtype=complex),
                  np.asarray(-pc.c1 / r, complex), zero + 0j, g, g, zero + 0j)


def _geometry(x, y):
    d = np.asarray(x, float) - np.asarray(y, float)
    r = np.hypot(d[..., 0], d[..., 1])
    e = d / np.where(r > 0.0, r, 1.0)[..., None]
    return r, e


def _outer(u, v):
    return u[..., :, None] * v[..., None, :]


def _pi_from(rad, e):
    eye = np.eye(2)
    return rad.a[..., None, None] * eye + rad.b[..., None, None] * _outer(e, e)


def displacement(m: Material, x, y, part: str = "full") -> np.ndarray:
    """Fundamental displacement tensor ``Pi(x, y)``, shape ``(..., 2, 2)``."""
    r, e = _geometry(x, y)
    return _pi_from(radial(m, r, part), e)


def _grad_from(rad, r, e):
    eye = np.eye(2)
    rr = np.where(r > 0.0, r, 1.0)
    ek = e[..., :, None, None]
    ei = e[..., None, :, None]
    ej = e[..., None, None, :]
    eee = ek * ei * ej
    dik = eye[:, :, None]
    djk = eye[:, None, :]
    dij = eye[None, :, :]
    b_over_r = np.where(r > 0.0, rad.b / rr, 0.0)[..., None, None, None]
    return (rad.da[..., None, None, None] * ek * dij
            + rad.db[..., None, None, None] * eee
            + b_over_r * (dik * ej + djk * ei - 2.0 * eee))


def grad_x(m: Material, x, y, part: str = "full") -> np.ndarray:
    """Gradient of ``Pi`` with respect to ``x``, indexed ``[..., k, i, j]``.

    The gradient with respect to ``y`` is the negative of this.
    """
    r, e = _geometry(x, y)
    return _grad_from(radial(m, r, part), r, e)


def traction(m: Material, grad: np.ndarray, nu) -> np.ndarray:
    """Generalized traction of each column of a displacement gradient.

    ``grad[..., k, i, j]`` is the derivative in direction ``k`` of component
    ``i`` of column ``j``; the result ``T[..., i, j]`` is the traction of
    column ``j`` with respect to the unit normal ``nu``.
    """
    nu = np.asarray(nu, float)
    tau = np.stack([-nu[..., 1], nu[..., 0]], axis=-1)
    normal_part = np.einsum("...k,...kij->...ij", nu, grad)
    div = grad[..., 0, 0, :] + grad[..., 1, 1, :]
    curl = grad[..., 1, 0, :] - grad[..., 0, 1, :]
    return ((m.mu + m.mu_tilde) * normal_part
            + m.lambda_tilde * nu[..., :, None] * div[..., None, :]
            + m.mu_tilde * tau[..., :, None] * curl[..., None, :])


def double_layer(m: Material, x, y, ny, part: str = "full") -> np.ndarray:
    """Kernel of the double layer: ``(T_y Pi(x, y))^T`` with normal ``ny`` at ``y``."""
    g = -grad_x(m, x, y, part)
    return np.swapaxes(traction(m, g, ny), -1, -2)


def adjoint_double_layer(m: Material, x, y, nx, part: str = "full") -> np.ndarray:
    """Kernel of the adjoint double layer: ``T_x Pi(x, y)`` with normal ``nx`` at ``x``."""
    return traction(m, grad_x(m, x, y, part), nx)


@dataclass
class HyperParts:
    """Integrands of the regularized hypersingular operator.

    ``T_x D psi = int pin psi + d_tau_x int v d_tau_y psi
    + int r1 d_tau_y psi + d_tau_x int r2 psi``.
    """

    pin: np.ndarray
    v: np.ndarray
    r1: np.ndarray
    r2: np.ndarray


def hyper_parts(m: Material, x, y, nx, ny, part: str = "full") -> HyperParts:
    """Integrands of the regularized hypersingular operator at ``(x, y)``.

    ``pin = rho w^2 [((nu_x . nu_y) I - nu_x nu_y^T) G_s + G_p nu_x nu_y^T]
    + mu_tilde k_s^2 G_s (nu_y nu_x^T - nu_x nu_y^T)``, ``v = (mu + mu_tilde)^2
    A Pi A + 2 (mu + mu_tilde) G_s I`` and ``r1``, ``r2`` couple the gradient
    of ``G_s - G_p`` to the normals.
    """
    nx = np.asarray(nx, float)
    ny = np.asarray(ny, float)
    r, e = _geometry(x, y)
    rad = radial(m, r, part)
    pi = _pi_from(rad, e)
    mm = m.mu + m.mu_tilde
    eye = np.eye(2)
    rw2 = m.rho * m.omega ** 2
    gs = rad.gs[..., None, None]
    gp = rad.gp[..., None, None]
    dot = np.sum(nx * ny, axis=-1)[..., None, None]
    nxny = _outer(nx, ny)
    pin = (-rw2 * (nxny - dot * eye) * gs
           + m.mu_tilde * m.ks ** 2 * gs * (_outer(ny, nx) - nxny)
           + rw2 * gp * nxny)
    v = mm ** 2 * (ROT @ pi @ ROT) + 2.0 * mm * gs * eye
    grad_g = rad.dg[..., None] * e
    r1 = -mm * _outer(nx, grad_g) @ ROT
    r2 = mm * ROT @ _outer(grad_g, ny)
    return HyperParts(pin, v, r1, r2)


def static_v(m: Material, x, y, part: str = "full") -> np.ndarray:
    """Static kernel ``-c1_t ln r I + c2_t e e^T`` of the regularized hypersingular operator."""
    _check_part(part)
    pc = constants(m)
    r, e = _geometry(x, y)
    eye = np.eye(2)
    if part == "log":
        return np.broadcast_to(-pc.c1_t * eye, r.shape + (2, 2)).astype(complex)
    return (-pc.c1_t * np.log(r))[..., None, None] * eye + pc.c2_t * _outer(e, e) + 0j
