"""Nystrom matrices of the elastic layer operators on smooth closed curves.

Each kernel ``k(s, sigma)`` (including the arc-length factor where the operator
integrates against ``ds``) is split as

    k = K1 ln(4 sin^2((s - sigma)/2)) + Kc cot((sigma - s)/2) + K2

with ``K1`` half the coefficient of ``ln r``, ``Kc`` a constant Cauchy residue
and ``K2`` smooth.  ``K1`` and ``Kc`` are integrated by exact trigonometric
product rules, ``K2`` by the trapezoidal rule.  The diagonal of ``K2`` is the
limit of symmetric averages, obtained by Richardson extrapolation in ``h^2``.

Unknowns interleave the two displacement components per node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .geometry import ClosedCurve, closed_nodes, NodeSet
from .material import Material, constants, require_admissible

RICHARDSON_LEVELS = 4
RICHARDSON_H = 2e-2
RICHARDSON_KH = 5e-2


@dataclass
class OperatorMatrix:
    """Dense ``2n x 2n`` operator with its discretization metadata."""

    entries: np.ndarray
    n: int
    omega: float
    curve: str
    kind: str
    material: Optional[Material] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.entries.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"entries shape {self.entries.shape} does not match n={self.n}")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError(f"non-finite entries in {self.kind} matrix")

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            if other.n != self.n:
                raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")
            return OperatorMatrix(self.entries @ other.entries, self.n, self.omega,
                                  self.curve, f"{self.kind}{other.kind}", self.material)
        return self.entries @ other

    def header(self) -> dict:
        h = {"kind": self.kind, "n": self.n, "omega": self.omega, "curve": self.curve}
        if self.material is not None:
            h["material"] = self.material.as_dict()
        h.update(self.extra)
        return h


# ---------------------------------------------------------------------------
# Quadrature weights
# ---------------------------------------------------------------------------
def log_weights(n: int) -> np.ndarray:
    """Weights ``R[i, j]`` with ``int ln(4 sin^2((s_i - t)/2)) f(t) dt ~ sum_j R[i, j] f_j``."""
    k = n // 2
    d = np.subtract.outer(np.arange(n), np.arange(n)) * (2.0 * np.pi / n)
    m = np.arange(1, k)
    r = -(2.0 * np.pi / k) * np.tensordot(np.cos(np.multiply.outer(d, m)), 1.0 / m, axes=1)
    return r - (np.pi / k ** 2) * np.cos(k * d)


def cot_weights(n: int) -> np.ndarray:
    """Weights for ``int cot((t - s_i)/2) f(t) dt`` (principal value)."""
    k = n // 2
    d = np.subtract.outer(np.arange(n), np.arange(n)) * (2.0 * np.pi / n)
    m = np.arange(1, k)
    return -(4.0 * np.pi / n) * np.sin(np.multiply.outer(d, m)).sum(-1)


def spectral_diff(n: int) -> np.ndarray:
    """Derivative matrix of the trigonometric interpolant at equispaced nodes."""
    idx = np.subtract.outer(np.arange(n), np.arange(n))
    h = 2.0 * np.pi / n
    with np.errstate(divide="ignore"):
        d = 0.5 * (-1.0) ** idx / np.tan(idx * h / 2.0)
    d[idx == 0] = 0.0
    return d


def _richardson_weights(levels: int) -> np.ndarray:
    x = np.arange(1, levels + 1, dtype=float) ** 2
    w = np.ones(levels)
    for k in range(levels):
        for j in range(levels):
            if j != k:
                w[k] *= x[j] / (x[j] - x[k])
    return w


def to_block(blocks: np.ndarray) -> np.ndarray:
    """``(n, n, 2, 2)`` node blocks to an interleaved ``(2n, 2n)`` matrix."""
    n = blocks.shape[0]
    return blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)


def expand(mat: np.ndarray) -> np.ndarray:
    """Scalar ``(n, n)`` node operator acting on both components."""
    return np.kron(mat, np.eye(2))


# ---------------------------------------------------------------------------
# Generic singular-kernel assembly
# ---------------------------------------------------------------------------
KernelFn = Callable[[str, np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _evaluate(kern: KernelFn, curve: ClosedCurve, s, sigma, use_speed: bool, cauchy):
    """Full kernel and its ``ln(4 sin^2)`` split pieces at parameter pairs."""
    x, nx, _, _ = curve.frame(s)
    y, ny, _, sp = curve.frame(sigma)
    full = kern("full", x, y, nx, ny)
    log = kern("log", x, y, nx, ny)
    if use_speed:
        full = full * sp[..., None, None]
        log = log * sp[..., None, None]
    k1 = 0.5 * log
    lg = np.log(4.0 * np.sin(0.5 * (s - sigma)) ** 2)
    k2 = full - k1 * lg[..., None, None]
    if cauchy is not None:
        k2 = k2 - np.multiply.outer(1.0 / np.tan(0.5 * (sigma - s)), cauchy)
    return k1, k2


def richardson_step(curve, omega_scale: float) -> float:
    """Base offset for the diagonal extrapolation, small against the wavelength."""
    speed = curve.frame(np.linspace(0, 2 * np.pi, 64, endpoint=False))[3].max()
    if omega_scale > 0.0:
        return min(RICHARDSON_H, RICHARDSON_KH / (omega_scale * speed))
    return RICHARDSON_H


def singular_matrix(kern: KernelFn, curve: ClosedCurve, n: int, *, use_speed: bool = True,
                    cauchy: Optional[np.ndarray] = None, wavenumber: float = 0.0) -> np.ndarray:
    """Nystrom node blocks ``(n, n, 2, 2)`` for a kernel with log (and Cauchy) singularity."""
    s = 2.0 * np.pi * np.arange(n) / n
    si, sj = np.meshgrid(s, s, indexing="ij")
    off = ~np.eye(n, dtype=bool)
    k1 = np.zeros((n, n, 2, 2), dtype=complex)
    k2 = np.zeros((n, n, 2, 2), dtype=complex)
    k1[off], k2[off] = _evaluate(kern, curve, si[off], sj[off], use_speed, cauchy)

    # diagonal: log coefficient at coincidence, smooth part by extrapolation
    x, nx, _, sp = curve.frame(s)
    log0 = kern("log", x, x, nx, nx)
    if use_speed:
        log0 = log0 * sp[:, None, None]
    k1[~off] = 0.5 * log0
    h0 = richardson_step(curve, wavenumber)
    weights = _richardson_weights(RICHARDSON_LEVELS)
    diag = np.zeros((n, 2, 2), dtype=complex)
    for level, w in enumerate(weights, start=1):
        h = level * h0
        _, plus = _evaluate(kern, curve, s, s + h, use_speed, cauchy)
        _, minus = _evaluate(kern, curve, s, s - h, use_speed, cauchy)
        diag += w * 0.5 * (plus + minus)
    k2[~off] = diag

    blocks = log_weights(n)[:, :, None, None] * k1 + (2.0 * np.pi / n) * k2
    if cauchy is not None:
        blocks = blocks + np.multiply.outer(cot_weights(n), cauchy)
    return blocks


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------
def _require_dynamic(m: Material, check: bool = True):
    if check:
        require_admissible(m)
    if m.omega <= 0.0:
        raise ValueError("dynamic assembly requires omega > 0; use the static operators")


def _name(curve):
    return getattr(curve, "name", "curve")


def _cauchy(m: Material) -> np.ndarray:
    return constants(m).c_tilde / (2.0 * np.pi) * kernels.ROT


def _s_kernel(m):
    return lambda part, x, y, nx, ny: kernels.displacement(m, x, y, part)


def _d_kernel(m):
    return lambda part, x, y, nx, ny: kernels.double_layer(m, x, y, ny, part)


def _dstar_kernel(m):
    return lambda part, x, y, nx, ny: kernels.adjoint_double_layer(m, x, y, nx, part)


def _single(m, curve, n, kind):
    blocks = singular_matrix(_s_kernel(m), curve, n, wavenumber=m.ks)
    return OperatorMatrix(to_block(blocks), n, m.omega, _name(curve), kind, m)


def _double(m, curve, n, kind, adjoint):
    kern = _dstar_kernel(m) if adjoint else _d_kernel(m)
    blocks = singular_matrix(kern, curve, n, cauchy=_cauchy(m), wavenumber=m.ks)
    return OperatorMatrix(to_block(blocks), n, m.omega, _name(curve), kind, m)


def assemble_S(m: Material, curve: ClosedCurve, n: int, check: bool = True) -> OperatorMatrix:
    """Single layer operator ``int Pi(x, y) phi(y) ds_y``."""
    _require_dynamic(m, check)
    closed_nodes(curve, n)
    return _single(m, curve, n, "S")


def assemble_D(m: Material, curve: ClosedCurve, n: int, check: bool = True) -> OperatorMatrix:
    """Double layer operator with kernel ``(T_y Pi(x, y))^T``."""
    _require_dynamic(m, check)
    closed_nodes(curve, n)
    return _double(m, curve, n, "D", adjoint=False)


def assemble_Dstar(m: Material, curve: ClosedCurve, n: int, check: bool = True) -> OperatorMatrix:
    """Transpose double layer operator with kernel ``T_x Pi(x, y)``."""
    _require_dynamic(m, check)
    closed_nodes(curve, n)
    return _double(m, curve, n, "D*", adjoint=True)


def tangential_maps(nodes: NodeSet):
    """``(d_tau_x, d_sigma)``: derivative along the curve at x, and in the parameter."""
    dspec = spectral_diff(nodes.n)
    d_sigma = expand(dspec)
    d_tau = expand(dspec / nodes.speed[:, None])
    return d_tau, d_sigma


def assemble_N(m: Material, curve: ClosedCurve, n: int, check: bool = True) -> OperatorMatrix:
    """Hypersingular operator ``T_x D`` through its regularized five-term form."""
    _require_dynamic(m, check)
    nodes = closed_nodes(curve, n)
    d_tau, d_sigma = tangential_maps(nodes)

    def piece(name, use_speed):
        kern = lambda part, x, y, nx, ny: getattr(kernels.hyper_parts(m, x, y, nx, ny, part), name)
        return to_block(singular_matrix(kern, curve, n, use_speed=use_speed, wavenumber=m.ks))

    mat = (piece("pin", True) + d_tau @ piece("v", False) @ d_sigma
           + piece("r1", False) @ d_sigma + d_tau @ piece("r2", True))
    return OperatorMatrix(mat, n, m.omega, _name(curve), "N", m)


# static operators ----------------------------------------------------------
def _static(m: Material) -> Material:
    require_admissible(m)
    return m.with_omega(0.0)


def assemble_S0(m: Material, curve: ClosedCurve, n: int) -> OperatorMatrix:
    closed_nodes(curve, n)
    return _single(_static(m), curve, n, "S0")


def assemble_D0(m: Material, curve: ClosedCurve, n: int) -> OperatorMatrix:
    closed_nodes(curve, n)
    return _double(_static(m), curve, n, "D0", adjoint=False)


def assemble_Dstar0(m: Material, curve: ClosedCurve, n: int) -> OperatorMatrix:
    closed_nodes(curve, n)
    return _double(_static(m), curve, n, "D*0", adjoint=True)


def assemble_N0(m: Material, curve: ClosedCurve, n: int) -> OperatorMatrix:
    """Static hypersingular operator ``d_tau V0 d_tau`` with the ``-c1_t ln r I + c2_t e e^T`` kernel."""
    ms = _static(m)
    nodes = closed_nodes(curve, n)
    d_tau, d_sigma = tangential_maps(nodes)
    kern = lambda part, x, y, nx, ny: kernels.static_v(ms, x, y, part)
    v = to_block(singular_matrix(kern, curve, n, use_speed=False))
    return OperatorMatrix(d_tau @ v @ d_sigma, n, 0.0, _name(curve), "N0", ms)


def assemble_all(m: Material, curve: ClosedCurve, n: int, check: bool = True) -> dict:
    """``S``, ``D``, ``D*`` and ``N`` at the same nodes (static versions when omega = 0).

    ``check=False`` skips the admissibility test, for studies of the degenerate
    traction parameters.
    """
    if m.omega == 0.0:
        return {"S": assemble_S0(m, curve, n), "D": assemble_D0(m, curve, n),
                "D*": assemble_Dstar0(m, curve, n), "N": assemble_N0(m, curve, n)}
    return {"S": assemble_S(m, curve, n, check), "D": assemble_D(m, curve, n, check),
            "D*": assemble_Dstar(m, curve, n, check), "N": assemble_N(m, curve, n, check)}


# ---------------------------------------------------------------------------
# Calderon compositions
# ---------------------------------------------------------------------------
def smooth_densities(n: int, count: int = 10, degree: int = 5, seed: int = 0) -> np.ndarray:
    """Random interleaved trigonometric-polynomial densities, shape ``(count, 2n)``."""
    rng = np.random.default_rng(seed)
    s = 2.0 * np.pi * np.arange(n) / n
    out = np.zeros((count, n, 2), dtype=complex)
    for q in range(degree + 1):
        c = rng.normal(size=(count, 2, 2)) + 1j * rng.normal(size=(count, 2, 2))
        out += (c[:, None, :, 0] * np.cos(q * s)[None, :, None]
                + c[:, None, :, 1] * np.sin(q * s)[None, :, None])
    return out.reshape(count, 2 * n)


def calderon_residual(ns: np.ndarray, dstar: np.ndarray, densities: np.ndarray) -> float:
    """``max ||(NS + I/4 - D*^2) v|| / ||v||`` over the given densities."""
    if ns.shape != dstar.shape:
        raise ValueError(f"dimension mismatch: {ns.shape} vs {dstar.shape}")
    op = ns + 0.25 * np.eye(ns.shape[0]) - dstar @ dstar
    res = op @ densities.T
    return float(np.max(np.linalg.norm(res, axis=0) / np.linalg.norm(densities, axis=1)))


def calderon_compose(m: Material, curve: ClosedCurve, n: int, seed: int = 0, check: bool = True):
    """Return ``(NS, SN, residual)`` with the residual of ``NS + I/4 = D*^2``."""
    ops = assemble_all(m, curve, n, check)
    ns = ops["N"] @ ops["S"]
    sn = ops["S"] @ ops["N"]
    res = calderon_residual(ns.entries, ops["D*"].entries, smooth_densities(n, seed=seed))
    return ns, sn, res
