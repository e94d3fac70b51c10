"""Weighted operators on open arcs in the cosine variable ``t = cos(theta)``.

Densities are even 2*pi-periodic functions of ``theta`` sampled at the interior
nodes ``theta_j = (2j+1) pi / (2M)``.  Weighted densities relate to physical
ones through ``phi_w = sin(theta) phi`` (Dirichlet) and ``psi_w = psi / sin(theta)``
(Neumann), which removes the endpoint behaviour.

Two representations are used:

* node values, interleaved ``(u1, u2)`` per node, for assembled operators;
* cosine coefficients.  ``CosineSeries`` stores ``a_m`` with
  ``v = a_0/2 + sum a_m cos(m theta)``; the straight-arc reference maps act on
  basis coordinates ``c`` with ``v = sum c_n e_n``, ``e_n = cos(n theta)``,
  i.e. ``c_0 = a_0/2`` and ``c_n = a_n``.

Kernels are split as ``L ln|cos(theta) - cos(vartheta)| + K2`` with ``L`` the
coefficient of ``ln r``.  The log part uses the product rule built from
``ln|cos t - cos s| = -ln 2 - sum_{m>=1} (2/m) cos(m t) cos(m s)`` and the smooth
part the midpoint rule; the diagonal of ``K2`` is extrapolated from symmetric
offsets as on closed curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .closed_ops import OperatorMatrix, RICHARDSON_H, RICHARDSON_KH, RICHARDSON_LEVELS
from .closed_ops import _richardson_weights, expand, to_block
from .geometry import OpenArc, arc_params
from .material import Material, constants, require_admissible

LN2 = np.log(2.0)


# ---------------------------------------------------------------------------
# Cosine series and transforms
# ---------------------------------------------------------------------------
@dataclass
class CosineSeries:
    """Coefficients ``a_m`` (shape ``(M, 2)``) of ``v = a_0/2 + sum a_m cos(m theta)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim == 1:
            self.coeffs = np.stack([self.coeffs, np.zeros_like(self.coeffs)], axis=-1)
        if self.coeffs.ndim != 2 or self.coeffs.shape[1] != 2 or len(self.coeffs) < 1:
            raise ValueError(f"expected coefficients of shape (M, 2), got {self.coeffs.shape}")

    @property
    def m(self) -> int:
        return len(self.coeffs)

    def basis(self) -> np.ndarray:
        c = self.coeffs.copy()
        c[0] *= 0.5
        return c

    @classmethod
    def from_basis(cls, c) -> "CosineSeries":
        a = np.array(c, dtype=complex)
        if a.ndim == 1:
            a = np.stack([a, np.zeros_like(a)], axis=-1)
        a[0] *= 2.0
        return cls(a)

    @classmethod
    def basis_element(cls, n: int, m: int, component=(1.0, 0.0)) -> "CosineSeries":
        c = np.zeros((m, 2), dtype=complex)
        c[n] = component
        return cls.from_basis(c)

    def truncate(self, m: int) -> "CosineSeries":
        out = np.zeros((m, 2), dtype=complex)
        k = min(m, self.m)
        out[:k] = self.coeffs[:k]
        return CosineSeries(out)

    def evaluate(self, theta) -> np.ndarray:
        theta = np.asarray(theta, float)
        cos = np.cos(np.multiply.outer(theta, np.arange(self.m)))
        return cos @ self.basis()


def cosine_matrix(m: int, modes: Optional[int] = None) -> np.ndarray:
    """``E[j, n] = cos(n theta_j)``: basis coordinates to node values."""
    modes = m if modes is None else modes
    return np.cos(np.multiply.outer(arc_params(m), np.arange(modes)))


def inverse_cosine_matrix(m: int) -> np.ndarray:
    """Node values to basis coordinates (exact inverse of ``cosine_matrix(m)``)."""
    e = cosine_matrix(m)
    inv = (2.0 / m) * e.T
    inv[0] *= 0.5
    return inv


def dct_forward(values) -> CosineSeries:
    """Cosine coefficients of the interpolant through values at the ``M`` theta-nodes."""
    v = np.asarray(values, dtype=complex)
    if v.ndim == 1:
        v = np.stack([v, np.zeros_like(v)], axis=-1)
    if v.ndim != 2 or v.shape[1] != 2:
        raise ValueError(f"expected node values of shape (M, 2), got {v.shape}")
    return CosineSeries.from_basis(inverse_cosine_matrix(len(v)) @ v)


def dct_inverse(series: CosineSeries, m: Optional[int] = None) -> np.ndarray:
    """Values at the ``m`` theta-nodes (default: the series length)."""
    m = series.m if m is None else m
    if series.m > m:
        raise ValueError(f"series of length {series.m} does not fit {m} nodes")
    return cosine_matrix(m, series.m) @ series.basis()


def sobolev_norm(series: CosineSeries, s: float) -> float:
    """``sqrt(|a_0|^2 + 2 sum m^(2s) |a_m|^2)`` on the stored coefficients."""
    if s < 0:
        raise ValueError("Sobolev index must be non-negative")
    a = series.coeffs
    w = np.arange(series.m, dtype=float) ** (2.0 * s)
    total = np.sum(np.abs(a[0]) ** 2) + 2.0 * np.sum(w[1:, None] * np.abs(a[1:]) ** 2)
    return float(np.sqrt(total))


def node_to_coeff(op: np.ndarray) -> np.ndarray:
    """Conjugate an interleaved node-space operator into basis coordinates."""
    m = op.shape[0] // 2
    return expand(inverse_cosine_matrix(m)) @ op @ expand(cosine_matrix(m))


def coeff_to_node(op: np.ndarray) -> np.ndarray:
    m = op.shape[0] // 2
    return expand(cosine_matrix(m)) @ op @ expand(inverse_cosine_matrix(m))


# ---------------------------------------------------------------------------
# Straight-arc reference maps (scalar, on basis coordinates)
# ---------------------------------------------------------------------------
def t0_matrix(n: int) -> np.ndarray:
    """``d/dtheta (sin theta v)``: ``(n+1, n)``, raising the degree by one."""
    t = np.zeros((n + 1, n))
    if n:
        t[1, 0] = 1.0
    for k in range(1, n):
        t[k + 1, k] = 0.5 * (1 + k)
        t[k - 1, k] = 0.5 * (1 - k)
    return t


def _chebyshev_u(k: int, n: int) -> np.ndarray:
    """Basis coordinates of ``sin((k+1) theta) / sin(theta)``, length ``n``."""
    u = np.zeros(n)
    for j in range(k % 2, k + 1, 2):
        u[j] = 1.0 if j == 0 else 2.0
    return u


def d0_matrix(n: int) -> np.ndarray:
    """``(1/sin theta) d/dtheta``: ``e_m -> -m U_{m-1}``; ``e_0 -> 0``."""
    d = np.zeros((n, n))
    for k in range(1, n):
        d[:, k] = -k * _chebyshev_u(k - 1, n)
    return d


def c_matrix(n: int) -> np.ndarray:
    """``e_n -> sin(n theta) / (n sin theta)``; ``e_0 -> 0``."""
    c = np.zeros((n, n))
    for k in range(1, n):
        c[:, k] = _chebyshev_u(k - 1, n) / k
    return c


def _diag_values(first: float, second: float, log_coeff: float, n: int) -> np.ndarray:
    """Mode-0 pair ``(pi (l ln2 + first), pi l ln2)`` and ``pi l / k`` for ``k >= 1``."""
    vals = np.zeros((n, 2))
    vals[0] = (np.pi * (log_coeff * LN2 + first), np.pi * (log_coeff * LN2 + second))
    k = np.arange(1, n)
    vals[1:] = (np.pi * log_coeff / k)[:, None]
    return vals


def op_S0_diag(m: Material, n: int) -> np.ndarray:
    """Eigenvalues ``(lambda_1, lambda_2)`` of the straight static single layer per mode."""
    pc = constants(m)
    return _diag_values(pc.c2, 0.0, pc.c1, n)


def op_V0_diag(m: Material, n: int) -> np.ndarray:
    """Same diagonal structure for the ``-c1_t ln r I + c2_t e e^T`` kernel."""
    pc = constants(m)
    return _diag_values(pc.c2_t, 0.0, pc.c1_t, n)


def _diag(vals: np.ndarray) -> np.ndarray:
    return np.diag(vals.reshape(-1).astype(complex))


def _apply(mat_fn, series: CosineSeries, size_out: Optional[int] = None) -> CosineSeries:
    c = series.basis()
    out = mat_fn(series.m) @ c
    return CosineSeries.from_basis(out if size_out is None else out[:size_out])


def op_T0(series: CosineSeries) -> CosineSeries:
    """Exact action of ``d/dtheta(sin theta .)``; the result has one more mode."""
    return _apply(t0_matrix, series)


def op_D0(series: CosineSeries) -> CosineSeries:
    """Exact action of ``(1/sin theta) d/dtheta``."""
    return _apply(d0_matrix, series)


def op_C(series: CosineSeries) -> CosineSeries:
    return _apply(c_matrix, series)


def op_Z0(arc: OpenArc, series: CosineSeries) -> CosineSeries:
    """Multiplication by the Jacobian ``|x'(cos theta)|`` via node values."""
    theta = arc_params(series.m)
    return dct_forward(arc.jacobian(theta)[:, None] * dct_inverse(series))


def _buffer(n: int) -> int:
    return n + 2


def n0_matrix(m: Material, n: int) -> np.ndarray:
    """Interleaved ``2n x 2n`` basis map ``D0 V0 T0`` (static straight hypersingular)."""
    b = _buffer(n)
    t = np.zeros((b, b))
    t[:, :b - 1] = t0_matrix(b - 1)[:b]
    full = expand(d0_matrix(b)) @ _diag(op_V0_diag(m, b)) @ expand(t)
    return full[:2 * n, :2 * n]


def s0_matrix(m: Material, n: int) -> np.ndarray:
    return _diag(op_S0_diag(m, n))


def v0_matrix(m: Material, n: int) -> np.ndarray:
    return _diag(op_V0_diag(m, n))


def j0_matrix(m: Material, n: int) -> np.ndarray:
    """Basis map of ``N0 S0`` on the straight arc (upper triangular)."""
    return n0_matrix(m, n) @ s0_matrix(m, n)


def j0_inverse_matrix(m: Material, n: int) -> np.ndarray:
    """``-(pi c1_t)^-2 S0^-1 C V0 T0`` on the truncated basis."""
    require_admissible(m)
    pc = constants(m)
    b = _buffer(n)
    t = np.zeros((b, b))
    t[:, :b - 1] = t0_matrix(b - 1)[:b]
    inner = expand(c_matrix(b)) @ _diag(op_V0_diag(m, b)) @ expand(t)
    s_inv = np.diag(1.0 / op_S0_diag(m, b).reshape(-1))
    full = -(s_inv @ inner) / (np.pi * pc.c1_t) ** 2
    return full[:2 * n, :2 * n]


def _apply_interleaved(mat: np.ndarray, series: CosineSeries) -> CosineSeries:
    return CosineSeries.from_basis((mat @ series.basis().reshape(-1)).reshape(-1, 2))


def op_N0_straight(m: Material, series: CosineSeries) -> CosineSeries:
    require_admissible(m)
    return _apply_interleaved(n0_matrix(m, series.m), series)


def op_J0(m: Material, series: CosineSeries) -> CosineSeries:
    require_admissible(m)
    return _apply_interleaved(j0_matrix(m, series.m), series)


def op_J0_inverse(m: Material, series: CosineSeries) -> CosineSeries:
    return _apply_interleaved(j0_inverse_matrix(m, series.m), series)


# ---------------------------------------------------------------------------
# Node-space versions of the derivative maps
# ---------------------------------------------------------------------------
def t0_nodes(n: int) -> np.ndarray:
    """``d/dtheta(sin theta .)`` on node values; the degree-``n`` term vanishes at the nodes."""
    return cosine_matrix(n, n + 1) @ t0_matrix(n) @ inverse_cosine_matrix(n)


def d0_nodes(n: int) -> np.ndarray:
    return cosine_matrix(n) @ d0_matrix(n) @ inverse_cosine_matrix(n)


# ---------------------------------------------------------------------------
# Weighted operator assembly
# ---------------------------------------------------------------------------
def log_product_weights(n: int) -> np.ndarray:
    """``W[i, j]`` with ``int_0^pi ln|cos t_i - cos s| f(s) ds ~ sum_j W[i, j] f(s_j)``."""
    theta = arc_params(n)
    k = np.arange(1, n)
    ci = np.cos(np.multiply.outer(theta, k))
    inner = (ci * (np.pi / k)) @ ci.T
    return (2.0 / n) * (-0.5 * np.pi * LN2 - inner)


KernelFn = Callable[[str, np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _arc_eval(kern, arc, theta, vartheta, weight):
    x, nx, _, _ = arc.frame(theta)
    y, ny, _, jac = arc.frame(vartheta)
    w = weight(vartheta, jac)[..., None, None]
    full = kern("full", x, y, nx, ny) * w
    log = kern("log", x, y, nx, ny) * w
    lg = np.log(np.abs(np.cos(theta) - np.cos(vartheta)))
    return log, full - log * lg[..., None, None]


def arc_matrix(kern: KernelFn, arc: OpenArc, n: int, weight, wavenumber: float = 0.0) -> np.ndarray:
    """Interleaved node matrix of ``int_0^pi k(theta, s) weight(s) f(s) ds``."""
    theta = arc_params(n)
    ti, tj = np.meshgrid(theta, theta, indexing="ij")
    off = ~np.eye(n, dtype=bool)
    k1 = np.zeros((n, n, 2, 2), dtype=complex)
    k2 = np.zeros((n, n, 2, 2), dtype=complex)
    k1[off], k2[off] = _arc_eval(kern, arc, ti[off], tj[off], weight)

    x, nx, _, jac = arc.frame(theta)
    k1[~off] = kern("log", x, x, nx, nx) * weight(theta, jac)[:, None, None]
    # offsets must stay below theta so that theta - h does not mirror onto a node
    speed = jac.max()
    h0 = RICHARDSON_H if wavenumber <= 0 else min(RICHARDSON_H, RICHARDSON_KH / (wavenumber * speed))
    h0 = np.minimum(h0, np.minimum(theta, np.pi - theta) / (2.0 * RICHARDSON_LEVELS))
    diag = np.zeros((n, 2, 2), dtype=complex)
    for level, w in enumerate(_richardson_weights(RICHARDSON_LEVELS), start=1):
        h = level * h0
        _, plus = _arc_eval(kern, arc, theta, theta + h, weight)
        _, minus = _arc_eval(kern, arc, theta, theta - h, weight)
        diag += w * 0.5 * (plus + minus)
    k2[~off] = diag
    blocks = log_product_weights(n)[:, :, None, None] * k1 + (np.pi / n) * k2
    return to_block(blocks)


def _jacobian_weight(theta, jac):
    return jac


def _hyper_weight(theta, jac):
    return np.sin(theta) ** 2 * jac


def _unit_weight(theta, jac):
    return np.ones_like(jac)


def _check_arc(m: Material, n: int):
    require_admissible(m)
    if n < 2:
        raise ValueError(f"arc mode count must be >= 2, got {n}")


def assemble_Sw(m: Material, arc: OpenArc, n: int) -> OperatorMatrix:
    """Weighted single layer ``int Pi(x(cos t), x(cos s)) phi_w(s) J(cos s) ds``.

    With ``omega = 0`` the static tensor is used.
    """
    _check_arc(m, n)
    kern = lambda part, x, y, nx, ny: kernels.displacement(m, x, y, part)
    mat = arc_matrix(kern, arc, n, _jacobian_weight, m.ks)
    return OperatorMatrix(mat, n, m.omega, arc.name, "Sw", m)


def assemble_Vw(m: Material, arc: OpenArc, n: int) -> OperatorMatrix:
    """The ``V`` kernel of the regularized hypersingular operator, no Jacobian factor."""
    _check_arc(m, n)
    if m.omega == 0.0:
        kern = lambda part, x, y, nx, ny: kernels.static_v(m, x, y, part)
    else:
        kern = lambda part, x, y, nx, ny: kernels.hyper_parts(m, x, y, nx, ny, part).v
    return OperatorMatrix(arc_matrix(kern, arc, n, _unit_weight, m.ks), n, m.omega,
                          arc.name, "Vw", m)


def assemble_Nw(m: Material, arc: OpenArc, n: int) -> OperatorMatrix:
    """Weighted hypersingular operator acting on ``psi_w = psi / sin(theta)``.

    ``Nw = Q(pin sin^2 J) + Z^-1 D0 Vw T0 + Q(r1) T0 + Z^-1 D0 Q(r2 sin^2 J)``
    where ``Q`` denotes product quadrature in ``vartheta`` and ``Z`` the Jacobian.
    """
    _check_arc(m, n)
    theta = arc_params(n)
    z_inv = expand(np.diag(1.0 / arc.jacobian(theta)))
    t0 = expand(t0_nodes(n))
    d0 = z_inv @ expand(d0_nodes(n))
    vw = assemble_Vw(m, arc, n).entries
    mat = d0 @ vw @ t0
    if m.omega > 0.0:
        def part_matrix(name, weight):
            kern = lambda part, x, y, nx, ny: getattr(kernels.hyper_parts(m, x, y, nx, ny, part), name)
            return arc_matrix(kern, arc, n, weight, m.ks)
        mat = (mat + part_matrix("pin", _hyper_weight) + part_matrix("r1", _unit_weight) @ t0
               + d0 @ part_matrix("r2", _hyper_weight))
    return OperatorMatrix(mat, n, m.omega, arc.name, "Nw", m)


def jacobian_conjugated_j0(m: Material, arc: OpenArc, n: int) -> np.ndarray:
    """Node matrix ``Z^-1 J0 Z`` with ``J0 = N0 S0`` from the exact basis maps."""
    theta = arc_params(n)
    jac = arc.jacobian(theta)
    j0 = coeff_to_node(j0_matrix(m, n))
    return expand(np.diag(1.0 / jac)) @ j0 @ expand(np.diag(jac))


def compose_Jw(m: Material, arc: OpenArc, n: int):
    """``(Jw, J0J, K)`` with ``Jw = Nw Sw``, ``J0J = Z^-1 N0 S0 Z`` and ``K = Jw - J0J``."""
    sw = assemble_Sw(m, arc, n)
    nw = assemble_Nw(m, arc, n)
    jw = nw @ sw
    j0j = OperatorMatrix(jacobian_conjugated_j0(m, arc, n), n, m.omega, arc.name, "J0J", m)
    k = OperatorMatrix(jw.entries - j0j.entries, n, m.omega, arc.name, "K", m)
    return jw, j0j, k
