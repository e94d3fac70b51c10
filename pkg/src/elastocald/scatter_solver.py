"""Dirichlet and Neumann scattering solves on closed curves and open arcs.

Closed curves use the single layer (Dirichlet) or double layer (Neumann)
representation with the plain Nystrom matrices.  Open arcs use the weighted
operators: ``Sw phi_w = F`` with ``phi = phi_w / sin(theta)`` and
``Nw psi_w = G`` with ``psi = sin(theta) psi_w``.  Calderon preconditioning
multiplies by the complementary operator: ``N S phi = N F`` and ``S N psi = S G``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import closed_ops, kernels, open_ops
from .geometry import ClosedCurve, OpenArc, arc_nodes, closed_nodes, NodeSet
from .material import Material, require_admissible

log = logging.getLogger(__name__)

GMRES_TOL = 1e-8
GMRES_RESTART = 200
GMRES_MAX_ITER = 2000
NEAR_FIELD_FRACTION = 1e-3


# ---------------------------------------------------------------------------
# GMRES
# ---------------------------------------------------------------------------
class ConvergenceError(RuntimeError):
    """GMRES did not reach the tolerance; ``history`` holds relative residuals."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


@dataclass
class GmresResult:
    x: np.ndarray
    iterations: int
    residuals: list
    converged: bool


def _givens(a, b):
    if b == 0:
        return 1.0, 0.0
    h = np.hypot(abs(a), abs(b))
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    c = abs(a) / h
    s = (a / abs(a)) * np.conj(b) / h
    return c, s


def gmres(apply: Union[Callable, np.ndarray], rhs, tol: float = GMRES_TOL,
          restart: int = GMRES_RESTART, max_iter: int = GMRES_MAX_ITER,
          x0: Optional[np.ndarray] = None) -> GmresResult:
    """Restarted GMRES with modified Gram-Schmidt and Givens rotations.

    ``residuals`` holds the relative residual norm after every inner step
    (entry 0 is the initial residual).  Convergence is declared on the true
    residual at the end of a cycle.
    """
    op = (lambda v: apply @ v) if isinstance(apply, np.ndarray) else apply
    b = np.asarray(rhs, dtype=complex)
    n = b.size
    bnorm = np.linalg.norm(b)
    x = np.zeros(n, dtype=complex) if x0 is None else np.asarray(x0, dtype=complex).copy()
    if bnorm == 0.0:
        return GmresResult(np.zeros(n, dtype=complex), 0, [0.0], True)
    r = b - op(x)
    history = [float(np.linalg.norm(r) / bnorm)]
    if history[0] <= tol:
        return GmresResult(x, 0, history, True)
    iters = 0
    m = max(1, min(restart, n))
    while iters < max_iter:
        beta = np.linalg.norm(r)
        v = np.zeros((m + 1, n), dtype=complex)
        h = np.zeros((m + 1, m), dtype=complex)
        cs = np.zeros(m, dtype=complex)
        sn = np.zeros(m, dtype=complex)
        g = np.zeros(m + 1, dtype=complex)
        g[0] = beta
        v[0] = r / beta
        k_used = 0
        for j in range(m):
            w = op(v[j])
            for i in range(j + 1):
                h[i, j] = np.vdot(v[i], w)
                w = w - h[i, j] * v[i]
            h[j + 1, j] = np.linalg.norm(w)
            breakdown = abs(h[j + 1, j]) <= 1e-14 * beta
            if not breakdown:
                v[j + 1] = w / h[j + 1, j]
            for i in range(j):
                t = cs[i] * h[i, j] + sn[i] * h[i + 1, j]
                h[i + 1, j] = -np.conj(sn[i]) * h[i, j] + cs[i] * h[i + 1, j]
                h[i, j] = t
            cs[j], sn[j] = _givens(h[j, j], h[j + 1, j])
            h[j, j] = cs[j] * h[j, j] + sn[j] * h[j + 1, j]
            h[j + 1, j] = 0.0
            g[j + 1] = -np.conj(sn[j]) * g[j]
            g[j] = cs[j] * g[j]
            iters += 1
            k_used = j + 1
            history.append(float(abs(g[j + 1]) / bnorm))
            if history[-1] <= tol or breakdown or iters >= max_iter:
                break
        y = np.linalg.solve(np.triu(h[:k_used, :k_used]), g[:k_used])
        x = x + v[:k_used].T @ y
        r = b - op(x)
        true_res = float(np.linalg.norm(r) / bnorm)
        if true_res <= tol:
            return GmresResult(x, iters, history, True)
        history[-1] = true_res
    return GmresResult(x, iters, history, False)


# ---------------------------------------------------------------------------
# Incident fields
# ---------------------------------------------------------------------------
@dataclass
class IncidentField:
    """Plane P/S waves or a point source ``Pi(x, z0) q``."""

    kind: str
    direction: tuple = (1.0, 0.0)
    source: tuple = (0.0, 0.0)
    polarization: tuple = (1.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("plane_p", "plane_s", "point_source"):
            raise ValueError(f"unknown incident field kind {self.kind!r}")
        d = np.asarray(self.direction, float)
        if self.kind != "point_source":
            norm = np.hypot(*d)
            if norm == 0.0:
                raise ValueError("plane wave direction must be nonzero")
            self.direction = tuple(d / norm)

    def _plane(self, m: Material):
        d = np.asarray(self.direction)
        if self.kind == "plane_p":
            return m.kp, d
        return m.ks, np.array([-d[1], d[0]])

    def displacement(self, m: Material, x) -> np.ndarray:
        x = np.asarray(x, float)
        if self.kind == "point_source":
            pi = kernels.displacement(m, x, np.asarray(self.source, float))
            return pi @ np.asarray(self.polarization, complex)
        k, pol = self._plane(m)
        phase = np.exp(1j * k * (x @ np.asarray(self.direction)))
        return phase[..., None] * pol

    def traction(self, m: Material, x, nu) -> np.ndarray:
        x = np.asarray(x, float)
        if self.kind == "point_source":
            t = kernels.adjoint_double_layer(m, x, np.asarray(self.source, float), nu)
            return t @ np.asarray(self.polarization, complex)
        k, pol = self._plane(m)
        d = np.asarray(self.direction)
        u = self.displacement(m, x)
        grad = 1j * k * d[:, None] * u[..., None, :]
        return kernels.traction(m, grad[..., None], nu)[..., 0]


# ---------------------------------------------------------------------------
# Solves
# ---------------------------------------------------------------------------
@dataclass
class SolveResult:
    kind: str
    density: np.ndarray
    iterations: int
    residuals: list
    converged: bool
    material: Material
    geometry: Union[ClosedCurve, OpenArc]
    nodes: NodeSet
    preconditioned: bool
    extra: dict = field(default_factory=dict)

    @property
    def is_arc(self) -> bool:
        return isinstance(self.geometry, OpenArc)

    def physical_density(self) -> np.ndarray:
        """Density per unit arc length; on arcs the weight ``sin(theta)`` is removed or applied."""
        if not self.is_arc:
            return self.density
        s = self.nodes.sin_theta[:, None]
        return self.density / s if self.kind == "dirichlet" else self.density * s

    def evaluate(self, points) -> np.ndarray:
        return evaluate_field(self, points)


def boundary_nodes(geometry, n: int) -> NodeSet:
    if isinstance(geometry, OpenArc):
        return arc_nodes(geometry, n)
    return closed_nodes(geometry, n)


def _operators(m: Material, geometry, n: int):
    if isinstance(geometry, OpenArc):
        return (open_ops.assemble_Sw(m, geometry, n).entries,
                open_ops.assemble_Nw(m, geometry, n).entries)
    return (closed_ops.assemble_S(m, geometry, n).entries,
            closed_ops.assemble_N(m, geometry, n).entries)


def _data(rhs, m, nodes, kind):
    if isinstance(rhs, IncidentField):
        if kind == "dirichlet":
            return -rhs.displacement(m, nodes.points).reshape(-1)
        return -rhs.traction(m, nodes.points, nodes.normals).reshape(-1)
    data = np.asarray(rhs, dtype=complex).reshape(-1)
    if data.size != 2 * nodes.n:
        raise ValueError(f"right-hand side has {data.size} entries, expected {2 * nodes.n}")
    return data


def _solve(kind, m, geometry, n, rhs, precondition, tol, restart, max_iter, raise_on_failure,
           operators=None):
    require_admissible(m)
    if m.omega <= 0.0:
        raise ValueError("scattering solves require omega > 0")
    nodes = boundary_nodes(geometry, n)
    s, nmat = operators if operators is not None else _operators(m, geometry, n)
    main, other = (s, nmat) if kind == "dirichlet" else (nmat, s)
    data = _data(rhs, m, nodes, kind)
    if precondition:
        system, b = other @ main, other @ data
    else:
        system, b = main, data
    res = gmres(system, b, tol=tol, restart=restart, max_iter=max_iter)
    log.info("%s solve (%s): %d iterations, residual %.3e", kind,
             "preconditioned" if precondition else "plain", res.iterations, res.residuals[-1])
    if not res.converged and raise_on_failure:
        raise ConvergenceError(f"GMRES did not converge in {res.iterations} iterations "
                               f"(residual {res.residuals[-1]:.3e})", res.residuals)
    return SolveResult(kind, res.x.reshape(-1, 2), res.iterations, res.residuals, res.converged,
                       m, geometry, nodes, precondition)


def solve_dirichlet(m: Material, geometry, n: int, rhs, precondition: bool = False,
                    tol: float = GMRES_TOL, restart: int = GMRES_RESTART,
                    max_iter: int = GMRES_MAX_ITER, raise_on_failure: bool = True,
                    operators=None) -> SolveResult:
    """Solve the single layer equation for boundary data ``rhs``.

    ``rhs`` is either node values ``(n, 2)`` of the field to match, or an
    ``IncidentField`` whose negated trace is used (sound-soft scattering).
    ``operators`` may pass pre-assembled ``(S, N)`` matrices.
    """
    return _solve("dirichlet", m, geometry, n, rhs, precondition, tol, restart, max_iter,
                  raise_on_failure, operators)


def solve_neumann(m: Material, geometry, n: int, rhs, precondition: bool = False,
                  tol: float = GMRES_TOL, restart: int = GMRES_RESTART,
                  max_iter: int = GMRES_MAX_ITER, raise_on_failure: bool = True,
                  operators=None) -> SolveResult:
    """Solve the hypersingular equation for traction data ``rhs`` (see ``solve_dirichlet``)."""
    return _solve("neumann", m, geometry, n, rhs, precondition, tol, restart, max_iter,
                  raise_on_failure, operators)


# ---------------------------------------------------------------------------
# Field evaluation
# ---------------------------------------------------------------------------
def _min_distance(geometry, points) -> np.ndarray:
    if isinstance(geometry, OpenArc):
        curve_pts = geometry.position(np.cos(np.linspace(0.0, np.pi, 4001)))
    else:
        curve_pts = geometry.position(np.linspace(0.0, 2 * np.pi, 4000, endpoint=False))
    d = points[:, None, :] - curve_pts[None, :, :]
    return np.sqrt((d ** 2).sum(-1)).min(axis=1)


def evaluate_field(result: SolveResult, points) -> np.ndarray:
    """Scattered displacement at points away from the boundary, shape ``(..., 2)``."""
    pts = np.asarray(points, float)
    shape = pts.shape[:-1]
    pts = pts.reshape(-1, 2)
    geom = result.geometry
    limit = NEAR_FIELD_FRACTION * geom.diameter()
    close = _min_distance(geom, pts) < limit
    if np.any(close):
        raise ValueError(f"{int(close.sum())} evaluation point(s) closer than {limit:.3g} "
                         "to the boundary")
    nodes = result.nodes
    n = nodes.n
    if result.is_arc:
        w = np.full(n, np.pi / n) * nodes.speed
        if result.kind == "neumann":
            w = w * nodes.sin_theta ** 2
    else:
        w = np.full(n, 2.0 * np.pi / n) * nodes.speed
    dens = result.density * w[:, None]
    x = pts[:, None, :]
    y = nodes.points[None, :, :]
    if result.kind == "dirichlet":
        k = kernels.displacement(result.material, x, y)
    else:
        k = kernels.double_layer(result.material, x, y, nodes.normals[None, :, :])
    return np.einsum("pnij,nj->pi", k, dens).reshape(shape + (2,))


def endpoint_exponent(result: SolveResult, count: int = 5) -> tuple[float, float]:
    """Fitted exponents ``p`` in ``|density| ~ d^p`` at the two arc endpoints.

    ``d`` is the distance from each of the ``count`` nodes nearest an endpoint to
    that endpoint; the physical density is used.
    """
    if not result.is_arc:
        raise ValueError("endpoint exponents are defined for open arcs only")
    dens = np.linalg.norm(result.physical_density(), axis=1)
    pts = result.nodes.points
    ends = result.geometry.position(np.array([1.0, -1.0]))
    out = []
    for end, idx in ((ends[0], np.arange(count)), (ends[1], np.arange(len(pts) - count, len(pts)))):
        d = np.linalg.norm(pts[idx] - end, axis=1)
        slope = np.polyfit(np.log(d), np.log(dens[idx]), 1)[0]
        out.append(float(slope))
    return out[0], out[1]
