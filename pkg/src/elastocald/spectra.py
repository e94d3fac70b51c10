"""Eigenvalues of assembled operators and the predicted spectral sets."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .material import OperatorConstants


def _as_array(mat) -> np.ndarray:
    a = np.asarray(getattr(mat, "entries", mat))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"eigenvalues need a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def eigenvalues(mat) -> np.ndarray:
    """All eigenvalues of a dense square matrix (LAPACK ``geev``)."""
    return np.linalg.eigvals(_as_array(mat).astype(complex))


def eigenpairs(mat):
    return np.linalg.eig(_as_array(mat).astype(complex))


def backward_errors(mat, values, vectors) -> np.ndarray:
    """``||A v - lambda v|| / (||A|| ||v||)`` per eigenpair."""
    a = _as_array(mat)
    res = a @ vectors - vectors * values[None, :]
    return np.linalg.norm(res, axis=0) / (np.linalg.norm(a, 2) * np.linalg.norm(vectors, axis=0))


def lambda_inf(pc: OperatorConstants, n_max: int) -> np.ndarray:
    """Discrete spectral set ``{l1, l2, l3 (1 + 1/n) : n = 1..n_max}``."""
    seq = pc.lam3_J * (1.0 + 1.0 / np.arange(1, n_max + 1))
    return np.concatenate([[pc.lam1_J, pc.lam2_J], seq]).astype(complex)


def in_lambda_s(pc: OperatorConstants, s: float, z: complex) -> bool:
    """Membership of ``z`` in the open set of the point spectrum for index ``s``.

    With ``z = -l3 (x + i y)`` the set is ``x + 1 < 0`` and
    ``s + 1/2 < -(x + 1) / ((x + 1)^2 + y^2)``.
    """
    if pc.lam3_J == 0.0:
        raise ValueError("l3 = 0: inadmissible material")
    if s <= 0:
        raise ValueError("Sobolev index must be positive")
    w = -complex(z) / pc.lam3_J
    xp = w.real + 1.0
    if xp >= 0.0:
        return False
    return s + 0.5 < -xp / (xp * xp + w.imag ** 2)


def spectrum_bounds(pc: OperatorConstants) -> tuple[float, float]:
    """Predicted ``(min, max)`` moduli of the straight-arc point spectrum."""
    lo = abs(pc.lam3_J)
    hi = max(abs(pc.lam1_J), abs(pc.lam2_J), 3.0 * abs(pc.lam3_J))
    return lo, hi


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    cluster_point: complex
    radii: Sequence[float] = (0.01, 0.05, 0.1)
    theoretical_set: Optional[np.ndarray] = None
    lambda_s_params: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def distances(self) -> np.ndarray:
        return np.abs(self.eigenvalues - self.cluster_point)

    def fraction_within(self, r: float) -> float:
        return float(np.mean(self.distances <= r)) if len(self.eigenvalues) else 0.0

    @property
    def fractions(self) -> dict:
        return {float(r): self.fraction_within(r) for r in self.radii}

    def sorted_distances(self) -> np.ndarray:
        return np.sort(self.distances)

    def median_distance(self) -> float:
        return float(np.median(self.distances))

    def summary(self) -> dict:
        out = {
            "count": int(len(self.eigenvalues)),
            "cluster_point": [self.cluster_point.real, self.cluster_point.imag],
            "fraction_within": {str(k): v for k, v in self.fractions.items()},
            "median_distance": self.median_distance(),
            "max_modulus": float(np.max(np.abs(self.eigenvalues))),
            "min_modulus": float(np.min(np.abs(self.eigenvalues))),
        }
        if self.theoretical_set is not None:
            out["lambda_inf"] = [[z.real, z.imag] for z in np.asarray(self.theoretical_set)]
        if self.lambda_s_params:
            out["lambda_s"] = self.lambda_s_params
        out.update(self.meta)
        return out

    def write_csv(self, path) -> None:
        order = np.lexsort((self.eigenvalues.imag, self.eigenvalues.real))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "dist_to_cluster"])
            for z, d in zip(self.eigenvalues[order], self.distances[order]):
                w.writerow([f"{z.real:.16e}", f"{z.imag:.16e}", f"{d:.16e}"])

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)


def cluster_report(eigs, cluster_point: complex, radii=(0.01, 0.05, 0.1), **kw) -> SpectrumReport:
    return SpectrumReport(np.asarray(eigs, dtype=complex), complex(cluster_point), tuple(radii), **kw)
