"""Lame parameters, generalized traction parameter and the derived constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

ADMISSIBILITY_RTOL = 1e-12


@dataclass(frozen=True)
class Material:
    """Isotropic homogeneous elastic medium with a generalized traction operator.

    ``mu_tilde`` selects the traction: ``mu_tilde == mu`` gives the standard one.
    ``lambda_tilde`` is derived so that ``lambda_tilde + mu_tilde == lambda + mu``.
    """

    lam: float
    mu: float
    mu_tilde: float
    rho: float = 1.0
    omega: float = 0.0

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError(f"shear modulus must be positive, got mu={self.mu}")
        if not self.lam + self.mu > 0.0:
            raise ValueError(f"need lambda + mu > 0, got {self.lam + self.mu}")
        if not self.rho > 0.0:
            raise ValueError(f"density must be positive, got rho={self.rho}")
        if self.omega < 0.0:
            raise ValueError(f"frequency must be non-negative, got omega={self.omega}")

    @property
    def lambda_tilde(self) -> float:
        return self.lam + self.mu - self.mu_tilde

    @property
    def kp(self) -> float:
        """Compressional wavenumber omega * sqrt(rho / (lambda + 2 mu))."""
        return self.omega * math.sqrt(self.rho / (self.lam + 2.0 * self.mu))

    @property
    def ks(self) -> float:
        """Shear wavenumber omega * sqrt(rho / mu)."""
        return self.omega * math.sqrt(self.rho / self.mu)

    def with_omega(self, omega: float) -> "Material":
        return Material(self.lam, self.mu, self.mu_tilde, self.rho, omega)

    def with_mu_tilde(self, mu_tilde: float) -> "Material":
        return Material(self.lam, self.mu, mu_tilde, self.rho, self.omega)

    def as_dict(self) -> dict:
        return {"lambda": self.lam, "mu": self.mu, "mu_tilde": self.mu_tilde,
                "rho": self.rho, "omega": self.omega}


@dataclass(frozen=True)
class OperatorConstants:
    c_lm: float
    c_tilde: float
    c1: float
    c2: float
    c1_t: float
    c2_t: float
    cluster_closed: float
    lam1_J: float
    lam2_J: float
    lam3_J: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def constants(m: Material) -> OperatorConstants:
    """All closed-form scalar constants for the material ``m``."""
    lam, mu, mt = m.lam, m.mu, m.mu_tilde
    denom = 4.0 * mu * (lam + 2.0 * mu)
    c_lm = mu / (2.0 * (lam + 2.0 * mu))
    c_tilde = (2.0 * mu * mt + (lam + mu) * (mt - mu)) / denom
    c1 = (lam + 3.0 * mu) / (math.pi * denom)
    c2 = (lam + mu) / (math.pi * denom)
    c1_t = -(mt + mu) * ((lam + mu) * (mt - 3.0 * mu) + 2.0 * mu * (mt - mu)) / (math.pi * denom)
    c2_t = (lam + mu) * (mt + mu) ** 2 / (math.pi * denom)
    pi2 = math.pi ** 2
    log2 = math.log(2.0)
    return OperatorConstants(
        c_lm=c_lm,
        c_tilde=c_tilde,
        c1=c1,
        c2=c2,
        c1_t=c1_t,
        c2_t=c2_t,
        cluster_closed=-0.25 + c_tilde ** 2,
        lam1_J=-pi2 * c1_t * (c1 * log2 + c2),
        lam2_J=-pi2 * c1_t * c1 * log2,
        lam3_J=-pi2 * c1_t * c1,
    )


def degenerate_mu_tilde(lam: float, mu: float) -> tuple[float, float]:
    """The two traction parameters for which the Calderon composition is compact."""
    return -mu, mu * (3.0 * lam + 5.0 * mu) / (lam + 3.0 * mu)


def zero_c_tilde_mu_tilde(lam: float, mu: float) -> float:
    """Traction parameter making the double layer operator compact (c_tilde = 0)."""
    return mu * (lam + mu) / (lam + 3.0 * mu)


@dataclass
class AdmissibilityReport:
    admissible: bool
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.admissible


def _close(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= ADMISSIBILITY_RTOL * max(scale, abs(a), abs(b))


def check_admissible(m: Material) -> AdmissibilityReport:
    """Flag the traction parameters for which the weighted operators degenerate."""
    reasons = []
    first, second = degenerate_mu_tilde(m.lam, m.mu)
    if _close(m.mu_tilde, first, m.mu):
        reasons.append("mu_tilde = -mu")
    if _close(m.mu_tilde, second, m.mu):
        reasons.append("mu_tilde = mu(3 lambda + 5 mu)/(lambda + 3 mu)")
    pc = constants(m)
    zeroth = pc.c1_t * math.log(2.0) + pc.c2_t
    if abs(zeroth) <= ADMISSIBILITY_RTOL * max(abs(pc.c1_t) * math.log(2.0), abs(pc.c2_t), 1e-300):
        reasons.append("c1_t*ln2 + c2_t = 0")
    return AdmissibilityReport(not reasons, reasons)


def require_admissible(m: Material) -> None:
    report = check_admissible(m)
    if not report:
        raise ValueError("inadmissible material: " + "; ".join(report.reasons))
