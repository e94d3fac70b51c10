"""Bessel and Hankel functions of the first kind, orders 0 to 2, real argument.

Three regimes are used, all vectorized over numpy arrays:

* ``z <= 4``       ascending power series,
* ``4 < z < 25``   Miller backward recurrence for J_n plus Neumann series for Y_0, Y_1,
* ``z >= 25``      Hankel asymptotic expansion, summed until the terms stall.

Outside the series regime Y_2 comes from the forward recurrence
Y_2 = (2/z) Y_1 - Y_0, which is stable in the direction of growth.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061

SERIES_MAX = 4.0
LOG_SPLIT_MAX = 8.0
ASYMPTOTIC_MIN = 25.0
SERIES_RTOL = 1e-18
_MILLER_START = 120


def _as_positive_array(z):
    z = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z <= 0.0):
        raise ValueError("Bessel functions are only defined here for real z > 0")
    return z


# ---------------------------------------------------------------------------
# Regime 1: ascending series
# ---------------------------------------------------------------------------
def _series_j(order, z):
    """J_order(z) from its power series."""
    q = -0.25 * z * z
    term = (0.5 * z) ** order / math.factorial(order)
    total = term.copy()
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + order))
        total = total + term
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)) or k > 200:
            break
    return total


def _series_y0_smooth(z):
    """The non-logarithmic remainder sum of Y_0 (times pi/2).

    Y_0(z) = (2/pi) [ (ln(z/2) + gamma) J_0(z) + sum_{k>=1} (-1)^{k+1} H_k (z^2/4)^k / (k!)^2 ]
    where H_k is the k-th harmonic number.  Returns the sum.
    """
    q = 0.25 * z * z
    power = np.ones_like(z)
    total = np.zeros_like(z)
    harmonic = 0.0
    k = 0
    while True:
        k += 1
        harmonic += 1.0 / k
        power = -power * q / (k * k)
        term = -harmonic * power
        total = total + term
        if np.all(np.abs(term) <= SERIES_RTOL * np.maximum(np.abs(total), 1e-300)) or k > 200:
            break
    return total


def _series_y1_smooth(z):
    """sum_{k>=0} (psi(k+1) + psi(k+2)) (-1)^k (z/2)^{2k+1} / (k! (k+1)!)."""
    half = 0.5 * z
    q = -half * half
    power = half.copy()
    total = (1.0 - 2.0 * EULER_GAMMA) * power
    harmonic = 0.0
    k = 0
    while True:
        k += 1
        power = power * q / (k * (k + 1))
        harmonic += 1.0 / k
        psi_sum = 2.0 * harmonic + 1.0 / (k + 1) - 2.0 * EULER_GAMMA
        term = psi_sum * power
        total = total + term
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)) or k > 200:
            break
    return total


def _series_y2_smooth(z):
    """sum_{k>=0} (psi(k+1) + psi(k+3)) (-1)^k (z/2)^{2k+2} / (k! (k+2)!)."""
    half = 0.5 * z
    q = -half * half
    power = half * half / 2.0
    total = (1.5 - 2.0 * EULER_GAMMA) * power
    harmonic = 0.0
    k = 0
    while True:
        k += 1
        power = power * q / (k * (k + 2))
        harmonic += 1.0 / k
        psi_sum = 2.0 * harmonic + 1.0 / (k + 1) + 1.0 / (k + 2) - 2.0 * EULER_GAMMA
        term = psi_sum * power
        total = total + term
        if np.all(np.abs(term) <= SERIES_RTOL * np.abs(total)) or k > 200:
            break
    return total


def _series_all(z):
    j0 = _series_j(0, z)
    j1 = _series_j(1, z)
    j2 = _series_j(2, z)
    log_half = np.log(0.5 * z)
    y0 = (2.0 / np.pi) * ((log_half + EULER_GAMMA) * j0 + _series_y0_smooth(z))
    yr1 = (2.0 / np.pi) * log_half * j1 - _series_y1_smooth(z) / np.pi
    yr2 = (2.0 / np.pi) * log_half * j2 - 1.0 / np.pi - _series_y2_smooth(z) / np.pi
    return j0, j1, j2, y0, yr1, yr2


# ---------------------------------------------------------------------------
# Regime 2: Miller recurrence + Neumann series
# ---------------------------------------------------------------------------
def _miller_all(z):
    start = _MILLER_START
    jn = [None] * (start + 2)
    upper = np.zeros_like(z)
    cur = np.full_like(z, 1e-300)
    jn[start + 1] = upper
    jn[start] = cur
    for n in range(start, 0, -1):
        prev = (2.0 * n / z) * cur - upper
        upper, cur = cur, prev
        jn[n - 1] = cur
        big = np.abs(cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            for m in range(n - 1, start + 2):
                jn[m] = jn[m] * scale
            upper = upper * scale
            cur = cur * scale
    norm = jn[0] + 2.0 * sum(jn[2 * k] for k in range(1, start // 2 + 1))
    j = [jn[n] / norm for n in range(start + 1)]
    logt = np.log(0.5 * z) + EULER_GAMMA
    s0 = np.zeros_like(z)
    s1 = np.zeros_like(z)
    for k in range(1, start // 2):
        sign = -1.0 if k % 2 else 1.0
        s0 = s0 + sign * j[2 * k] / k
        s1 = s1 + sign * (j[2 * k - 1] - j[2 * k + 1]) / k
    y0 = (2.0 / np.pi) * (logt * j[0] - 2.0 * s0)
    y1 = (2.0 / np.pi) * (-j[0] / z + logt * j[1] + s1)
    y2 = (2.0 / z) * y1 - y0
    return j[0], j[1], j[2], y0, y1 + 2.0 / (np.pi * z), y2 + 4.0 / (np.pi * z * z)


# ---------------------------------------------------------------------------
# Regime 3: Hankel asymptotic expansion
# ---------------------------------------------------------------------------
def _asymptotic_h(order, z):
    mu = 4.0 * order * order
    total = np.ones(z.shape, dtype=complex)
    coeff = 1.0
    last = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, 60):
        coeff *= (mu - (2 * k - 1) ** 2) / (8.0 * k)
        term = coeff * (1j ** k) / z ** k
        mag = np.abs(term)
        active &= mag < last
        total = total + np.where(active, term, 0.0)
        last = mag
        if not np.any(active & (mag > 1e-17)):
            break
    phase = np.exp(-1j * (0.5 * order * np.pi + 0.25 * np.pi))
    return np.sqrt(2.0 / (np.pi * z)) * (np.cos(z) + 1j * np.sin(z)) * phase * total


# ---------------------------------------------------------------------------
# Public interface
# ---------------------------------------------------------------------------
def _table(z):
    """``(J0, J1, J2, Y0, Yr1, Yr2)`` with Yr1 = Y1 + 2/(pi z), Yr2 = Y2 + 4/(pi z^2)."""
    z = _as_positive_array(z)
    shape = z.shape
    z = z.ravel()
    out = [np.empty_like(z) for _ in range(6)]
    low = z <= SERIES_MAX
    high = z >= ASYMPTOTIC_MIN
    mid = ~(low | high)
    for mask, fn in ((low, _series_all), (mid, _miller_all)):
        if np.any(mask):
            vals = fn(z[mask])
            for slot, v in zip(out, vals):
                slot[mask] = v
    if np.any(high):
        zh = z[high]
        for order in range(3):
            h = _asymptotic_h(order, zh)
            out[order][high] = h.real
            out[3 + order][high] = h.imag
        out[4][high] += 2.0 / (np.pi * zh)
        out[5][high] += 4.0 / (np.pi * zh * zh)
    return tuple(o.reshape(shape) for o in out), z.reshape(shape)


def bessel_jy(z):
    """Return ``(J0, J1, J2, Y0, Y1, Y2)`` evaluated at ``z > 0`` (array-like)."""
    (j0, j1, j2, y0, yr1, yr2), z = _table(z)
    return j0, j1, j2, y0, yr1 - 2.0 / (np.pi * z), yr2 - 4.0 / (np.pi * z * z)


def hankel1_regular_all(z):
    """``(H0, H1 + 2i/(pi z), H2 + 4i/(pi z^2))``: Hankel values minus their poles.

    Differences such as ``k_s H1(k_s r) - k_p H1(k_p r)`` lose every digit at
    small ``r`` when formed from plain values; the pole terms are identical for
    both wavenumbers, so forming the difference from these regular parts is exact.
    """
    (j0, j1, j2, y0, yr1, yr2), _ = _table(z)
    return j0 + 1j * y0, j1 + 1j * yr1, j2 + 1j * yr2


def hankel1_all(z):
    """Return ``(H0, H1, H2)`` of the first kind at ``z > 0``."""
    j0, j1, j2, y0, y1, y2 = bessel_jy(z)
    return j0 + 1j * y0, j1 + 1j * y1, j2 + 1j * y2


def bessel_j_all(z):
    """Return ``(J0, J1, J2)`` at ``z > 0``."""
    j0, j1, j2, _, _, _ = bessel_jy(z)
    return j0, j1, j2


def hankel1(order, z):
    """Hankel function of the first kind H_order^(1)(z), order in {0, 1, 2}, z > 0.

    Raises ValueError for other orders or non-positive arguments.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"unsupported Hankel order {order!r}; expected 0, 1 or 2")
    values = hankel1_all(z)[order]
    return values[()] if np.ndim(values) == 0 else values


def log_split_j0y0(z):
    """Split H0^(1)(z) = smooth + log_coeff * ln(z) for ``0 < z <= 8``.

    ``log_coeff = (2i/pi) J0(z)`` and ``smooth`` is summed directly from the
    series, so the reconstruction is not a subtraction of nearly equal terms.
    """
    z = _as_positive_array(z)
    if np.any(z > LOG_SPLIT_MAX):
        raise ValueError(f"log split only available for z <= {LOG_SPLIT_MAX}")
    j0 = _series_j(0, np.atleast_1d(z)).reshape(z.shape)
    rest = _series_y0_smooth(np.atleast_1d(z)).reshape(z.shape)
    log_coeff = (2j / np.pi) * j0
    smooth = j0 + (2j / np.pi) * ((EULER_GAMMA - math.log(2.0)) * j0 + rest)
    if smooth.ndim == 0:
        return complex(smooth), complex(log_coeff)
    return smooth, log_coeff
