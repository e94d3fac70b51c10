import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st

from elastocald.special_fn import (ASYMPTOTIC_MIN, SERIES_MAX, bessel_jy, hankel1, hankel1_all,
                                   hankel1_regular_all, log_split_j0y0)

def _mp_hankel(order, z):
    with mpmath.workdps(40):
        return complex(mpmath.hankel1(order, mpmath.mpf(z)))


@pytest.fixture(scope="module")
def grid():
    z = np.logspace(-8, 4, 241)
    # straddle the regime switches
    extra = np.array([SERIES_MAX * (1 - 1e-12), SERIES_MAX * (1 + 1e-12),
                      ASYMPTOTIC_MIN * (1 - 1e-12), ASYMPTOTIC_MIN * (1 + 1e-12)])
    return np.sort(np.concatenate([z, extra]))


@pytest.mark.parametrize("order", [0, 1, 2])
def test_hankel_matches_high_precision_oracle(grid, order):
    ours = hankel1(order, grid)
    ref = np.array([_mp_hankel(order, z) for z in grid])
    assert np.max(np.abs(ours - ref) / np.abs(ref)) <= 1e-12


@pytest.mark.parametrize("order", [0, 1, 2])
def test_hankel_agrees_with_scipy(order):
    z = np.logspace(-8, 4, 20001)
    rel = np.abs(hankel1(order, z) - sp.hankel1(order, z)) / np.abs(sp.hankel1(order, z))
    assert rel.max() <= 1e-13


def test_regular_parts_remove_poles():
    z = np.array([1e-6, 1e-3, 0.5, 3.9, 4.1, 10.0, 30.0])
    h0, h1, h2 = hankel1_regular_all(z)
    for k, zk in enumerate(z):
        with mpmath.workdps(40):
            zz = mpmath.mpf(zk)
            r1 = complex(mpmath.hankel1(1, zz) + 2j / (mpmath.pi * zz))
            r2 = complex(mpmath.hankel1(2, zz) + 4j / (mpmath.pi * zz * zz))
        assert abs(h1[k] - r1) <= 1e-13 * abs(r1)
        assert abs(h2[k] - r2) <= 1e-13 * abs(r2)
        assert abs(h0[k] - _mp_hankel(0, zk)) <= 1e-13 * abs(h0[k])


@given(st.floats(min_value=1e-6, max_value=1e4))
def test_wronskian(z):
    j0, j1, _, y0, y1, _ = bessel_jy(z)
    assert abs(j1 * y0 - j0 * y1 - 2.0 / (np.pi * z)) <= 1e-12 * max(1.0, 2.0 / (np.pi * z))


@given(st.floats(min_value=1e-3, max_value=1e4))
def test_three_term_recurrence(z):
    h0, h1, h2 = hankel1_all(z)
    scale = max(abs(h0), abs(h2), abs(2.0 / z * h1))
    assert abs(h0 + h2 - 2.0 / z * h1) <= 1e-12 * scale


def test_log_split_reconstructs_h0():
    z = np.linspace(1e-4, 8.0, 101)
    smooth, coeff = log_split_j0y0(z)
    np.testing.assert_allclose(smooth + coeff * np.log(z), sp.hankel1(0, z), rtol=1e-13, atol=1e-14)
    np.testing.assert_allclose(coeff, 2j / np.pi * sp.j0(z), rtol=0, atol=1e-14)


def test_scalar_input_returns_scalar():
    assert np.ndim(hankel1(0, 1.5)) == 0


@pytest.mark.parametrize("order,z", [(3, 1.0), (-1, 1.0), (0, 0.0), (1, -2.0), (0, np.nan)])
def test_invalid_arguments(order, z):
    with pytest.raises(ValueError):
        hankel1(order, z)
