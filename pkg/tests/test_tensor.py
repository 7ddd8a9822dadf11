import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_rotation, random_unit
from qcresonance import Geometry, chi_kernel, dipole_tensor, far_zone_tensor, near_zone_tensor

Z = np.array([0.0, 0.0, 1.0])


def brute_tensor(r, n, w0):
    """Component-by-component loop, written independently of the vectorised code."""
    x = w0 * r
    v = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            kd = 1.0 if i == j else 0.0
            v[i, j] = ((kd - 3 * n[i] * n[j]) * (np.cos(x) + x * np.sin(x))
                       - (kd - n[i] * n[j]) * x**2 * np.cos(x)) / (4 * np.pi * r**3)
    return v


def test_matches_componentwise_loop(rng):
    for _ in range(20):
        n = random_unit(rng)
        r, w0 = rng.uniform(0.1, 5), rng.uniform(0.1, 5)
        np.testing.assert_allclose(dipole_tensor(Geometry(r, n, w0)).v, brute_tensor(r, n, w0), rtol=1e-13, atol=1e-15)


def test_longitudinal_component():
    r, w0 = 1.7, 0.9
    v = dipole_tensor(Geometry(r, Z, w0)).v
    x = w0 * r
    assert v[2, 2] == pytest.approx(-(np.cos(x) + x * np.sin(x)) / (2 * np.pi * r**3), rel=1e-14)


def test_transverse_at_pi():
    r = 2.0
    v = dipole_tensor(Geometry(r, Z, np.pi / r)).v
    assert v[0, 0] == pytest.approx((np.pi**2 - 1) / (4 * np.pi * r**3), rel=1e-14)


def test_static_limit():
    r = 0.3
    v = dipole_tensor(Geometry(r, Z, 1e-9)).v
    np.testing.assert_allclose(v, np.diag([1, 1, -2]) / (4 * np.pi * r**3), rtol=1e-12, atol=1e-12)


def test_near_zone_tensor():
    r = 0.5
    np.testing.assert_allclose(near_zone_tensor(Geometry(r, Z, 1.0)).v, np.diag([1, 1, -2]) / (4 * np.pi * r**3))


def test_near_zone_traceless(rng):
    for _ in range(10):
        assert np.trace(near_zone_tensor(Geometry(1.0, random_unit(rng), 2.0)).v) == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("x", [1e-3, 1e-2, 3e-2])
def test_near_zone_deviation_is_second_order(x, rng):
    # cos x + x sin x - 1 = x^2/2 + O(x^4); the radiative term is x^2: deviation <= 2 x^2
    g = Geometry(1.0, random_unit(rng), x)
    near = near_zone_tensor(g).v
    dev = np.linalg.norm(dipole_tensor(g).v - near) / np.linalg.norm(near)
    assert dev <= 2 * x**2
    assert dev >= 0.1 * x**2


def test_far_zone_longitudinal_vanishes():
    assert far_zone_tensor(Geometry(3.0, Z, 2.0)).v[2, 2] == 0.0


def test_far_zone_at_cos_maxima():
    w0 = 1.3
    for k in (1, 5, 40):
        r = 2 * np.pi * k / w0
        assert far_zone_tensor(Geometry(r, Z, w0)).v[0, 0] == pytest.approx(-w0**2 / (4 * np.pi * r), rel=1e-12)


@pytest.mark.parametrize("k", [64, 100, 317, 1000])
def test_far_zone_matches_full_tensor_at_extrema(k):
    w0 = 1.0
    g = Geometry(k * np.pi / w0, Z, w0)
    assert g.x >= 200
    full = dipole_tensor(g).v[0, 0]
    far = far_zone_tensor(g).v[0, 0]
    assert abs(full - far) / abs(far) <= 0.01


def test_trace_identity(rng):
    for _ in range(200):
        r, w0 = rng.uniform(0.01, 50), rng.uniform(0.01, 5)
        g = Geometry(r, random_unit(rng), w0)
        expected = -w0**2 * np.cos(w0 * r) / (2 * np.pi * r)
        # the identity is a cancellation; judge it against the size of the terms
        scale = (1 + w0 * r + (w0 * r) ** 2) / (4 * np.pi * r**3)
        assert abs(np.trace(dipole_tensor(g).v) - expected) <= 1e-12 * scale


@settings(max_examples=50)
@given(st.floats(0.01, 20), st.floats(0.01, 5), st.integers(0, 2**31))
def test_symmetric_and_parity_invariant(r, w0, seed):
    n = random_unit(np.random.default_rng(seed))
    g = Geometry(r, n, w0)
    v = dipole_tensor(g).v
    assert np.array_equal(v, v.T)
    np.testing.assert_array_equal(v, dipole_tensor(g.reversed()).v)


def test_rotational_covariance(rng):
    for _ in range(50):
        n = random_unit(rng)
        rot = random_rotation(rng)
        r, w0 = rng.uniform(0.1, 10), rng.uniform(0.1, 3)
        v = dipole_tensor(Geometry(r, n, w0)).v
        v_rot = dipole_tensor(Geometry(r, rot @ n, w0)).v
        np.testing.assert_allclose(v_rot, rot @ v @ rot.T, atol=1e-12 * np.linalg.norm(v))


def test_chi_kernel_values():
    g = Geometry(1.3, Z, 1.0)
    np.testing.assert_array_equal(chi_kernel(0.0, g), np.zeros((3, 3)))
    w = 2.1
    r = g.r
    expected_zz = -2 * (np.sin(w * r) / r**3 - w * np.cos(w * r) / r**2)
    assert chi_kernel(w, g)[2, 2] == pytest.approx(expected_zz, rel=1e-14)
    w = np.pi / (2 * r)
    assert chi_kernel(w, g)[0, 0] == pytest.approx(1 / r**3 - w**2 / r, rel=1e-14)


def test_chi_kernel_symmetric(rng):
    g = Geometry(0.7, random_unit(rng), 1.0)
    for w in rng.uniform(0, 30, size=20):
        k = chi_kernel(w, g)
        assert np.array_equal(k, k.T)
    with pytest.raises(ValueError):
        chi_kernel(-1.0, g)
