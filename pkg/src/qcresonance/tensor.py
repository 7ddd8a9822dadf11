"""Retarded dipole-dipole interaction tensor and the spectral kernel of the
antisymmetric vacuum field correlation function."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .core import Geometry


@dataclass(frozen=True, eq=False)
class InteractionTensor:
    v: NDArray[np.float64]
    geometry: Geometry

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.v, dtype=dtype)


def projectors(n) -> tuple[NDArray, NDArray]:
    """Return (delta_ij - 3 n_i n_j, delta_ij - n_i n_j)."""
    n = np.asarray(n, dtype=float)
    nn = np.outer(n, n)
    return np.eye(3) - 3 * nn, np.eye(3) - nn


def _build(v, geom):
    v = 0.5 * (v + v.T)
    v.setflags(write=False)
    return InteractionTensor(v, geom)


def dipole_tensor(geom: Geometry) -> InteractionTensor:
    r"""Retarded dipole-dipole interaction tensor.

    .. math::

        V_{ij} = \frac{1}{4\pi r^3}\Big[(\delta_{ij} - 3n_in_j)(\cos x + x\sin x)
                 - (\delta_{ij} - n_in_j)\,x^2\cos x\Big],\qquad x = \omega_0 r
    """
    p, t = projectors(geom.n)
    x = geom.x
    c, s = np.cos(x), np.sin(x)
    v = (p * (c + x * s) - t * (x * x * c)) / (4 * np.pi * geom.r**3)
    return _build(v, geom)


def near_zone_tensor(geom: Geometry) -> InteractionTensor:
    """Static limit omega0 r -> 0: (delta_ij - 3 n_i n_j)/(4 pi r^3)."""
    p, _ = projectors(geom.n)
    return _build(p / (4 * np.pi * geom.r**3), geom)


def far_zone_tensor(geom: Geometry) -> InteractionTensor:
    """Leading r^-1 term, keeping its cos(omega0 r) oscillation."""
    _, t = projectors(geom.n)
    w = geom.omega0
    return _build(-t * w * w * np.cos(geom.x) / (4 * np.pi * geom.r), geom)


def radial_factors(omega, r: float):
    """Scalar factors multiplying the two projectors in the spectral kernel.

    Returns ``(sin wr/r^3 - w cos wr/r^2, w^2 sin wr/r)`` so that
    ``g_ij = P_ij * f_static - T_ij * f_rad``. Works elementwise on arrays.
    """
    omega = np.asarray(omega, dtype=float)
    s = np.sin(omega * r)
    c = np.cos(omega * r)
    return s / r**3 - omega * c / r**2, omega * omega * s / r


def chi_kernel(omega: float, geom: Geometry) -> NDArray[np.float64]:
    """Bracketed real integrand g_ij(omega) of the spectral representation

        chi_ij(dtau) = int_0^inf domega/(8 pi^2) g_ij(omega) (e^{i omega dtau} - e^{-i omega dtau}).

    The 1/(8 pi^2) prefactor and the time-dependent factor are left to the caller.
    """
    if omega < 0:
        raise ValueError(f"kernel is defined for omega >= 0, got {omega!r}")
    p, t = projectors(geom.n)
    f_static, f_rad = radial_factors(omega, geom.r)
    return p * float(f_static) - t * float(f_rad)
