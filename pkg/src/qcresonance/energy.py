"""
Resonance interaction energy of two identical two-level atoms.

Only the coherences rho_23, rho_32 (between |eg> and |ge>) and rho_14,
rho_41 (between |ee> and |gg>) enter at second order. The former give a
steady energy, the latter a term oscillating at 2*omega0 whose time average
vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .core import DEFAULT_TOL, DomainError, Geometry, Tolerances, as_dipole, as_state
from .tensor import dipole_tensor


class ConsistencyError(RuntimeError):
    """Two formally equal expressions disagree beyond tolerance."""


@dataclass(frozen=True)
class EnergyResult:
    """Steady energy plus the complex amplitude of the e^{-2 i omega0 tau} term.

    The physical oscillating energy is ``2 * Re(oscillating_amplitude * exp(-2j*omega0*tau))``.
    """

    steady: float
    oscillating_amplitude: complex
    omega0: float

    def at(self, tau: float) -> float:
        return self.steady + 2 * (self.oscillating_amplitude * np.exp(-2j * self.omega0 * tau)).real


def energy_scale(d_a, d_b, geom: Geometry) -> float:
    """|d_A| |d_B| / (4 pi r^3): the natural near-zone energy unit."""
    return as_dipole(d_a).norm * as_dipole(d_b).norm / (4 * np.pi * geom.r**3)


def dimensionless(energy: float, d_a, d_b, geom: Geometry) -> float:
    return energy / energy_scale(d_a, d_b, geom)


def atomic_correlation(rho, d_a, d_b, omega0: float, tau: float, tau_prime: float) -> NDArray[np.complex128]:
    """Symmetric statistical function C^{AB}_ij(tau, tau') of the two dipoles.

    ``C[i, j]`` pairs component i of atom A at time tau with component j of
    atom B at tau'. The last two terms depend on tau + tau' and make the
    function non-stationary when rho_14 != 0.
    """
    rho = as_state(rho)
    a = as_dipole(d_a).d
    b = as_dipole(d_b).d
    dt = tau - tau_prime
    ph = np.exp(-1j * omega0 * dt)
    osc = np.exp(-2j * omega0 * tau)
    return (
        rho.rho23 * np.outer(a, b.conj()) * ph
        + rho.rho32 * np.outer(a.conj(), b) * ph.conjugate()
        + rho.rho14 * np.outer(a, b) * ph.conjugate() * osc
        + rho.rho41 * np.outer(a.conj(), b.conj()) * ph * osc.conjugate()
    )


def steady_energy(rho, d_a, d_b, geom: Geometry, tol: Tolerances = DEFAULT_TOL) -> float:
    """Time-independent resonance energy (rho_23 d^A_i d^B*_j + rho_32 d^A*_i d^B_j) V_ij.

    For identical dipoles this equals ``2 Q Re(d_i d*_j) V_ij`` with
    Q = Re rho_23; the two forms are cross-checked and a mismatch raises
    :class:`ConsistencyError`.
    """
    rho = as_state(rho)
    a = as_dipole(d_a).d
    b = as_dipole(d_b).d
    v = dipole_tensor(geom).v
    val = rho.rho23 * (a @ v @ b.conj()) + rho.rho32 * (a.conj() @ v @ b)
    if np.array_equal(a, b):
        # scale: every term is bounded by |rho|_max |d|^2 |V|_F
        scale = max(abs(rho.rho23), abs(rho.rho32), 1.0) * np.vdot(a, a).real * np.linalg.norm(v)
        reform = 2 * rho.rho23.real * float(np.real(a @ v @ a.conj()))
        # a Hermitian rho within tol_herm leaves a residue of that relative size
        limit = 10 * (tol.tol_zero + tol.tol_herm) * scale
        if abs(val.imag) > limit or abs(val.real - reform) > limit:
            raise ConsistencyError(
                f"steady energy {val!r} inconsistent with 2*Q*Re(d d*)V = {reform!r}"
            )
    return float(val.real)


def oscillating_amplitude(rho, d_a, d_b, geom: Geometry) -> complex:
    """Amplitude rho_14 d^A_i d^B_j V_ij of the e^{-2 i omega0 tau} term."""
    rho = as_state(rho)
    a = as_dipole(d_a).d
    b = as_dipole(d_b).d
    return complex(rho.rho14 * (a @ dipole_tensor(geom).v @ b))


def interaction_energy(rho, d_a, d_b, geom: Geometry, tol: Tolerances = DEFAULT_TOL) -> EnergyResult:
    return EnergyResult(
        steady=steady_energy(rho, d_a, d_b, geom, tol),
        oscillating_amplitude=oscillating_amplitude(rho, d_a, d_b, geom),
        omega0=geom.omega0,
    )


def time_averaged_energy(rho, d_a, d_b, geom: Geometry, T: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Average of the full energy over observation times tau in [0, T]."""
    if not T > 0:
        raise DomainError(f"averaging time T must be > 0, got {T!r}")
    amp = oscillating_amplitude(rho, d_a, d_b, geom)
    theta = 2 * geom.omega0 * T
    # (e^{-i theta} - 1)/(-i theta) written via expm1 to stay accurate for small theta
    avg = np.expm1(-1j * theta) / (-1j * theta)
    return steady_energy(rho, d_a, d_b, geom, tol) + 2 * (amp * avg).real
