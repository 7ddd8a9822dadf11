"""
Domain types shared by every module: two-atom states, transition dipoles,
geometry and numeric tolerances.

Basis convention
----------------
All 4x4 matrices are written in the ordered basis

    index 0: |ee>   index 1: |eg>   index 2: |ge>   index 3: |gg>

where the first label belongs to atom A. The coherence rho_23 used
throughout the package is therefore ``rho[1, 2] = <eg|rho|ge>``.
Reduced single-atom matrices use the ordering {|e>, |g>}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

EE, EG, GE, GG = 0, 1, 2, 3


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances used by validation and zero tests."""

    tol_herm: float = 1e-12
    tol_trace: float = 1e-12
    tol_psd: float = 1e-10
    tol_geom: float = 1e-12
    tol_zero: float = 1e-12

    def __post_init__(self):
        for name in ("tol_herm", "tol_trace", "tol_psd", "tol_geom", "tol_zero"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be strictly positive, got {v!r}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class TwoAtomState:
    """Density matrix of the two-atom system in the basis {ee, eg, ge, gg}.

    Construction only checks the shape. Physical validity (Hermiticity,
    unit trace, positivity) is reported by :func:`validate_state`, so that
    slightly imperfect experimental matrices can still be carried around.
    """

    elements: NDArray[np.complex128]

    def __post_init__(self):
        m = np.asarray(self.elements, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"two-atom state must be a 4x4 matrix, got shape {m.shape}")
        object.__setattr__(self, "elements", _frozen(m))

    @property
    def rho23(self) -> complex:
        return complex(self.elements[EG, GE])

    @property
    def rho32(self) -> complex:
        return complex(self.elements[GE, EG])

    @property
    def rho14(self) -> complex:
        return complex(self.elements[EE, GG])

    @property
    def rho41(self) -> complex:
        return complex(self.elements[GG, EE])

    def dagger(self) -> TwoAtomState:
        return TwoAtomState(self.elements.conj().T)

    def swap_atoms(self) -> TwoAtomState:
        """Relabel A <-> B, i.e. exchange basis rows/columns eg <-> ge."""
        p = [EE, GE, EG, GG]
        return TwoAtomState(self.elements[np.ix_(p, p)])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.elements, dtype=dtype)


def as_state(rho) -> TwoAtomState:
    return rho if isinstance(rho, TwoAtomState) else TwoAtomState(np.asarray(rho))


@dataclass(frozen=True, eq=False)
class TransitionDipole:
    """Transition dipole d_i = <g|D_i|e> of one atom, natural units."""

    d: NDArray[np.complex128]

    def __post_init__(self):
        v = np.asarray(self.d, dtype=complex).reshape(-1)
        if v.shape != (3,):
            raise ValueError(f"transition dipole must have 3 components, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise DomainError("transition dipole components must be finite")
        object.__setattr__(self, "d", _frozen(v))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.d))


def as_dipole(d) -> TransitionDipole:
    return d if isinstance(d, TransitionDipole) else TransitionDipole(np.asarray(d))


@dataclass(frozen=True, eq=False)
class Geometry:
    """Separation ``r`` along the unit direction ``n`` (from A to B) and
    transition frequency ``omega0``."""

    r: float
    n: NDArray[np.float64] = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    omega0: float = 1.0
    tol_geom: float = DEFAULT_TOL.tol_geom

    def __post_init__(self):
        r = float(self.r)
        w = float(self.omega0)
        n = np.asarray(self.n, dtype=float).reshape(-1)
        if not (np.isfinite(r) and r > 0):
            raise DomainError(f"separation r must be > 0, got {self.r!r}")
        if not (np.isfinite(w) and w > 0):
            raise DomainError(f"transition frequency omega0 must be > 0, got {self.omega0!r}")
        if n.shape != (3,):
            raise ValueError(f"direction n must have 3 components, got {n.shape[0]}")
        if abs(np.linalg.norm(n) - 1.0) > self.tol_geom:
            raise DomainError(f"direction n must be a unit vector, |n| = {np.linalg.norm(n)!r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "omega0", w)
        object.__setattr__(self, "n", _frozen(n))

    @property
    def x(self) -> float:
        """The retardation parameter omega0 * r."""
        return self.omega0 * self.r

    def reversed(self) -> Geometry:
        return Geometry(self.r, -self.n, self.omega0, self.tol_geom)


def validate_state(rho, tol: Tolerances = DEFAULT_TOL) -> list[str]:
    """Return the list of violated density-matrix invariants (empty if valid).

    Deviations are measured relative to the natural scale of each check:
    max |rho - rho^dagger| for Hermiticity, |Tr rho - 1| for the trace and the
    smallest eigenvalue of the Hermitian part for positivity.
    """
    m = np.asarray(as_state(rho).elements)
    report = []
    herm_dev = float(np.max(np.abs(m - m.conj().T)))
    if herm_dev > tol.tol_herm:
        report.append(f"non-Hermitian: max|rho_ij - conj(rho_ji)| = {herm_dev:.3e}")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > tol.tol_trace:
        report.append(f"non-unit trace: Tr(rho) = {tr.real:.15g}{tr.imag:+.3g}j")
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
    if lam_min < -tol.tol_psd:
        report.append(f"not positive semidefinite: min eigenvalue = {lam_min:.3e}")
    return report


def pure_state(theta: float, phi: float) -> TwoAtomState:
    """Projector onto sin(theta)|ge> + cos(theta) e^{i phi}|eg>."""
    psi = np.zeros(4, dtype=complex)
    psi[GE] = np.sin(theta)
    psi[EG] = np.cos(theta) * np.exp(1j * phi)
    return TwoAtomState(np.outer(psi, psi.conj()))


def werner_state(p: float) -> TwoAtomState:
    """(1 - p)/4 * I + p |Psi+><Psi+| with |Psi+> = (|ge> + |eg>)/sqrt(2)."""
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"Werner parameter p must lie in [0, 1], got {p!r}")
    # entries filled directly: the 1/sqrt(2) outer product is not exact in floating point
    m = np.zeros((4, 4), dtype=complex)
    m[EE, EE] = m[GG, GG] = (1 - p) / 4
    m[EG, EG] = m[GE, GE] = (1 + p) / 4
    m[EG, GE] = m[GE, EG] = p / 2
    return TwoAtomState(m)


def product_state(ket_a: ArrayLike, ket_b: ArrayLike) -> TwoAtomState:
    """Pure product state from single-atom kets given as (c_e, c_g)."""
    psi = np.kron(np.asarray(ket_a, dtype=complex), np.asarray(ket_b, dtype=complex))
    psi = psi / np.linalg.norm(psi)
    return TwoAtomState(np.outer(psi, psi.conj()))


def ket_state(psi: ArrayLike) -> TwoAtomState:
    """Projector onto a (normalised) 4-component ket in the {ee, eg, ge, gg} basis."""
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return TwoAtomState(np.outer(psi, psi.conj()))
