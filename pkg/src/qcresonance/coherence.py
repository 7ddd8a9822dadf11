"""Coherence and entanglement quantities of a two-atom state."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .core import DEFAULT_TOL, Tolerances, as_dipole, as_state

Atom = Literal["A", "B"]

_SYSY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))  # sigma_y (x) sigma_y


@dataclass(frozen=True)
class CoherenceReport:
    q: float
    l1: float
    concurrence: float
    nonpolar_a: bool
    nonpolar_b: bool


def quantum_classicality(rho) -> float:
    """Re <eg|rho|ge>."""
    return as_state(rho).rho23.real


def l1_coherence(rho) -> float:
    """Sum of moduli of the off-diagonal elements."""
    m = np.asarray(as_state(rho).elements)
    return float(np.abs(m[~np.eye(4, dtype=bool)]).sum())


def concurrence(rho) -> float:
    """Two-qubit concurrence from the spin-flipped state.

    With rho = A A^dagger, the square roots of the eigenvalues of rho * rho~
    are the singular values of A^T (sigma_y x sigma_y) A, which avoids square
    roots of near-zero eigenvalues. Eigenvalues of rho below roundoff level
    are treated as exact zeros.
    """
    m = np.asarray(as_state(rho).elements)
    w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.where(w > 16 * np.finfo(float).eps * max(w[-1], 0.0), w, 0.0)
    a = u * np.sqrt(w)
    lam = np.linalg.svd(a.T @ _SYSY @ a, compute_uv=False)
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def reduced_state(rho, atom: Atom) -> NDArray[np.complex128]:
    """Partial trace onto one atom, ordering {|e>, |g>}."""
    t = np.asarray(as_state(rho).elements).reshape(2, 2, 2, 2)
    if atom == "A":
        return np.einsum("ijkj->ik", t)
    if atom == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"atom must be 'A' or 'B', got {atom!r}")


def dipole_expectation(rho, d, atom: Atom) -> NDArray[np.float64]:
    """<D_i> = Tr(rho_atom D_i) with D_i = d_i |g><e| + conj(d_i) |e><g|."""
    red = reduced_state(rho, atom)
    d = as_dipole(d).d
    val = d * red[0, 1] + d.conj() * red[1, 0]
    return val.real


def is_nonpolar(rho, d, atom: Atom, tol: Tolerances = DEFAULT_TOL) -> bool:
    d = as_dipole(d)
    return bool(np.max(np.abs(dipole_expectation(rho, d, atom))) <= tol.tol_zero * d.norm)


def coherence_report(rho, d_a, d_b=None, tol: Tolerances = DEFAULT_TOL) -> CoherenceReport:
    d_b = d_a if d_b is None else d_b
    return CoherenceReport(
        q=quantum_classicality(rho),
        l1=l1_coherence(rho),
        concurrence=concurrence(rho),
        nonpolar_a=is_nonpolar(rho, d_a, "A", tol),
        nonpolar_b=is_nonpolar(rho, d_b, "B", tol),
    )
