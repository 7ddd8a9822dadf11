"""
Independent numerical route to the steady resonance energy.

The energy is the causal time integral of the antisymmetric field correlator
against the atomic correlation function, summed over both atoms. Here that
integral is regulated with a damping factor exp(-eta * dtau), the dtau
integral is done exactly (it only involves exponentials), the remaining
frequency integral is done by composite Gauss-Legendre quadrature with an
accelerated oscillatory tail, and the result is extrapolated to eta -> 0.

Nothing in this module uses the closed-form interaction tensor.

Frequency integrand
-------------------
With z = omega0 - i*eta the exact dtau integral gives the weight

    K(omega) = 1/(eta - i(omega - omega0)) - 1/(eta + i(omega + omega0))
             = 2 i omega / (omega^2 - z^2)

for the e^{-i omega0 dtau} part of the correlation function, and -conj(K)
for the e^{+i omega0 dtau} part. Multiplied by the kernel, the pieces with
omega cos(omega r) and omega^2 sin(omega r) grow at large omega. Their
polynomial parts, ``cos(omega r)`` and ``omega sin(omega r)``, integrate to
zero in the Abel sense for r > 0 and are removed exactly before quadrature,
leaving two absolutely or conditionally convergent integrals

    J_sin = int_0^inf omega sin(omega r) / (omega^2 - z^2) domega
    J_cos = int_0^inf cos(omega r) / (omega^2 - z^2) domega.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from .core import DEFAULT_TOL, DomainError, Geometry, Tolerances, as_dipole, as_state
from .quadrature import neville_to_zero, panel_integrals, wynn_epsilon
from .tensor import projectors, radial_factors

log = logging.getLogger(__name__)


class UnsupportedInputError(ValueError):
    """The oracle only handles stationary states (rho_14 = rho_41 = 0)."""


class OracleNonConvergence(RuntimeError):
    """The requested accuracy was not reached; ``partial`` holds the best result."""

    def __init__(self, message: str, partial: OracleResult):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class OracleConfig:
    """Numerical settings of the quadrature oracle.

    eta_sequence
        Damping rates of the time integral, in units of omega0, strictly
        decreasing. ``None`` selects 2**-k for k = 4..12, in units of
        min(omega0, 10/r) so that eta*r stays below 1 at large separations.
    order
        Gauss-Legendre nodes per panel; the error estimate reruns with
        ``order + 10`` nodes.
    tail_panels
        Half-period panels summed beyond the last fixed breakpoint before
        Wynn acceleration.
    """

    eta_sequence: tuple[float, ...] | None = None
    rel_tol: float = 1e-3
    max_evals: int = 5_000_000
    order: int = 20
    tail_panels: int = 40
    abs_floor: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        if self.eta_sequence is not None:
            eta = np.asarray(self.eta_sequence, dtype=float)
            if eta.size < 2 or np.any(eta <= 0) or np.any(np.diff(eta) >= 0):
                raise DomainError("eta_sequence must hold at least two strictly decreasing positive values")
            object.__setattr__(self, "eta_sequence", tuple(float(e) for e in eta))
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol!r}")
        if self.max_evals <= 0 or self.order < 2 or self.tail_panels < 4:
            raise DomainError("max_evals, order and tail_panels must be positive (order >= 2, tail_panels >= 4)")

    def etas(self, omega0: float, r: float | None = None) -> NDArray[np.float64]:
        if self.eta_sequence is not None:
            return omega0 * np.asarray(self.eta_sequence, dtype=float)
        unit = omega0 if r is None else min(omega0, 10.0 / r)
        return unit * 2.0 ** -np.arange(4, 13)


@dataclass(frozen=True)
class OracleResult:
    value: float
    eta_extrapolation_table: list[tuple[float, float]]
    estimated_error: float
    term_ab: float = 0.0
    term_ba: float = 0.0
    evaluations: int = 0
    converged: bool = True
    details: dict = field(default_factory=dict, compare=False)


def _breakpoints(r: float, omega0: float, eta: float) -> NDArray[np.float64]:
    half_period = np.pi / r
    top = max(2.0 * omega0, omega0 + 64 * eta) + 4 * half_period
    k_top = int(np.ceil(top / half_period))
    pts = [half_period * np.arange(k_top + 1)]
    # geometric grading around the Lorentzian peak of width eta at omega0,
    # continued until panels are no longer than the distance to the peak
    steps = eta * 2.0 ** np.arange(0, 80)
    pts += [omega0 + steps[steps < top], omega0 - steps[steps < omega0], [omega0]]
    edges = np.unique(np.concatenate(pts))
    return edges[edges <= k_top * half_period]


def _integrands(r: float, z: complex):
    def f(w):
        den = w * w - z * z
        return np.stack([w * np.sin(w * r) / den, np.cos(w * r) / den], axis=-1)

    return f


def frequency_integrals(r: float, omega0: float, eta: float, order: int = 20, tail_panels: int = 40):
    """Quadrature of (J_sin, J_cos) at damping ``eta``.

    Returns ``(values, error_estimate, evaluations)`` where values is a
    complex array of length 2.
    """
    z = omega0 - 1j * eta
    f = _integrands(r, z)
    edges = _breakpoints(r, omega0, eta)
    half_period = np.pi / r
    tail_edges = edges[-1] + half_period * np.arange(tail_panels + 1)

    def run(n):
        body = panel_integrals(f, edges, n).sum(axis=0)
        tail = panel_integrals(f, tail_edges, n)
        partial = body + np.cumsum(tail, axis=0)
        lim, tail_err = wynn_epsilon(partial)
        # compare against the acceleration of a shorter prefix as a second check
        lim_short, _ = wynn_epsilon(partial[: tail_panels - 6])
        return lim, np.maximum(tail_err, np.abs(lim - lim_short))

    lo, lo_err = run(order)
    hi, hi_err = run(order + 10)
    err = np.abs(hi - lo) + hi_err
    evals = (len(edges) - 1 + tail_panels) * (2 * order + 10)
    return hi, err, evals


def _dipole_contractions(a, b, n):
    """Contract a_i conj(b_j) with the two projectors of the kernel."""
    p, t = projectors(n)
    ab = np.outer(a, b.conj())
    return complex(np.sum(ab * p)), complex(np.sum(ab * t))


def _term(coh: complex, alpha_p: complex, alpha_t: complex, r: float, z: complex, J) -> complex:
    """int_0^inf K(omega) * coh * (alpha_p f_static - alpha_t f_rad) domega, regularized."""
    j_sin, j_cos = J
    c_sin = alpha_p / r**3 - alpha_t * z * z / r
    c_cos = -alpha_p * z * z / r**2
    return 2j * coh * (c_sin * j_sin + c_cos * j_cos)


def regulated_terms(rho, d_a, d_b, geom: Geometry, eta: float, order: int = 20, tail_panels: int = 40):
    """The A-side and B-side contributions at finite damping ``eta``.

    Returns ``(term_ab, term_ba, quadrature_error, evaluations)``.
    """
    rho = as_state(rho)
    a = as_dipole(d_a).d
    b = as_dipole(d_b).d
    z = geom.omega0 - 1j * eta
    J, jerr, evals = frequency_integrals(geom.r, geom.omega0, eta, order, tail_panels)
    pref = 1.0 / (4 * np.pi**2)
    # the e^{-i w0 dtau} part carries K; the e^{+i w0 dtau} part carries -conj(K)
    # so the bracket collapses to 2 Im(K X) with X the rho_23 (rho_32) piece
    ap, at = _dipole_contractions(a, b, geom.n)
    ab = pref * _term(rho.rho23, ap, at, geom.r, z, J).imag
    bp, bt = _dipole_contractions(b, a, -geom.n)
    ba = pref * _term(rho.rho32, bp, bt, geom.r, z, J).imag
    # error propagation: each coefficient multiplies one integral
    mag = pref * 2 * max(abs(rho.rho23), abs(rho.rho32)) * (
        (max(abs(ap), abs(bp)) / geom.r**3 + max(abs(at), abs(bt)) * abs(z) ** 2 / geom.r) * jerr[0]
        + max(abs(ap), abs(bp)) * abs(z) ** 2 / geom.r**2 * jerr[1]
    )
    return ab, ba, 2 * mag, evals


def _envelope(d_a, d_b, geom: Geometry) -> float:
    x = geom.x
    return as_dipole(d_a).norm * as_dipole(d_b).norm * (1 + x + x * x) / (4 * np.pi * geom.r**3)


def oracle_steady_energy(
    rho,
    d_a,
    d_b,
    geom: Geometry,
    cfg: OracleConfig = OracleConfig(),
    tol: Tolerances = DEFAULT_TOL,
) -> OracleResult:
    """Steady resonance energy by regulated quadrature and eta -> 0 extrapolation.

    Raises
    ------
    UnsupportedInputError
        if the state has |ee>/|gg> coherence (non-stationary correlations).
    OracleNonConvergence
        if the estimated error exceeds ``rel_tol`` (relative to the value, or
        to ``abs_floor`` times the energy envelope when the value is tiny), or
        the evaluation budget is exhausted.
    """
    rho = as_state(rho)
    if abs(rho.rho14) + abs(rho.rho41) > tol.tol_zero:
        raise UnsupportedInputError("oracle supports only states with rho_14 = rho_41 = 0")

    etas = cfg.etas(geom.omega0, geom.r)

    def one(eta):
        return regulated_terms(rho, d_a, d_b, geom, eta, cfg.order, cfg.tail_panels)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            rows = list(ex.map(one, etas))
    else:
        rows = [one(eta) for eta in etas]

    ab = np.array([row[0] for row in rows])
    ba = np.array([row[1] for row in rows])
    qerr = np.array([row[2] for row in rows])
    evals = int(sum(row[3] for row in rows))
    total = ab + ba

    value, xerr, tableau = neville_to_zero(etas, total)
    ab0, _, _ = neville_to_zero(etas, ab)
    ba0, _, _ = neville_to_zero(etas, ba)
    # quadrature noise is amplified by the extrapolation weights
    amplification = _neville_weights_norm(etas)
    err = xerr + amplification * float(qerr.max()) + 64 * np.finfo(float).eps * float(np.abs(total).max())

    result = OracleResult(
        value=value,
        eta_extrapolation_table=[(float(e), float(v)) for e, v in zip(etas, total)],
        estimated_error=float(err),
        term_ab=ab0,
        term_ba=ba0,
        evaluations=evals,
        details={"extrapolation_residual": xerr, "quadrature_error": float(qerr.max()),
                 "tableau_diagonal": [float(p[-1]) for p in tableau]},
    )
    log.debug("oracle value %.17g +- %.3g (%d evaluations)", value, err, evals)

    target = cfg.rel_tol * max(abs(value), cfg.abs_floor * _envelope(d_a, d_b, geom))
    if evals > cfg.max_evals:
        raise OracleNonConvergence(f"evaluation budget exceeded ({evals} > {cfg.max_evals})",
                                   replace(result, converged=False))
    if not err <= target:
        raise OracleNonConvergence(f"estimated error {err:.3e} exceeds target {target:.3e}",
                                   replace(result, converged=False))
    return result


def _neville_weights_norm(h) -> float:
    """Sum of |weights| of the Lagrange extrapolant to 0 through the nodes h."""
    h = np.asarray(h, dtype=float)
    w = np.ones_like(h)
    for j in range(len(h)):
        for k in range(len(h)):
            if k != j:
                w[j] *= h[k] / (h[k] - h[j])
    return float(np.abs(w).sum())


# ---------------------------------------------------------------------------
# time-domain field correlator, used to spot-check the spectral representation


def chi_time_domain(delta_tau: float, geom: Geometry, eta: float, order: int = 20) -> NDArray[np.complex128]:
    """chi_ij(dtau) = int_0^inf domega/(8 pi^2) g_ij(omega) (e^{i omega dtau} - e^{-i omega dtau}) e^{-eta omega}.

    Evaluated by quadrature over panels of half the fastest oscillation
    period, up to where the exponential damping leaves < e^-50.
    """
    if not eta > 0:
        raise DomainError(f"frequency regulator eta must be > 0, got {eta!r}")
    if delta_tau == 0:
        return np.zeros((3, 3), dtype=complex)
    r = geom.r
    omega_max = 50.0 / eta
    width = np.pi / (r + abs(delta_tau))
    edges = np.append(np.arange(0.0, omega_max, width), omega_max)

    def f(w):
        fs, fr = radial_factors(w, r)
        damp = np.sin(w * delta_tau) * np.exp(-eta * w)
        return np.stack([fs * damp, fr * damp], axis=-1)

    s_p, s_t = panel_integrals(f, edges, order).sum(axis=0)
    p, t = projectors(geom.n)
    return 2j / (8 * np.pi**2) * (p * s_p - t * s_t)


def chi_wightman(delta_tau: float, geom: Geometry, eps: float) -> NDArray[np.complex128]:
    """Antisymmetric part (W(dtau) - W(-dtau))/2 of the vacuum Wightman function.

    W_ij(t) = (1/4 pi^2) (delta_ij d_t^2 - d_i d_j) 1/((t - i eps)^2 - r^2)
    written out explicitly; closed form, no quadrature.
    """
    if not eps > 0:
        raise DomainError(f"regulator eps must be > 0, got {eps!r}")
    r = geom.r
    nn = np.outer(geom.n, geom.n)

    def w(t):
        tt = t - 1j * eps
        s = tt * tt - r * r
        return (-4 * np.eye(3) / s**2 + 8 * (np.eye(3) * tt * tt - r * r * nn) / s**3) / (4 * np.pi**2)

    return 0.5 * (w(delta_tau) - w(-delta_tau))
