"""Run configuration for the command-line front end.

Documents are YAML (JSON is accepted as well). Unknown keys are rejected.
Complex numbers are written as ``[re, im]`` pairs; a bare number is real.
See README.md for the full schema.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .core import (
    DEFAULT_TOL,
    Geometry,
    Tolerances,
    TransitionDipole,
    TwoAtomState,
    pure_state,
    validate_state,
    werner_state,
)
from .oracle import OracleConfig

MODES = ("energy", "tensor", "coherence", "sweep", "scan", "oracle-check", "slope-fit")

Real = float
ComplexLike = Union[Real, tuple[Real, Real]]


class ConfigError(ValueError):
    """The configuration document is malformed or violates an invariant."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def to_complex(c: ComplexLike) -> complex:
    if isinstance(c, tuple):
        return complex(c[0], c[1])
    return complex(c)


class PureSpec(_Strict):
    theta: Real
    phi: Real = 0.0


class WernerSpec(_Strict):
    p: Real = Field(ge=0.0, le=1.0)


class StateSpec(_Strict):
    pure: Optional[PureSpec] = None
    werner: Optional[WernerSpec] = None
    raw: Optional[list[ComplexLike]] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        given = [k for k in ("pure", "werner", "raw") if getattr(self, k) is not None]
        if len(given) != 1:
            raise ValueError(f"state must give exactly one of pure / werner / raw, got {given or 'none'}")
        if self.raw is not None and len(self.raw) != 16:
            raise ValueError(f"raw state needs 16 entries (row-major 4x4), got {len(self.raw)}")
        return self

    def build(self) -> TwoAtomState:
        if self.pure is not None:
            return pure_state(self.pure.theta, self.pure.phi)
        if self.werner is not None:
            return werner_state(self.werner.p)
        return TwoAtomState(np.array([to_complex(c) for c in self.raw]).reshape(4, 4))


class RangeSpec(_Strict):
    min: Real = Field(gt=0)
    max: Real = Field(gt=0)
    count: int = Field(ge=2)
    spacing: Literal["linear", "log", "extrema"] = "log"

    @model_validator(mode="after")
    def _ordered(self):
        if not self.max > self.min:
            raise ValueError("r_range needs max > min")
        return self

    def values(self, omega0: float) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.min, self.max, self.count)
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        # extrema of cos(omega0 r): r_k = k pi / omega0, k log-spaced integers
        k_lo = max(1, int(np.ceil(self.min * omega0 / np.pi)))
        k_hi = int(np.floor(self.max * omega0 / np.pi))
        if k_hi < k_lo:
            raise ConfigError("r_range contains no extremum r = k*pi/omega0")
        k = np.unique(np.round(np.geomspace(k_lo, k_hi, self.count)).astype(int))
        return k * np.pi / omega0


class GridSpec(_Strict):
    min: Real
    max: Real
    count: int = Field(ge=1)

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


Grid = Union[list[Real], GridSpec]


def _grid(g: Grid | None) -> np.ndarray | None:
    if g is None:
        return None
    return g.values() if isinstance(g, GridSpec) else np.asarray(g, dtype=float)


class ScanSpec(_Strict):
    theta: Optional[Grid] = None
    phi: Optional[Grid] = None
    p: Optional[Grid] = None

    @model_validator(mode="after")
    def _family(self):
        pure = self.theta is not None or self.phi is not None
        if pure == (self.p is not None):
            raise ValueError("scan must give either theta/phi (pure family) or p (Werner family)")
        return self

    @property
    def family(self) -> str:
        return "werner" if self.p is not None else "pure"

    def points(self) -> list[tuple[float, ...]]:
        if self.family == "werner":
            return [(float(p),) for p in _grid(self.p)]
        thetas = _grid(self.theta) if self.theta is not None else np.array([np.pi / 4])
        phis = _grid(self.phi) if self.phi is not None else np.array([0.0])
        return [(float(t), float(f)) for t in thetas for f in phis]


class OracleSpec(_Strict):
    eta_sequence: Optional[list[Real]] = None
    rel_tol: Real = 1e-3
    max_evals: int = 5_000_000
    order: int = 20
    tail_panels: int = 40

    def build(self, workers: int = 1) -> OracleConfig:
        return OracleConfig(
            eta_sequence=None if self.eta_sequence is None else tuple(self.eta_sequence),
            rel_tol=self.rel_tol,
            max_evals=self.max_evals,
            order=self.order,
            tail_panels=self.tail_panels,
            workers=workers,
        )


class TolSpec(_Strict):
    tol_herm: Real = DEFAULT_TOL.tol_herm
    tol_trace: Real = DEFAULT_TOL.tol_trace
    tol_psd: Real = DEFAULT_TOL.tol_psd
    tol_geom: Real = DEFAULT_TOL.tol_geom
    tol_zero: Real = DEFAULT_TOL.tol_zero


class RunConfig(_Strict):
    mode: Optional[Literal[MODES]] = None
    state: Optional[StateSpec] = None
    dipole_a: tuple[ComplexLike, ComplexLike, ComplexLike] = (1.0, 0.0, 0.0)
    dipole_b: Optional[tuple[ComplexLike, ComplexLike, ComplexLike]] = None
    omega0: Real = Field(default=1.0, gt=0)
    r: Optional[Real] = Field(default=None, gt=0)
    r_range: Optional[RangeSpec] = None
    n: tuple[Real, Real, Real] = (0.0, 0.0, 1.0)
    T: Optional[Real] = Field(default=None, gt=0)
    scan: Optional[ScanSpec] = None
    output_path: Optional[str] = None
    oracle: OracleSpec = OracleSpec()
    tolerances: TolSpec = TolSpec()

    @field_validator("n")
    @classmethod
    def _unit_n(cls, v):
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"direction n must be a unit vector (|n| = 1), got |n| = {norm:.12g}")
        return v

    # -- derived objects -------------------------------------------------

    @property
    def tol(self) -> Tolerances:
        return Tolerances(**self.tolerances.model_dump())

    @property
    def d_a(self) -> TransitionDipole:
        return TransitionDipole([to_complex(c) for c in self.dipole_a])

    @property
    def d_b(self) -> TransitionDipole:
        return self.d_a if self.dipole_b is None else TransitionDipole([to_complex(c) for c in self.dipole_b])

    @property
    def identical_dipoles(self) -> bool:
        return np.array_equal(self.d_a.d, self.d_b.d)

    def geometry(self, r: float | None = None) -> Geometry:
        n = np.asarray(self.n, dtype=float)
        return Geometry(self.r if r is None else r, n / np.linalg.norm(n), self.omega0)

    def rho(self) -> TwoAtomState:
        return self.state.build()

    def radii(self) -> np.ndarray:
        if self.r_range is not None:
            return self.r_range.values(self.omega0)
        return np.array([self.r])


# which separation key each mode needs
_NEEDS_RANGE = {"sweep", "slope-fit"}
_NEEDS_R = {"energy", "tensor", "scan"}
_NEEDS_STATE = {"energy", "coherence", "sweep", "oracle-check", "slope-fit"}


def check_mode(cfg: RunConfig, mode: str) -> RunConfig:
    """Enforce the per-mode requirements and validate the state."""
    if cfg.mode is not None and cfg.mode != mode:
        raise ConfigError(f"mode: document declares {cfg.mode!r} but subcommand is {mode!r}")
    if mode in _NEEDS_RANGE and (cfg.r_range is None or cfg.r is not None):
        raise ConfigError(f"r_range: mode {mode!r} needs r_range and no r")
    if mode in _NEEDS_R and (cfg.r is None or cfg.r_range is not None):
        raise ConfigError(f"r: mode {mode!r} needs r and no r_range")
    if mode == "oracle-check" and (cfg.r is None) == (cfg.r_range is None):
        raise ConfigError("r / r_range: mode 'oracle-check' needs exactly one of r or r_range")
    if mode == "scan" and cfg.scan is None:
        raise ConfigError("scan: mode 'scan' needs a scan block")
    if mode in _NEEDS_STATE:
        if cfg.state is None:
            raise ConfigError(f"state: mode {mode!r} needs a state")
        try:
            rho = cfg.rho()
        except ValueError as exc:
            raise ConfigError(f"state: {exc}") from exc
        problems = validate_state(rho, cfg.tol)
        if problems:
            raise ConfigError("state: invalid density matrix: " + "; ".join(problems))
    try:
        cfg.tol
        cfg.d_a, cfg.d_b
        cfg.oracle.build()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "; ".join(lines)


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Parse and validate a YAML/JSON configuration document.

    Raises :class:`ConfigError` naming the offending key path.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed document: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("<root>: configuration must be a mapping")
    try:
        cfg = RunConfig.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None
    mode = mode or cfg.mode
    if mode is None:
        raise ConfigError("mode: no mode given (use a subcommand or the 'mode' key)")
    return check_mode(cfg, mode)
