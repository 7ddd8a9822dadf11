"""Command-line front end.

    qcres <mode> --config run.yaml [--out rows.csv] [--workers N] [--dimensionless] [--coherence-columns]

Exit status: 0 success, 2 invalid configuration, 3 oracle did not converge,
4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .coherence import coherence_report, concurrence, l1_coherence, quantum_classicality
from .config import MODES, ConfigError, RunConfig, parse_config
from .core import pure_state, werner_state
from .energy import ConsistencyError, dimensionless, interaction_energy, steady_energy, time_averaged_energy
from .oracle import OracleNonConvergence, oracle_steady_energy
from .tensor import dipole_tensor, far_zone_tensor, near_zone_tensor

EXIT_OK, EXIT_CONFIG, EXIT_ORACLE, EXIT_CONSISTENCY = 0, 2, 3, 4

SWEEP_COLUMNS = ["r", "omega0_r", "steady_energy", "dimensionless_energy", "Q"]
COHERENCE_COLUMNS = ["l1", "concurrence"]

log = logging.getLogger("qcresonance")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: str | None, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _map(fn, items, workers: int):
    """Ordered map; rows come back in input order regardless of completion."""
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


# -- modes -------------------------------------------------------------------


def run_energy(cfg: RunConfig, args) -> int:
    rho, geom = cfg.rho(), cfg.geometry()
    res = interaction_energy(rho, cfg.d_a, cfg.d_b, geom, cfg.tol)
    q = quantum_classicality(rho)
    dimless = dimensionless(res.steady, cfg.d_a, cfg.d_b, geom)
    header = ["r", "omega0_r", "steady_energy", "dimensionless_energy", "Q",
              "oscillating_amplitude_re", "oscillating_amplitude_im"]
    row = [geom.r, geom.x, res.steady, dimless, q, res.oscillating_amplitude.real, res.oscillating_amplitude.imag]
    if cfg.T is not None:
        header.append("time_averaged_energy")
        row.append(time_averaged_energy(rho, cfg.d_a, cfg.d_b, geom, cfg.T, cfg.tol))
    write_csv(args.out, header, [row])
    print(f"omega0*r              = {fmt(geom.x)}")
    print(f"steady energy         = {fmt(res.steady)}")
    if args.dimensionless:
        print(f"dimensionless energy  = {fmt(dimless)}")
    print(f"quantum classicality  = {fmt(q)}")
    print(f"oscillating amplitude = {fmt(res.oscillating_amplitude.real)} {fmt(res.oscillating_amplitude.imag)}j")
    if cfg.T is not None:
        print(f"time average (T={fmt(cfg.T)}) = {fmt(row[-1])}")
    return EXIT_OK


def run_tensor(cfg: RunConfig, args) -> int:
    geom = cfg.geometry()
    scale = 4 * np.pi * geom.r**3 if args.dimensionless else 1.0
    full, near, far = (t(geom).v * scale for t in (dipole_tensor, near_zone_tensor, far_zone_tensor))
    rows = [[i, j, full[i, j], near[i, j], far[i, j]] for i in range(3) for j in range(3)]
    write_csv(args.out, ["i", "j", "V", "V_near", "V_far"], rows)
    label = "4 pi r^3 V_ij" if args.dimensionless else "V_ij"
    print(f"{label} at omega0*r = {fmt(geom.x)}:")
    for i in range(3):
        print("  " + "  ".join(f"{full[i, j]: .17g}" for j in range(3)))
    return EXIT_OK


def run_coherence(cfg: RunConfig, args) -> int:
    rep = coherence_report(cfg.rho(), cfg.d_a, cfg.d_b, cfg.tol)
    header = ["Q", "l1", "concurrence", "nonpolar_a", "nonpolar_b"]
    row = [rep.q, rep.l1, rep.concurrence, rep.nonpolar_a, rep.nonpolar_b]
    write_csv(args.out, header, [row])
    for k, v in zip(header, row):
        print(f"{k:12s} = {fmt(v)}")
    return EXIT_OK


def _sweep_rows(cfg: RunConfig, args, rho, radii):
    extra = args.coherence_columns
    l1 = l1_coherence(rho) if extra else None
    conc = concurrence(rho) if extra else None
    q = quantum_classicality(rho)

    def point(r):
        geom = cfg.geometry(r)
        e = steady_energy(rho, cfg.d_a, cfg.d_b, geom, cfg.tol)
        row = [r, geom.x, e, dimensionless(e, cfg.d_a, cfg.d_b, geom), q]
        return row + [l1, conc] if extra else row

    header = SWEEP_COLUMNS + (COHERENCE_COLUMNS if extra else [])
    return header, _map(point, list(radii), args.workers)


def run_sweep(cfg: RunConfig, args) -> int:
    header, rows = _sweep_rows(cfg, args, cfg.rho(), cfg.radii())
    write_csv(args.out, header, rows)
    print(f"sweep: {len(rows)} points, r in [{fmt(rows[0][0])}, {fmt(rows[-1][0])}]")
    return EXIT_OK


def fit_loglog_slope(r, e) -> float:
    """Least-squares slope of log|e| against log r."""
    slope, _ = np.polyfit(np.log(np.asarray(r, dtype=float)), np.log(np.abs(np.asarray(e, dtype=float))), 1)
    return float(slope)


def run_slope_fit(cfg: RunConfig, args) -> int:
    header, rows = _sweep_rows(cfg, args, cfg.rho(), cfg.radii())
    write_csv(args.out, header, rows)
    r = [row[0] for row in rows]
    e = [row[2] for row in rows]
    if any(v == 0 for v in e):
        print("slope-fit: energy vanishes at some sample points; slope undefined", file=sys.stderr)
        return EXIT_CONFIG
    slope = fit_loglog_slope(r, e)
    print(f"log-log slope of |steady energy| vs r over {len(r)} points: {fmt(slope)}")
    return EXIT_OK


def run_scan(cfg: RunConfig, args) -> int:
    geom = cfg.geometry()
    family = cfg.scan.family
    extra = args.coherence_columns

    def point(params):
        rho = werner_state(*params) if family == "werner" else pure_state(*params)
        e = steady_energy(rho, cfg.d_a, cfg.d_b, geom, cfg.tol)
        row = list(params) + [e, dimensionless(e, cfg.d_a, cfg.d_b, geom), quantum_classicality(rho)]
        return row + [l1_coherence(rho), concurrence(rho)] if extra else row

    keys = ["p"] if family == "werner" else ["theta", "phi"]
    header = keys + ["steady_energy", "dimensionless_energy", "Q"] + (COHERENCE_COLUMNS if extra else [])
    rows = _map(point, cfg.scan.points(), args.workers)
    write_csv(args.out, header, rows)
    print(f"scan ({family} family): {len(rows)} points at omega0*r = {fmt(geom.x)}")
    return EXIT_OK


def run_oracle_check(cfg: RunConfig, args) -> int:
    rho = cfg.rho()
    ocfg = cfg.oracle.build()
    failed = []

    def point(r):
        geom = cfg.geometry(r)
        ref = steady_energy(rho, cfg.d_a, cfg.d_b, geom, cfg.tol)
        try:
            res = oracle_steady_energy(rho, cfg.d_a, cfg.d_b, geom, ocfg, cfg.tol)
        except OracleNonConvergence as exc:
            failed.append((r, str(exc)))
            res = exc.partial
        rel = abs(res.value - ref) / abs(ref) if ref != 0 else abs(res.value - ref)
        return [r, geom.x, ref, res.value, rel, res.estimated_error]

    rows = _map(point, list(cfg.radii()), args.workers)
    write_csv(args.out, ["r", "omega0_r", "closed_form", "oracle", "relative_difference", "estimated_error"], rows)
    for row in rows:
        print(f"omega0*r={fmt(row[1])}: closed={fmt(row[2])} oracle={fmt(row[3])} "
              f"rel.diff={row[4]:.3e} est.err={row[5]:.3e}")
    if failed:
        for r, msg in failed:
            print(f"oracle did not converge at r={fmt(r)}: {msg}", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK


RUNNERS = {
    "energy": run_energy,
    "tensor": run_tensor,
    "coherence": run_coherence,
    "sweep": run_sweep,
    "scan": run_scan,
    "oracle-check": run_oracle_check,
    "slope-fit": run_slope_fit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcres",
        description="Resonance interaction energy of two identical two-level atoms.",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="YAML/JSON run configuration")
    parser.add_argument("--out", default=None, help="CSV output path (overrides output_path)")
    parser.add_argument("--workers", type=int, default=1, help="concurrent evaluations for sweeps/scans")
    parser.add_argument("--dimensionless", action="store_true",
                        help="also report energies in units of |d_A||d_B|/(4 pi r^3)")
    parser.add_argument("--coherence-columns", action="store_true",
                        help="append l1 and concurrence columns to sweep/scan CSV")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text, args.mode)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is None:
        args.out = cfg.output_path
    try:
        return RUNNERS[args.mode](cfg, args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY


if __name__ == "__main__":
    sys.exit(main())
