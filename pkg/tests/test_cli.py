import csv
import textwrap

import numpy as np
import pytest
import yaml

from qcresonance import Geometry, dipole_tensor
from qcresonance.cli import EXIT_CONFIG, EXIT_OK, EXIT_ORACLE, SWEEP_COLUMNS, fit_loglog_slope, main
from qcresonance.config import ConfigError, parse_config

MINIMAL = textwrap.dedent(
    """
    state: {pure: {theta: 0.785398, phi: 0}}
    dipole_a: [1, 0, 0]
    omega0: 1
    r: 1
    n: [0, 0, 1]
    """
)


def write_config(tmp_path, doc, name="run.yaml"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else yaml.safe_dump(doc))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


# -- parsing ---------------------------------------------------------------------


def test_minimal_document_parses():
    cfg = parse_config(MINIMAL, "energy")
    assert cfg.r == 1 and cfg.omega0 == 1
    assert cfg.rho().rho23.real == pytest.approx(0.5, abs=1e-6)
    np.testing.assert_array_equal(cfg.d_b.d, [1, 0, 0])
    # defaults applied
    assert cfg.tol.tol_psd == 1e-10
    assert cfg.oracle.rel_tol == 1e-3


def test_non_unit_direction_rejected():
    with pytest.raises(ConfigError, match=r"^n: .*unit"):
        parse_config(MINIMAL.replace("n: [0, 0, 1]", "n: [0, 0, 0.9]"), "energy")


def test_raw_state_with_bad_trace_rejected():
    diag = [0.49, 0.49, 0, 0]
    raw = [[d if i == j else 0 for j in range(4)] for i, d in enumerate(diag)]
    doc = {"state": {"raw": [x for row in raw for x in row]}, "r": 1}
    with pytest.raises(ConfigError, match="trace"):
        parse_config(yaml.safe_dump(doc), "energy")


def test_raw_state_with_complex_entries():
    psi = np.array([0, 1, 1j, 0]) / np.sqrt(2)
    m = np.outer(psi, psi.conj())
    doc = {"state": {"raw": [[float(z.real), float(z.imag)] for z in m.ravel()]}, "r": 1}
    cfg = parse_config(yaml.safe_dump(doc), "energy")
    np.testing.assert_allclose(cfg.rho().elements, m, atol=1e-16)


def test_unknown_key_named():
    with pytest.raises(ConfigError, match="foo"):
        parse_config(MINIMAL + "foo: 1\n", "energy")
    with pytest.raises(ConfigError, match=r"oracle\.bogus"):
        parse_config(MINIMAL + "oracle: {bogus: 2}\n", "energy")


def test_type_mismatch_reports_path():
    with pytest.raises(ConfigError, match=r"state\.werner\.p"):
        parse_config(MINIMAL.replace("{pure: {theta: 0.785398, phi: 0}}", "{werner: {p: abc}}"), "energy")
    with pytest.raises(ConfigError, match=r"^r: "):
        parse_config(MINIMAL.replace("r: 1", "r: -1"), "energy")


@pytest.mark.parametrize("doc,mode,key", [
    (MINIMAL, "sweep", "r_range"),
    (MINIMAL.replace("r: 1", "r_range: {min: 1, max: 2, count: 3}"), "energy", "r"),
    (MINIMAL, "scan", "scan"),
    ("r: 1\n", "energy", "state"),
    (MINIMAL + "mode: tensor\n", "energy", "mode"),
    ("state: {pure: {theta: 1}, werner: {p: 0.5}}\nr: 1\n", "energy", "state"),
])
def test_mode_requirements(doc, mode, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(doc, mode)


def test_extrema_spacing_lands_on_cos_extrema():
    cfg = parse_config(
        "state: {pure: {theta: 0.785398}}\nomega0: 2\nr_range: {min: 50, max: 500, count: 10, spacing: extrema}\n",
        "sweep",
    )
    k = cfg.radii() * cfg.omega0 / np.pi
    np.testing.assert_allclose(k, np.round(k), atol=1e-9)
    assert np.all(np.diff(k) > 0)


# -- running ---------------------------------------------------------------------


SWEEP_DOC = {
    "state": {"pure": {"theta": 0.6, "phi": 0.4}},
    "dipole_a": [[1, 0.5], 0, [0.3, -0.2]],
    "omega0": 1.3,
    "n": [0.6, 0, 0.8],
    "r_range": {"min": 0.05, "max": 40, "count": 57, "spacing": "log"},
}


def test_sweep_csv_columns_and_format(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["sweep", "--config", write_config(tmp_path, SWEEP_DOC), "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert rows[0] == SWEEP_COLUMNS
    assert len(rows) == 58
    for row in rows[1:]:
        for cell in row:
            assert float(cell) == float(format(float(cell), ".17g"))
            # round trip is exact with 17 significant digits
            assert cell == format(float(cell), ".17g")
    assert "\r" not in out.read_text()


def test_sweep_coherence_columns(tmp_path):
    out = tmp_path / "a.csv"
    main(["sweep", "--config", write_config(tmp_path, SWEEP_DOC), "--out", str(out), "--coherence-columns"])
    rows = read_csv(out)
    assert rows[0] == SWEEP_COLUMNS + ["l1", "concurrence"]
    assert float(rows[1][5]) == pytest.approx(abs(np.sin(1.2)), abs=1e-15)


def test_csv_deterministic_across_runs_and_workers(tmp_path):
    cfg = write_config(tmp_path, SWEEP_DOC)
    outs = []
    for i, workers in enumerate([1, 1, 4, 8]):
        out = tmp_path / f"run{i}.csv"
        assert main(["sweep", "--config", cfg, "--out", str(out), "--workers", str(workers)]) == EXIT_OK
        outs.append(out.read_bytes())
    assert all(o == outs[0] for o in outs)


def test_sweep_rows_satisfy_classicality_identity(tmp_path):
    out = tmp_path / "a.csv"
    main(["sweep", "--config", write_config(tmp_path, SWEEP_DOC), "--out", str(out)])
    d = np.array([1 + 0.5j, 0, 0.3 - 0.2j])
    n = np.array([0.6, 0, 0.8])
    for row in read_csv(out)[1:]:
        r, x, e, _, q = map(float, row)
        v = dipole_tensor(Geometry(r, n, 1.3)).v
        expected = 2 * q * np.sum(np.real(np.outer(d, d.conj())) * v)
        assert e == pytest.approx(expected, rel=1e-12)


def test_output_path_from_config(tmp_path):
    out = tmp_path / "from_cfg.csv"
    main(["energy", "--config", write_config(tmp_path, MINIMAL + f"output_path: {out}\n")])
    rows = read_csv(out)
    assert rows[0][:5] == SWEEP_COLUMNS


def test_energy_mode_summary(tmp_path, capsys):
    doc = MINIMAL.replace("{pure: {theta: 0.785398, phi: 0}}", "{raw: [0.5,0,0,0.5, 0,0,0,0, 0,0,0,0, 0.5,0,0,0.5]}")
    out = tmp_path / "e.csv"
    assert main(["energy", "--config", write_config(tmp_path, doc + "T: 3.14159\n"), "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "steady energy" in text and "oscillating amplitude" in text
    row = dict(zip(*read_csv(out)))
    assert float(row["steady_energy"]) == 0.0
    assert float(row["oscillating_amplitude_re"]) != 0.0


def test_scan_linear_in_p(tmp_path):
    doc = {"r": 0.8, "scan": {"p": [0, 0.25, 0.5, 0.75, 1]}}
    out = tmp_path / "s.csv"
    assert main(["scan", "--config", write_config(tmp_path, doc), "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert rows[0] == ["p", "steady_energy", "dimensionless_energy", "Q"]
    p = np.array([float(r[0]) for r in rows[1:]])
    e = np.array([float(r[1]) for r in rows[1:]])
    assert e[0] == 0.0
    np.testing.assert_allclose(e, p * e[-1], rtol=1e-14, atol=0)


def test_scan_pure_grid(tmp_path):
    doc = {"r": 1.0, "scan": {"theta": {"min": 0, "max": 1.5, "count": 4}, "phi": [0, 1.0]}}
    out = tmp_path / "s.csv"
    main(["scan", "--config", write_config(tmp_path, doc), "--out", str(out)])
    rows = read_csv(out)
    assert rows[0][:2] == ["theta", "phi"] and len(rows) == 9


def test_tensor_mode(tmp_path):
    out = tmp_path / "t.csv"
    main(["tensor", "--config", write_config(tmp_path, MINIMAL), "--out", str(out), "--dimensionless"])
    rows = read_csv(out)
    assert rows[0] == ["i", "j", "V", "V_near", "V_far"]
    assert len(rows) == 10


def test_coherence_mode(tmp_path, capsys):
    doc = MINIMAL.replace("{pure: {theta: 0.785398, phi: 0}}", "{werner: {p: 0.5}}")
    assert main(["coherence", "--config", write_config(tmp_path, doc)]) == EXIT_OK
    assert "concurrence  = 0.25" in capsys.readouterr().out


def slope_doc(r_range, d, n=(0, 0, 1)):
    return {"state": {"pure": {"theta": float(np.pi / 4), "phi": 0}}, "dipole_a": list(d),
            "omega0": 1, "n": list(n), "r_range": r_range}


def _slope_from_stdout(text):
    return float(text.strip().rsplit(":", 1)[1])


def test_slope_fit_near_zone(tmp_path, capsys):
    doc = slope_doc({"min": 1e-3, "max": 1e-2, "count": 20, "spacing": "log"}, (1, 0, 0))
    assert main(["slope-fit", "--config", write_config(tmp_path, doc)]) == EXIT_OK
    assert _slope_from_stdout(capsys.readouterr().out) == pytest.approx(-3, abs=0.01)


def test_slope_fit_far_zone_on_extrema(tmp_path, capsys):
    doc = slope_doc({"min": 100 * np.pi, "max": 1000 * np.pi, "count": 25, "spacing": "extrema"}, (1, 0, 0))
    assert main(["slope-fit", "--config", write_config(tmp_path, doc)]) == EXIT_OK
    assert _slope_from_stdout(capsys.readouterr().out) == pytest.approx(-1, abs=0.05)


def test_fit_loglog_slope_exact_power():
    r = np.geomspace(1, 10, 7)
    assert fit_loglog_slope(r, -2 * r**-2.5) == pytest.approx(-2.5, abs=1e-12)


def test_oracle_check_ok_and_nonconvergence(tmp_path, capsys):
    base = {"state": {"pure": {"theta": float(np.pi / 4), "phi": 0}}, "r": 1.0}
    out = tmp_path / "o.csv"
    assert main(["oracle-check", "--config", write_config(tmp_path, base), "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert rows[0] == ["r", "omega0_r", "closed_form", "oracle", "relative_difference", "estimated_error"]
    assert float(rows[1][4]) <= 1e-3

    strict = dict(base, oracle={"rel_tol": 1e-30})
    assert main(["oracle-check", "--config", write_config(tmp_path, strict, "s.yaml")]) == EXIT_ORACLE
    assert "did not converge" in capsys.readouterr().err


def test_invalid_config_exit_code(tmp_path, capsys):
    bad = MINIMAL.replace("n: [0, 0, 1]", "n: [0, 0, 0.9]") + "foo: 1\n"
    assert main(["energy", "--config", write_config(tmp_path, bad)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "n:" in err and "foo" in err
    assert main(["energy", "--config", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG
    assert main(["sweep", "--config", write_config(tmp_path, SWEEP_DOC), "--workers", "0"]) == EXIT_CONFIG


def test_unknown_mode_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["bogus", "--config", write_config(tmp_path, MINIMAL)])
    assert info.value.code != 0


def test_console_script_entry(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "qcresonance.cli", "energy", "--config", write_config(tmp_path, MINIMAL)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "steady energy" in proc.stdout
