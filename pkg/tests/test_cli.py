import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from phonon_dephasing.cli import main
from phonon_dephasing.compare import CompareReport
from phonon_dephasing.output import read_csv


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_material_commands(capsys):
    code, out, _ = run(["material", "list"], capsys)
    assert code == 0 and "Si" in out.split()
    code, out, _ = run(["material", "show", "si"], capsys)
    assert code == 0 and "material.rho_m=2330.0" in out and "material.D_eV=8.6" in out
    assert run(["material", "show", "GaAs"], capsys)[0] == 1
    assert run(["material", "show"], capsys)[0] == 1


@pytest.mark.parametrize(
    "argv",
    [["figure", "fig9"], ["figure", "fig1", "--temperature.K=4"], ["rate", "--bogus"], ["rate", "stray"], []],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and "error" in err


def test_invalid_parameter_is_usage_error(capsys):
    code, _, err = run(["rate", "--geometry.R_plus_nm=12"], capsys)
    assert code == 1 and "geometry.R_plus_nm" in err


def test_figure_csv_schema_and_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert run(["figure", "fig2", "--out", str(path)], capsys)[0] == 0
    raw = paths[0].read_bytes()
    assert raw == paths[1].read_bytes()
    assert b"\r" not in raw
    header, labels, table = read_csv(raw.decode())
    assert header["figure"] == "fig2"
    assert labels[0] == "t_over_tau_d" and len(labels) == 4
    assert table.shape == (600, 4)
    assert table[0, 0] == 0 and table[-1, 0] == 3.0


def test_csv_values_round_trip(tmp_path, capsys):
    from phonon_dephasing.figures import figure_curves

    path = tmp_path / "f.csv"
    main(["figure", "fig1", "--samples", "40", "--out", str(path)])
    _, _, table = read_csv(path.read_text())
    curves, _ = figure_curves("fig1", 40)
    for i, c in enumerate(curves, start=1):
        assert np.array_equal(table[:, i], c.values)


def test_figure_svg(tmp_path, capsys):
    path = tmp_path / "fig3.svg"
    assert run(["figure", "fig3", "--format", "svg", "--samples", "50", "--out", str(path)], capsys)[0] == 0
    root = ET.parse(path).getroot()
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 4
    assert len(lines[0].get("points").split()) == 50


def test_rate_provenance(capsys):
    code, out, _ = run(["rate", "--samples", "5", "--temperature.K=4"], capsys)
    assert code == 0
    header, labels, table = read_csv(out)
    assert header["temperature.K"] == "4.0 (flag)"
    assert header["material.rho_m"] == "2330.0 (preset:Si)"
    assert labels == ["t_over_tau_d", "gamma_per_s"]
    assert table[0, 1] == 0


def test_decay_from_config_file(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("temperature.K = 256.05723117\n")
    monkeypatch.setenv("PHONON_DEPHASING_CONFIG", str(cfg))
    code, out, _ = run(["decay", "--samples", "31"], capsys)
    assert code == 0
    header, _, table = read_csv(out)
    assert header["temperature.K"].endswith(f"(file:{cfg})")
    g = table[:, 1]
    assert g[0] == 1 and 0.5 < table[np.argmin(g), 0] < 1.5


def test_shift_command(capsys):
    code, out, _ = run(["shift", "--geometry.R_plus_nm=1.5"], capsys)
    assert code == 0
    fields = dict(line.split("=", 1) for line in out.splitlines() if not line.startswith("#"))
    assert float(fields["shift_rad_per_s"]) == pytest.approx(1335428284585.617, rel=1e-8)


def test_compare_pass_and_fail(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    argv = ["compare", "--eta", "0.1", "--sigma", "0.5", "--points", "12", "--out", str(out)]
    assert run(argv, capsys)[0] == 0
    header, labels, table = read_csv(out.read_text().replace(",ok", ",1"))
    assert header["result"] == "pass" and table.shape == (12, 8)
    code, _, err = run(argv + ["--tolerance", "1e-18"], capsys)
    assert code == 2 and "fail" in err


def test_compare_empty_grid(capsys):
    assert run(["compare", "--eta", "--points", "3"], capsys)[0] == 1
    assert run(["compare", "--points", "0"], capsys)[0] == 1


def test_compare_flags_nonconverged_rows(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    argv = ["compare", "--eta", "0.1", "--sigma", "0", "--points", "4", "--out", str(out),
            "--quadrature.max_subdivisions=40"]
    assert run(argv, capsys)[0] == 3
    rows = [line for line in out.read_text().splitlines() if not line.startswith(("#", "eta"))]
    assert len(rows) == 4
    assert rows[0].endswith(",ok") and any(r.endswith(",nonconverged") for r in rows)


def test_default_grid_tolerance_floor(default_compare):
    report, _ = default_compare
    assert report.passed
    strict = CompareReport(report.grid, 1e-15, report.rows)
    assert not strict.passed


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "phonon_dephasing.cli", "material", "list"], capture_output=True, text=True
    )
    assert res.returncode == 0 and res.stdout.strip() == "Si"
