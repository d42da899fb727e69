import csv
import json

import numpy as np
import pytest

import oracles
from subdirac.cli import main
from subdirac.suites import SCHEMA_VERSION, SuiteConfig, config_from_dict, field_table, run_suite


def _run(tmp_path, *args):
    out = tmp_path / "report.json"
    try:
        code = main(["run", *args, "--out", str(out)])
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    return code, (json.loads(out.read_text(encoding="utf-8")) if out.exists() else None)


def test_algebra_suite_passes(tmp_path, capsys):
    code, rep = _run(tmp_path, "--suite", "algebra")
    assert code == 0 and rep["pass"]
    assert rep["schema_version"] == SCHEMA_VERSION
    names = [c["name"] for c in rep["checks"]]
    assert names == sorted(names)
    assert all(c["max_abs_residual"] <= 1e-12 for c in rep["checks"] if c["max_abs_residual"] is not None)
    assert "PASS" in capsys.readouterr().err


def test_report_records(tmp_path):
    _, rep = _run(tmp_path, "--suite", "weierstrass", "--grids", "16,32,64")
    keys = {"name", "ref", "max_abs_residual", "l2_residual", "convergence_order", "tolerance", "pass"}
    assert all(keys <= set(c) for c in rep["checks"])
    orders = [c["convergence_order"] for c in rep["checks"] if c["convergence_order"] is not None]
    assert orders and all(1.7 <= o <= 2.3 for o in orders)
    assert rep["environment"]["grid"] == [16, 32, 64]


def test_normalization_deviation_is_flagged(tmp_path):
    _, rep = _run(tmp_path, "--suite", "weierstrass")
    (rec,) = [c for c in rep["checks"] if c["name"].startswith("weierstrass.normalization")]
    assert rec["details"]["exponent"] == pytest.approx(1.0, abs=1e-8)
    assert rec["details"]["conventional_exponent"] == 0.5
    assert rec["details"]["deviates_from_conventional"] is True


@pytest.mark.parametrize("grids", ["4", "8,4", "16,x"])
def test_small_or_bad_grids_rejected(tmp_path, grids):
    code, _ = _run(tmp_path, "--suite", "geometry", "--grids", grids)
    assert code == 2


def test_strict_tolerance_makes_checks_fail(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suite": "dirac", "tolerances": {"order_min": 3.0}}), encoding="utf-8")
    code, rep = _run(tmp_path, "--config", str(cfg))
    assert code == 1 and rep["pass"] is False


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suite": "dirac", "grids": [16, 32, 64]}), encoding="utf-8")
    _, rep = _run(tmp_path, "--config", str(cfg), "--suite", "algebra")
    assert rep["suite"] == "algebra"


@pytest.mark.parametrize("doc", ['{"suite": "algebra",, }', '{"suite": "nope"}', '{"colour": 1}',
                                 '{"shapes": [{"name": "dodecahedron"}]}'])
def test_bad_config_exit_code(tmp_path, doc, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(doc, encoding="utf-8")
    assert main(["run", "--config", str(cfg)]) == 2
    assert "subdirac" in capsys.readouterr().err


def test_malformed_json_reports_location(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{\n  "suite": "algebra",\n  oops\n}', encoding="utf-8")
    main(["run", "--config", str(cfg)])
    assert "line 3" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 2


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_run_is_deterministic():
    cfg = SuiteConfig(suite="all")
    assert json.dumps(run_suite(cfg), sort_keys=True) == json.dumps(run_suite(cfg), sort_keys=True)


def test_config_defaults():
    cfg = config_from_dict({})
    assert cfg.suite == "all" and all(g >= 8 for g in cfg.grids)


def test_list_shapes(capsys):
    assert main(["list-shapes"]) == 0
    out = capsys.readouterr().out
    for name in ("sphere", "product_torus", "helix", "enneper"):
        assert name in out


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_dump_sphere_potential_profile(tmp_path):
    out = tmp_path / "sphere.csv"
    assert main(["dump", "--shape", "sphere", "--grid", "32", "--out", str(out)]) == 0
    header, data = _read_csv(out)
    col = {h: i for i, h in enumerate(header)}
    u, v = data[:, col["s1"]], data[:, col["s2"]]
    assert np.allclose(data[:, col["p_abs"]], oracles.sphere_potential_abs(u, v), atol=1e-12)
    assert b"\r\n" in out.read_bytes()


def test_dump_torus_spinor_modulus(tmp_path):
    out = tmp_path / "torus.csv"
    main(["dump", "--shape", "product_torus", "--grid", "16", "--out", str(out)])
    header, data = _read_csv(out)
    assert np.allclose(data[:, header.index("f_abs")], 1 / np.sqrt(2), atol=1e-12)


def test_dump_plane_has_zero_residual():
    header, rows = field_table("plane", 16)
    res = np.array(rows)[:, header.index("residual")]
    assert np.all(res == 0)


def test_dump_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["dump", "--shape", "enneper", "--grid", "16", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_dump_errors(tmp_path):
    assert main(["dump", "--shape", "cube", "--grid", "16", "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["dump", "--shape", "sphere", "--grid", "4", "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["dump", "--shape", "sphere", "--grid", "16", "--out", str(tmp_path / "no" / "x.csv")]) == 2
