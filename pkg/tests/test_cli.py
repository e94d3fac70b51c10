import csv
import json
import subprocess
import sys

import pytest

from elastocald.cli import main


def _run(tmp_path, *args):
    code = main([*args, "--out", str(tmp_path)])
    verb = args[0]
    record = json.loads((tmp_path / f"{verb}.json").read_text()) if code != 2 else None
    return code, record


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_constants(tmp_path):
    code, rec = _run(tmp_path, "constants")
    assert code == 0 and rec["passed"]
    rows = {round(float(r["mu_tilde"]), 6): r for r in _rows(tmp_path / "constants.csv")}
    assert float(rows[1.0]["c_tilde"]) == pytest.approx(0.125)
    assert float(rows[1.0]["cluster"]) == pytest.approx(-0.234375)
    assert rows[-1.0]["admissible"] == "0"
    assert abs(float(rows[0.6]["c_tilde"])) < 1e-15


def test_spectrum(tmp_path):
    code, rec = _run(tmp_path, "spectrum", "--n", "32", "--omega", "0.5", "--dump")
    assert code == 0 and rec["results"]["count"] == 64
    assert (tmp_path / "spectrum_matrix.bin").exists()
    assert _rows(tmp_path / "spectrum.csv")[0].keys() == {"re", "im", "dist_to_cluster"}
    code, rec = _run(tmp_path, "spectrum", "--n", "16", "--tol", "0.0", "--radius", "1e-9")
    assert code == 1 and not rec["passed"]


def test_arc_spectrum_static_straight_matches_reference(tmp_path):
    code, rec = _run(tmp_path, "arc-spectrum", "--geometry", "arc:straight", "--omega", "0",
                     "--n", "16")
    assert code == 0
    # only the truncated top mode differs from the exact basis composition
    moduli = sorted(rec["results"]["compact_part_moduli"], reverse=True)
    assert moduli[2] < 1e-8


def test_calderon_check(tmp_path):
    code, rec = _run(tmp_path, "calderon-check", "--n-list", "16,32")
    rows = rec["results"]["rows"]
    assert code == 0 and rows[1][1] < rows[0][1]


def test_diag_test(tmp_path):
    code, rec = _run(tmp_path, "diag-test", "--n", "16")
    assert code == 0
    assert rec["results"]["lam_S_11"] == pytest.approx(0.3125)
    assert rec["results"]["N0_e0"] == pytest.approx(-0.75)
    assert len(_rows(tmp_path / "diag-test.csv")) == 14


def test_solve_exact(tmp_path):
    code, rec = _run(tmp_path, "solve", "--n", "64", "--exact", "--check-tol", "1e-6")
    assert code == 0 and rec["results"]["field_error"] < 1e-6
    code, rec = _run(tmp_path, "solve", "--geometry", "arc:parabola", "--n", "32",
                     "--incident", "plane_s", "--eval-radius", "3")
    assert code == 0 and len(rec["results"]["endpoint_exponents"]) == 2


def test_iters(tmp_path):
    code, rec = _run(tmp_path, "iters", "--n", "32", "--problem", "neumann")
    assert code == 0
    plain, pre = rec["results"]["rows"]
    assert pre[2] < plain[2]


def test_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        out.mkdir()
        assert main(["spectrum", "--n", "16", "--seed", "3", "--out", str(out)]) == 0
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mu_tilde": 0.6, "sweep_count": 3}))
    code, rec = _run(tmp_path, "constants", "--config", str(cfg))
    assert rec["config"]["mu_tilde"] == 0.6 and len(_rows(tmp_path / "constants.csv")) == 3
    code, rec = _run(tmp_path, "constants", "--config", str(cfg), "--mu-tilde", "2")
    assert rec["config"]["mu_tilde"] == 2.0 and rec["config"]["sweep_count"] == 3


@pytest.mark.parametrize("args", [
    ["constants", "--mu", "-1"],
    ["spectrum", "--geometry", "hexagon"],
    ["spectrum", "--geometry", "arc:straight"],
    ["solve", "--direction", "1,2,3"],
])
def test_bad_input_exit_code(tmp_path, args):
    assert main(args + ["--out", str(tmp_path)]) == 2


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"no_such_key": 1}))
    assert main(["constants", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    cfg.write_text("[1, 2]")
    assert main(["constants", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_inadmissible_material_exit_code(tmp_path):
    assert main(["solve", "--mu-tilde", "-1", "--n", "16", "--out", str(tmp_path)]) == 1


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "elastocald", "constants", "--sweep-count", "2",
                          "--out", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0 and "c_tilde" in out.stdout
