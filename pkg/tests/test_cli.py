import json
import subprocess
import sys

import pytest

from ternok import cli, config, phasediag


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    config.validate_output(doc)
    return doc


# -- energy -----------------------------------------------------------------

def test_energy_uniform_centroid(capsys):
    doc = run_json(capsys, "energy", "--pattern", "ABC", "--uniform")
    assert doc["energy"]["total"] == 3.25
    assert doc["config"]["matrix"] == {"family": "ren", "gamma": 1.0}


def test_energy_bad_pattern(capsys):
    code, _, err = run(capsys, "energy", "--pattern", "ABB")
    assert code == 2 and "adjacent duplicate" in err


def test_energy_optimize_abac(capsys):
    doc = run_json(capsys, "--omega", "0.14", "0.43", "0.43", "energy", "--pattern", "ABAC", "--optimize")
    w = doc["widths"]
    assert doc["converged"] and abs(w[0] - w[2]) < 1e-5


def test_energy_given_widths_validated(capsys):
    code, _, err = run(capsys, "energy", "--pattern", "ABC", "--widths", "0.5", "0.5", "0")
    assert code == 2 and "volume fractions" in err


def test_energy_digits(capsys):
    doc = run_json(capsys, "--omega", "0.2", "0.5", "0.3", "energy", "--pattern", "ABAC", "--uniform")
    lr = doc["energy"]["long_range"]
    assert lr == float(f"{lr:.15g}")


# -- config -----------------------------------------------------------------

def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"tensions": {"c12": 0.5, "c13": 0.5, "c23": 0.5},
                               "matrix": {"gamma": 4.0}}))
    doc = run_json(capsys, "--config", str(cfg), "--gamma", "2.0", "energy", "--pattern", "ABC", "--uniform")
    assert doc["config"]["matrix"]["gamma"] == 2.0
    assert doc["config"]["tensions"]["c12"] == 0.5
    assert doc["energy"]["total"] == pytest.approx(1.5 + 0.5)


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"omgea": [0.3, 0.3, 0.4]}))
    code, _, err = run(capsys, "--config", str(cfg), "energy", "--pattern", "ABC")
    assert code == 2 and "omgea" in err


def test_config_bad_value(capsys):
    code, _, _ = run(capsys, "--gamma", "-1", "energy", "--pattern", "ABC")
    assert code == 2


def test_config_triangle_violation(capsys):
    code, _, err = run(capsys, "--tensions", "1", "1", "3", "energy", "--pattern", "ABC")
    assert code == 2 and "triangle" in err


def test_general_family(capsys):
    doc = run_json(capsys, "--family", "general", "--gamma-tilde", "1", "0", "0", "1",
                   "matrix", "--check")
    assert doc["check"]["admissible"]


def test_general_family_needs_matrix(capsys):
    code, _, _ = run(capsys, "--family", "general", "matrix", "--check")
    assert code == 2


# -- optimize ---------------------------------------------------------------

def test_optimize_repeats(capsys, tmp_path):
    out = tmp_path / "opt.json"
    code, _, _ = run(capsys, "--tensions", "0.6667", "0.6667", "0.6667", "optimize",
                     "--pattern", "ABC", "--n-max", "3", "--json", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    config.validate_output(doc)
    assert doc["repeats"]["n"] == 1 and not doc["repeats"]["at_boundary"]


def test_optimize_nonconvergence_exit_3(capsys):
    code, _, err = run(capsys, "--family", "ohta", "--omega", "0.2", "0.5", "0.3",
                       "--max-iters", "1", "optimize", "--pattern", "ABACBCACBC")
    assert code == 3 and "did not converge" in err


# -- search -----------------------------------------------------------------

def test_search_smoke(capsys, tmp_path):
    js, cs = tmp_path / "s.json", tmp_path / "s.csv"
    code, out, _ = run(capsys, "--omega", "0.14", "0.43", "0.43", "--gamma", "5.7", "--threads", "1",
                       "search", "--max-len", "8", "--json", str(js), "--csv", str(cs))
    assert code == 0 and "best: ABC" in out
    doc = json.loads(js.read_text())
    config.validate_output(doc)
    assert doc["report"]["best"]["pattern"] == "ABC"
    assert cs.read_text().startswith("pattern,length,energy,converged\n")


def test_search_cap(capsys, tmp_path):
    code, _, err = run(capsys, "search", "--max-len", "25", "--json", str(tmp_path / "x.json"))
    assert code == 2 and "max_len" in err


# -- phasediag --------------------------------------------------------------

def test_phasediag_default_paths(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    doc = run_json(capsys, "--threads", "1", "phasediag", "--section", "omega",
                   "--family", "ohta", "--resolution", "3")
    assert doc["counts"] == {"BABC": 9}
    assert (tmp_path / "phasediag_omega_ohta.csv").exists()
    assert (tmp_path / "phasediag_omega_ohta.svg").read_text().startswith("<?xml")


def test_phasediag_tension_centroid(capsys, tmp_path):
    csv_path = tmp_path / "t.csv"
    run_json(capsys, "phasediag", "--section", "tension", "--resolution", "4",
             "--csv", str(csv_path), "--svg", str(tmp_path / "t.svg"))
    rows = phasediag.parse_csv(csv_path.read_text())
    # with 4 subdivisions one upward cell is centred on the simplex centroid
    centre = [r for r in rows if abs(r["lambda1"] - 1 / 3) < 1e-9 and abs(r["lambda2"] - 1 / 3) < 1e-9]
    assert len(centre) == 1 and centre[0]["winner_pattern"] == "ABC"


# -- matrix -----------------------------------------------------------------

def test_matrix_reports(capsys):
    doc = run_json(capsys, "matrix", "--check", "--canonicalize", "--decompose")
    assert doc["check"]["admissible"] and doc["decompose"]["psd"]
    assert len(doc["canonical"]) == 3


def test_matrix_explicit_not_admissible(capsys):
    doc = run_json(capsys, "matrix", "--gamma-matrix", "[[1,0,0],[0,1,0],[0,0,1]]")
    assert doc["check"]["admissible"] is False


def test_matrix_bad_shape(capsys):
    code, _, _ = run(capsys, "matrix", "--gamma-matrix", "[[1,0],[0,1]]")
    assert code == 2


# -- balls ------------------------------------------------------------------

def test_balls_binary(capsys):
    doc = run_json(capsys, "balls", "--mode", "binary", "--n", "4")
    assert doc["minimizers"] == ["ABABABAB"]


def test_balls_ternary(capsys):
    doc = run_json(capsys, "balls", "--mode", "ternary", "--n", "2")
    assert doc["cyclic_is_minimizer"] and "ABCABC" in doc["minimizers"]


def test_balls_sweep(capsys):
    code, out, err = run(capsys, "--threads", "1", "balls", "--mode", "conjecture-sweep", "--n", "2")
    doc = json.loads(out)
    assert code == 0 and doc["cases"] == 300 and doc["counterexamples"] == []
    assert err.count("PASS") == 300


def test_balls_cap(capsys):
    code, _, _ = run(capsys, "balls", "--mode", "binary", "--n", "9")
    assert code == 2


# -- entry points -----------------------------------------------------------

def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ternok", "energy", "--pattern", "ABCABC", "--uniform"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["energy"]["total"] == 6.0625


def test_missing_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
