import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gamowjordan import DomainError
from gamowjordan.cli import EXIT_CONFIG, EXIT_OK, EXIT_TOLERANCE, EXIT_VALIDATION, main
from gamowjordan.config import ConfigError, ExperimentConfig, canonical_hash, load_config, parse_t_grid

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
REF = CONFIGS / "reference_r2.json"


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


class TestTGrid:
    def test_string(self):
        assert np.array_equal(parse_t_grid("0:1:3"), [0, 0.5, 1])

    def test_list_and_dict(self):
        assert len(parse_t_grid([0, 2, 5])) == 5
        assert len(parse_t_grid({"start": 0, "stop": 2, "count": 4})) == 4

    @pytest.mark.parametrize("bad", ["0:1", "a:b:c", "0:1:0", "0:1:2.5", "0:inf:3"])
    def test_malformed(self, bad):
        with pytest.raises(ConfigError):
            parse_t_grid(bad)

    def test_negative_time(self):
        with pytest.raises(DomainError):
            parse_t_grid("-1:1:3")


class TestConfig:
    def test_reference(self):
        cfg = load_config(REF)
        assert cfg.model.r == 2 and cfg.psi is not None and len(cfg.t_grid) == 101
        assert cfg.tol == 1e-8 and cfg.options["dyad_k"] == 1
        assert len(cfg.sha256) == 64

    def test_top_level_model_keys(self):
        cfg = ExperimentConfig.from_dict({"E_R": 1, "Gamma": 0.1, "r": 3})
        assert cfg.model.r == 3

    def test_hash_is_canonical(self):
        assert canonical_hash({"a": 1, "b": 2}) == canonical_hash({"b": 2, "a": 1})
        assert canonical_hash({"a": 1}) != canonical_hash({"a": 2})

    @pytest.mark.parametrize(
        "doc",
        [
            [],
            {"model": {"E_R": 1}},
            {"model": {"E_R": 1, "Gamma": 0.1, "width": 2}},
            {"model": {"E_R": 1, "Gamma": "x"}},
            {"model": {"E_R": 1, "Gamma": 0.1, "r": True}},
            {"models": []},
            {"psi": {"numer": [1]}},
            {"quadrature": {"scheme": "gauss"}},
            {"tol": -1},
            {"options": [1]},
        ],
    )
    def test_config_errors(self, doc):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(doc)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")


class TestSubcommands:
    @pytest.mark.parametrize("cmd", ["laurent", "pole-term", "contour-check", "expand"])
    def test_reports(self, cmd, tmp_path):
        assert main([cmd, "--config", str(REF), "--out", str(tmp_path)]) == EXIT_OK
        report = json.loads((tmp_path / f"{cmd}.json").read_text())
        assert report["passed"] and report["command"] == cmd
        assert report["config_sha256"] == load_config(REF).sha256
        assert "tol" in report["tolerances"]

    def test_contour_check_defect(self, tmp_path):
        main(["contour-check", "--config", str(REF), "--out", str(tmp_path)])
        res = json.loads((tmp_path / "contour-check.json").read_text())["results"]
        assert res["relative_defect"] < 1e-8
        for key in ("direct", "background", "pole_term"):
            assert set(res[key]) == {"re", "im"}

    def test_evolve_csv(self, tmp_path):
        assert main(["evolve", "--config", str(REF), "--out", str(tmp_path), "--t-grid", "0:5:11"]) == EXIT_OK
        header, data = read_csv(tmp_path / "evolve.csv")
        assert header[:3] == ["t", "U_0_0_re", "U_0_0_im"]
        assert "psi_1_im" in header
        assert data.shape == (11, len(header))
        # the strictly upper entry stays zero
        assert np.all(data[:, header.index("U_0_1_re")] == 0)

    def test_evolve_block_diagonal(self, tmp_path):
        assert main(["evolve", "--config", str(CONFIGS / "two_poles.json"), "--out", str(tmp_path)]) == EXIT_OK
        header, data = read_csv(tmp_path / "evolve.csv")
        assert "U_2_2_re" in header and "U_3_0_re" not in header
        assert np.all(data[:, header.index("U_2_0_re")] == 0)
        t = data[:, 0]
        expected = np.exp(-0.25 * t) * np.cos(3.0 * t)
        assert np.allclose(data[:, header.index("U_2_2_re")], expected, atol=1e-14)

    def test_decay_curve(self, tmp_path):
        assert main(["decay-curve", "--config", str(REF), "--out", str(tmp_path), "--gnuplot"]) == EXIT_OK
        header, data = read_csv(tmp_path / "decay-curve.csv")
        assert header == ["t", "P_dyad", "P_W_re", "P_W_im", "P_W_ratio", "exp_neg_gamma_t"]
        t = data[:, 0]
        assert np.allclose(data[:, 4], np.exp(-0.2 * t), atol=1e-10, rtol=0)
        # the single dyad first rises, the (t Gamma)^2 hump, then decays
        dyad = data[:, 1]
        peak = int(np.argmax(dyad))
        assert 0 < peak < len(t) - 1 and dyad[peak] > dyad[0]
        assert (tmp_path / "decay-curve.gp").exists()

    def test_identity_suite(self, tmp_path):
        assert main(["identity-suite", "--n-max", "12", "--out", str(tmp_path)]) == EXIT_OK
        report = json.loads((tmp_path / "identity-suite.json").read_text())
        assert report["passed"] and all(report["checks"].values())
        assert len(report["results"]["rows"]) == 13

    def test_identity_suite_bound(self, tmp_path):
        assert main(["identity-suite", "--n-max", "99", "--out", str(tmp_path)]) == EXIT_VALIDATION


class TestExitCodes:
    def test_bad_json(self, tmp_path):
        assert main(["laurent", "--config", str(write(tmp_path, "{oops")), "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_missing_model(self, tmp_path):
        assert main(["laurent", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_missing_wave_function(self, tmp_path):
        cfg = write(tmp_path, {"model": {"E_R": 1, "Gamma": 0.2}})
        assert main(["pole-term", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_invalid_width(self, tmp_path):
        cfg = write(tmp_path, {"model": {"E_R": 1, "Gamma": 0, "r": 2}})
        assert main(["laurent", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_VALIDATION

    def test_invalid_hardy(self, tmp_path, capsys):
        doc = json.loads(REF.read_text())
        doc["psi"]["poles"][0]["im"] = -2.0
        cfg = write(tmp_path, doc)
        assert main(["pole-term", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_VALIDATION
        assert "wrong half-plane" in capsys.readouterr().err

    def test_negative_grid(self, tmp_path):
        assert main(["evolve", "--config", str(REF), "--out", str(tmp_path), "--t-grid=-1:1:3"]) == EXIT_VALIDATION

    def test_linear_phase_contour_check(self, tmp_path):
        doc = json.loads(REF.read_text())
        doc["model"]["gamma"] = [0.0, 0.1]
        cfg = write(tmp_path, doc)
        assert main(["contour-check", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_VALIDATION

    def test_tolerance_failure(self, tmp_path, capsys):
        assert main(["laurent", "--config", str(REF), "--out", str(tmp_path), "--tol", "1e-30"]) == EXIT_TOLERANCE
        assert "cauchy_matches_closed_form" in capsys.readouterr().err
        assert not json.loads((tmp_path / "laurent.json").read_text())["passed"]

    def test_bad_dyad_index(self, tmp_path):
        doc = json.loads(REF.read_text())
        doc["options"]["dyad_k"] = 5
        cfg = write(tmp_path, doc)
        assert main(["decay-curve", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_VALIDATION


class TestDeterminism:
    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out, workers in ((a, "1"), (b, "2")):
            assert main(["decay-curve", "--config", str(REF), "--out", str(out), "--workers", workers]) == EXIT_OK
        for name in ("decay-curve.json", "decay-curve.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "gamowjordan", "identity-suite", "--n-max", "4", "--out", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "identity-suite.json").exists()
