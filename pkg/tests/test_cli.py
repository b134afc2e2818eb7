import json

import numpy as np
import pytest

from latdft.cli import main
from latdft.sysnf import ReductionCertificate


@pytest.fixture
def files(tmp_path):
    good = tmp_path / "good.txt"
    good.write_text("2 2\n5 1\n0 1\n")
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n4 1\n0 1\n")
    junk = tmp_path / "junk.txt"
    junk.write_text("not a matrix\n")
    reducible = tmp_path / "reducible.txt"
    reducible.write_text("2 2\n2 1\n0 1\n")
    return tmp_path


class TestValidate:
    def test_valid_exit_zero(self, files, capsys):
        assert main(["validate", "--input", str(files / "good.txt")]) == 0
        out = capsys.readouterr().out
        assert "N = 5" in out and "b = [1]" in out

    def test_invalid_exit_two_names_gcd(self, files, capsys):
        assert main(["validate", "--input", str(files / "bad.txt")]) == 2
        assert "2" in capsys.readouterr().out

    def test_malformed_exit_one(self, files):
        assert main(["validate", "--input", str(files / "junk.txt")]) == 1

    def test_missing_file_exit_one(self, files):
        assert main(["validate", "--input", str(files / "nope.txt")]) == 1


class TestReduce:
    def test_writes_verified_certificate(self, files, capsys):
        out_path = files / "cert.json"
        code = main([
            "reduce", "--input", str(files / "reducible.txt"),
            "--epsilon", "1/16", "--out", str(out_path),
        ])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "T = " in stdout and "delta = " in stdout
        cert = ReductionCertificate.from_json(out_path.read_text())
        assert cert.epsilon.numerator == 1 and cert.epsilon.denominator == 16

    def test_sysnf_input_reduces_fine(self, files):
        assert main([
            "reduce", "--input", str(files / "good.txt"),
            "--epsilon", "1/8", "--out", str(files / "c2.json"),
        ]) == 0

    def test_zero_epsilon_exit_one(self, files):
        assert main([
            "reduce", "--input", str(files / "reducible.txt"), "--epsilon", "0",
        ]) == 1


class TestDft:
    def test_outputs(self, files, capsys):
        outdir = files / "dftout"
        assert main(["dft", "--input", str(files / "good.txt"), "--out", str(outdir)]) == 0
        header = json.loads((outdir / "dft_header.json").read_text())
        assert header == {"N": 5, "n": 2, "b": [1], "order": 5}
        lines = (outdir / "dft_matrix.csv").read_text().splitlines()
        assert len(lines) == 5 and len(lines[0].split(",")) == 10

    def test_invalid_input_exit_two(self, files):
        assert main(["dft", "--input", str(files / "bad.txt")]) == 2

    def test_size_guard_exit_one(self, files):
        assert main([
            "dft", "--input", str(files / "good.txt"), "--size-guard", "2",
        ]) == 1


class TestQftSim:
    def test_agreement_report_and_snapshots(self, files):
        outdir = files / "sim"
        code = main([
            "qft-sim", "--input", str(files / "good.txt"),
            "--out", str(outdir), "--dump-state", "3,3",
        ])
        assert code == 0
        report = json.loads((outdir / "qft_sim_report.json").read_text())
        assert report["agrees"] and report["max_amplitude_deviation"] <= 1e-10
        for step in range(5):
            matches = list(outdir.glob(f"step{step}_*.bin"))
            assert matches, f"missing snapshot for step {step}"


class TestSample:
    def test_end_to_end_report(self, files):
        config = {
            "basis": str(files / "reducible.txt"),
            "spec": {"kind": "gaussian", "s": 16.0},
            "epsilon": "1/16",
            "shots": 200,
            "seed": 31,
        }
        cfg_path = files / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        outdir = files / "samp"
        assert main(["sample", "--config", str(cfg_path), "--out", str(outdir)]) == 0
        report = json.loads((outdir / "sample_report.json").read_text())
        assert report["sigma_inverse_applied"] is True
        assert report["tv_distance"] <= 0.05
        assert report["decode_mismatch_rate"] == 0.0
        assert report["seed"] == 31
        assert len(report["config_hash"]) == 16
        rows = (outdir / "samples.csv").read_text().splitlines()
        assert len(rows) == 200
        assert all(len(r.split(",")) == 2 for r in rows)

    def test_same_config_same_hash_and_samples(self, files):
        config = {
            "basis": str(files / "reducible.txt"),
            "spec": {"kind": "gaussian", "s": 16.0},
            "epsilon": "1/16",
            "shots": 50,
            "seed": 9,
        }
        cfg_path = files / "cfg2.json"
        cfg_path.write_text(json.dumps(config))
        out1, out2 = files / "s1", files / "s2"
        assert main(["sample", "--config", str(cfg_path), "--out", str(out1)]) == 0
        assert main(["sample", "--config", str(cfg_path), "--out", str(out2)]) == 0
        assert (out1 / "samples.csv").read_text() == (out2 / "samples.csv").read_text()
        r1 = json.loads((out1 / "sample_report.json").read_text())
        r2 = json.loads((out2 / "sample_report.json").read_text())
        assert r1 == r2

    def test_bad_config_exit_one(self, files):
        cfg = files / "bad_cfg.json"
        cfg.write_text("{}")
        assert main(["sample", "--config", str(cfg)]) == 1


def test_usage_error_exit_one():
    assert main(["no-such-command"]) == 1
