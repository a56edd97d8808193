import json
import math
import subprocess
import sys

import pytest

from lagmart.blocks import build_diverging_blocks
from lagmart.cli import main


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "lagmart.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc.returncode, proc.stdout, proc.stderr


class TestBlocksCommand:
    def test_diverging_rows_match_builder(self):
        code, out, _ = run_cli(
            "blocks", "--diverging", "--A", "1", "--B", "1",
            "--alpha", "1", "--beta", "2", "--s", "1", "--kmax", "100",
        )
        assert code == 0
        lines = [l for l in out.splitlines() if l and not l.startswith("#")]
        assert lines[0] == "j,b_j,a_j,c_j,d_j"
        scheme = build_diverging_blocks(A=1, B=1, alpha=1, beta=2, s=1, k_max=100)
        want = scheme.rows()
        got = [tuple(int(v) for v in l.split(",")) for l in lines[1:]]
        assert got == want

    def test_invalid_exponents_exit_2(self):
        code, _, err = run_cli("blocks", "--diverging", "--alpha", "3", "--beta", "2")
        assert code == 2
        assert "alpha < beta" in err

    def test_fixed_minor_length(self):
        code, out, _ = run_cli("blocks", "--fixed", "--p", "1", "--kmax", "50")
        assert code == 0
        rows = [l.split(",") for l in out.splitlines() if l and not l.startswith("#")][1:]
        assert all(int(r[3]) == 1 for r in rows)

    def test_diagnostic_comments_present(self):
        code, out, _ = run_cli("blocks", "--fixed", "--p", "2", "--kmax", "200")
        assert code == 0
        assert "# CN minor fraction" in out
        assert "# structural lag condition holds from block: 1" in out


class TestStudyCommands:
    def test_reproduce_small_skips_checks(self, tmp_path):
        out_dir = tmp_path / "run"
        code = main([
            "reproduce", "--reps", "10", "--T", "400", "--seed", "77",
            "--switch-count", "10", "--out", str(out_dir),
        ])
        assert code == 0
        assert (out_dir / "replications.csv").exists()
        assert (out_dir / "summary.json").exists()
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["ok"] is True
        assert all(c["status"] == "skipped" for c in manifest["checks"])
        assert "insufficient replicates" in manifest["checks"][0]["detail"]
        for key in ("replications_csv", "summary_json"):
            assert manifest["outputs"][key]

    def test_byte_identical_reruns(self, tmp_path):
        args = ["simulate", "--reps", "8", "--T", "300", "--seed", "123",
                "--switch-count", "10"]
        d1, d2 = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--out", str(d1)]) == 0
        assert main(args + ["--out", str(d2)]) == 0
        assert (d1 / "replications.csv").read_bytes() == (d2 / "replications.csv").read_bytes()
        assert (d1 / "summary.json").read_bytes() == (d2 / "summary.json").read_bytes()

    def test_analyze_round_trip_identity(self, tmp_path):
        out_dir = tmp_path / "run"
        assert main(["simulate", "--reps", "12", "--T", "300", "--seed", "5",
                     "--switch-count", "8", "--out", str(out_dir)]) == 0
        out_json = tmp_path / "summary2.json"
        assert main(["analyze", str(out_dir / "replications.csv"),
                     "--out", str(out_json)]) == 0
        assert out_json.read_bytes() == (out_dir / "summary.json").read_bytes()

    def test_analyze_empty_csv_exit_2(self, tmp_path):
        from lagmart.io import CSV_HEADER

        path = tmp_path / "empty.csv"
        path.write_text(CSV_HEADER + "\n")
        code, _, err = run_cli("analyze", str(path))
        assert code == 2
        assert "schema" in err.lower()

    def test_analyze_bad_row_names_line(self, tmp_path):
        from lagmart.io import CSV_HEADER

        path = tmp_path / "bad.csv"
        path.write_text(CSV_HEADER + "\n0,1,even,2,oops,1,1,1,1,1,1\n")
        code, _, err = run_cli("analyze", str(path))
        assert code == 2
        assert "line 2" in err

    def test_analyze_single_group_flags_other(self, tmp_path):
        out_dir = tmp_path / "run"
        assert main(["simulate", "--reps", "10", "--T", "300", "--seed", "7",
                     "--switch-count", "2", "--out", str(out_dir)]) == 0
        from lagmart.io import read_records, write_records

        records = read_records(out_dir / "replications.csv")
        groups = {r.parity_group for r in records}
        keep = sorted(groups)[0]
        only = [r for r in records if r.parity_group == keep]
        single = tmp_path / "single.csv"
        write_records(single, only)
        out_json = tmp_path / "s.json"
        assert main(["analyze", str(single), "--out", str(out_json)]) == 0
        summary = json.loads(out_json.read_text())
        other = "even" if keep == "odd" else "odd"
        assert summary["groups"][other]["count"] == 0
        assert any("absent" in w for w in summary["warnings"])

    def test_config_file_precedence(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"reps": 5, "T": 300, "seed": 9, "switch_count": 10}))
        out_dir = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--T", "350",
                     "--out", str(out_dir)]) == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["config"]["T"] == 350  # flag wins
        assert manifest["config"]["reps"] == 5  # file wins over default
        assert manifest["config"]["master_seed"] == 9

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        with pytest.raises(SystemExit):
            main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x")])


class TestVerifyCommand:
    def test_verify_passes(self):
        code, out, _ = run_cli("verify")
        assert code == 0
        for name in ("moment_oracle", "decomposition_identity", "ma_moments",
                     "kernel_reference"):
            assert f"suite {name}: PASS" in out


class TestPsiMatrices:
    def test_analyze_emits_matrix_csvs(self, tmp_path):
        out_dir = tmp_path / "run"
        assert main(["simulate", "--reps", "10", "--T", "300", "--seed", "3",
                     "--switch-count", "5", "--out", str(out_dir)]) == 0
        psi_dir = tmp_path / "psi"
        assert main(["analyze", str(out_dir / "replications.csv"),
                     "--out", str(tmp_path / "s.json"), "--psi-out", str(psi_dir)]) == 0
        from lagmart.io import read_records

        records = read_records(out_dir / "replications.csv")
        text = (psi_dir / "psi_all.csv").read_text()
        lines = text.strip().splitlines()
        assert lines[0] == "row,col,value"
        row, col, value = lines[1].split(",")
        assert (row, col) == ("0", "0")
        want = sum(r.psi_bar for r in records) / len(records)
        assert float(value) == pytest.approx(want, rel=1e-15)
        for name in ("even", "odd"):
            if any(r.parity_group == name for r in records):
                assert (psi_dir / f"psi_{name}.csv").exists()
