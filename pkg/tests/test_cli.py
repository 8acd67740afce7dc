"""End-to-end command line tests through main()."""
import json
import os

import pytest

from smyth.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCheck:
    def test_pass_exit_zero(self, capsys):
        code, out, _ = run(capsys, "check", "--q", "2", "--coeffs", "1;t;t+1")
        assert code == 0
        assert json.loads(out)["passes"] is True

    def test_fail_exit_one(self, capsys):
        code, out, _ = run(capsys, "check", "--q", "2", "--coeffs", "1;1;t")
        assert code == 1
        assert json.loads(out)["passes"] is False

    def test_parse_error_exit_two(self, capsys):
        code, _, err = run(capsys, "check", "--q", "2", "--coeffs", "1;;t")
        assert code == 2
        assert "coefficient 2" in err

    def test_int_ring(self, capsys):
        code, out, _ = run(capsys, "check", "--ring", "int", "--coeffs", "5;6;7")
        assert code == 0
        code, _, _ = run(capsys, "check", "--ring", "int", "--coeffs", "1;1;3")
        assert code == 1

    def test_text_format(self, capsys):
        code, out, _ = run(capsys, "check", "--q", "2", "--coeffs", "1;t;t+1",
                           "--format", "text")
        assert code == 0
        assert out.startswith("pass")


class TestEnumerate:
    def test_json_count(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--q", "2",
                           "--coeffs", "1;t;t+1", "--N", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["count"] == 8
        assert doc["count"] == doc["expected_count"]

    def test_csv_rows(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--q", "2",
                           "--coeffs", "1;t;t+1", "--N", "1", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "x1,x2,x3"
        assert len(out.strip().splitlines()) == 3

    def test_budget_exit_two(self, capsys):
        code, _, err = run(capsys, "enumerate", "--q", "5",
                           "--coeffs", "1;t;t+1;t+2", "--N", "3",
                           "--budget", "10")
        assert code == 2


class TestCertify:
    def test_certificate_emitted(self, capsys):
        code, out, _ = run(capsys, "certify", "--q", "2",
                           "--coeffs", "1;t;t+1", "--N", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "certificate"
        assert doc["permutations"][-1] == list(range(1, doc["m"] + 1))

    def test_non_smyth_exit_one(self, capsys):
        code, _, err = run(capsys, "certify", "--q", "2",
                           "--coeffs", "1;1;t", "--N", "1")
        assert code == 1
        assert "no balanced multiset exists" in err


class TestMinimal:
    def test_found(self, capsys):
        code, out, _ = run(capsys, "minimal", "--q", "2",
                           "--coeffs", "1;t^2;t^2+t+1", "--N", "2",
                           "--size-bound", "4")
        assert code == 0
        doc = json.loads(out)
        assert doc["search"]["minimal_size"] == 3

    def test_not_found_exit_one(self, capsys):
        code, out, _ = run(capsys, "minimal", "--q", "2",
                           "--coeffs", "1;t^2;t^2+t+1", "--N", "2",
                           "--size-bound", "2")
        assert code == 1
        assert json.loads(out)["found"] is False

    def test_int_ring(self, capsys):
        code, out, _ = run(capsys, "minimal", "--ring", "int",
                           "--coeffs", "1;1;-2", "--N", "1",
                           "--size-bound", "3")
        assert code == 0


class TestExtremal:
    def test_fqt(self, capsys):
        code, out, _ = run(capsys, "extremal", "--ring", "fqt", "--q", "2",
                           "--D", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["claimed_min"] == 3

    def test_int(self, capsys):
        code, out, _ = run(capsys, "extremal", "--ring", "int", "--D", "2")
        assert code == 0
        assert json.loads(out)["triple"] == [5, 6, 7]

    def test_missing_q_exit_two(self, capsys):
        code, _, _ = run(capsys, "extremal", "--ring", "fqt", "--D", "2")
        assert code == 2

    def test_seed_byte_identical(self, capsys):
        _, out1, _ = run(capsys, "extremal", "--ring", "fqt", "--q", "5",
                         "--D", "2", "--seed", "3")
        _, out2, _ = run(capsys, "extremal", "--ring", "fqt", "--q", "5",
                         "--D", "2", "--seed", "3")
        assert out1 == out2


class TestHeuristic:
    def test_mc_exact(self, capsys):
        code, out, _ = run(capsys, "heuristic", "--mode", "mc", "--q", "2",
                           "--coeffs", "1;t;t+1", "--N", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["exact"] is True
        assert doc["empirical_rate"] == 0.25

    def test_mc_seed_byte_identical(self, capsys):
        args = ("heuristic", "--mode", "mc", "--q", "2", "--coeffs", "1;t;t+1",
                "--N", "2", "--family", "cyclic", "--trials", "200",
                "--seed", "5")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_pn(self, capsys):
        code, out, _ = run(capsys, "heuristic", "--mode", "pn", "--q", "2",
                           "--d", "1", "--n", "3", "--N", "1",
                           "--group-size", "2")
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["p"] - (15 / 16) ** 4) < 1e-12

    def test_scan_csv(self, capsys):
        code, out, _ = run(capsys, "heuristic", "--mode", "scan", "--q", "2",
                           "--d", "1", "--n", "3", "--growth", "1,2,3",
                           "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "N,growth_constant,log_group_size,log_p"


class TestNumfield:
    def test_pipeline(self, capsys):
        code, out, _ = run(capsys, "numfield", "--action", "pipeline",
                           "--m", "-7", "--alpha", "w")
        assert code == 0
        doc = json.loads(out)
        assert doc["kind"] == "numfield"
        assert doc["dimension"] == 6

    def test_check_negative(self, capsys):
        code, out, _ = run(capsys, "numfield", "--action", "check",
                           "--m", "-15", "--coeffs", "1;1;w")
        assert code == 1

    def test_rou_found(self, capsys):
        code, out, _ = run(capsys, "numfield", "--action", "rou",
                           "--m", "-3", "--coeffs", "1;1;1")
        assert code == 0
        assert json.loads(out)["common_order"] == 3

    def test_rou_not_found(self, capsys):
        code, out, _ = run(capsys, "numfield", "--action", "rou",
                           "--m", "-15", "--coeffs", "1;1;w",
                           "--max-order", "30")
        assert code == 1

    def test_twist(self, capsys):
        code, out, _ = run(capsys, "numfield", "--action", "twist",
                           "--coeffs", "1;1;-2", "--members", "1,1,1;2,2,2",
                           "--j", "1", "--order", "3")
        assert code == 0
        assert json.loads(out)["size"] == 6


class TestVerify:
    def test_round_trip_via_file(self, capsys, tmp_path):
        code, out, _ = run(capsys, "certify", "--q", "2",
                           "--coeffs", "1;t;t+1", "--N", "2")
        path = tmp_path / "cert.json"
        path.write_text(out)
        code, out2, _ = run(capsys, "verify", str(path))
        assert code == 0
        assert json.loads(out2)["verified"] is True

    def test_tampered_exit_one(self, capsys, tmp_path):
        code, out, _ = run(capsys, "certify", "--q", "2",
                           "--coeffs", "1;t;t+1", "--N", "2")
        doc = json.loads(out)
        doc["kernel_vector"][0] = "t^5"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        code, out2, _ = run(capsys, "verify", str(path))
        assert code == 1

    def test_malformed_exit_two(self, capsys, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{]")
        code, _, err = run(capsys, "verify", str(path))
        assert code == 2

    def test_missing_file_exit_two(self, capsys):
        code, _, _ = run(capsys, "verify", "/nonexistent/cert.json")
        assert code == 2


class TestBatch:
    def grid(self, tmp_path, rows):
        path = tmp_path / "grid.csv"
        path.write_text("q,N,coeffs\n" + "\n".join(rows) + "\n")
        return str(path)

    def test_all_ok(self, capsys, tmp_path):
        path = self.grid(tmp_path, ["2,1,1;t;t+1", "2,2,1;t;t+1", "3,1,1;t;t+1"])
        code, out, _ = run(capsys, "batch", "--grid", path, "--format", "csv")
        assert code == 0
        assert out.count(",ok,") == 3

    def test_not_applicable_still_ok(self, capsys, tmp_path):
        path = self.grid(tmp_path, ["2,1,1;t;t+1", "2,1,1;1;t"])
        code, out, _ = run(capsys, "batch", "--grid", path, "--format", "csv")
        assert code == 0
        assert "not-applicable" in out

    def test_empty_exit_two(self, capsys, tmp_path):
        path = self.grid(tmp_path, [])
        code, _, _ = run(capsys, "batch", "--grid", path)
        assert code == 2

    def test_jobs_match_sequential(self, capsys, tmp_path):
        rows = ["2,1,1;t;t+1", "2,2,1;t;t+1", "3,1,1;t;t+1", "2,1,1;1;t"]
        path = self.grid(tmp_path, rows)
        _, out1, _ = run(capsys, "batch", "--grid", path, "--format", "csv")
        _, out2, _ = run(capsys, "batch", "--grid", path, "--format", "csv",
                         "--jobs", "2")
        assert out1 == out2


class TestBudgetEnv:
    def test_env_budget_applies(self, capsys, monkeypatch):
        monkeypatch.setenv("SMYTH_BUDGET", "10")
        code, _, _ = run(capsys, "enumerate", "--q", "5",
                         "--coeffs", "1;t;t+1;t+2", "--N", "3")
        assert code == 2

    def test_flag_overrides_env(self, capsys, monkeypatch):
        monkeypatch.setenv("SMYTH_BUDGET", "10")
        code, _, _ = run(capsys, "enumerate", "--q", "2",
                         "--coeffs", "1;t;t+1", "--N", "1",
                         "--budget", str(1 << 22))
        assert code == 0

    def test_invalid_env_exit_two(self, capsys, monkeypatch):
        monkeypatch.setenv("SMYTH_BUDGET", "lots")
        code, _, err = run(capsys, "enumerate", "--q", "2",
                           "--coeffs", "1;t;t+1", "--N", "1")
        assert code == 2
