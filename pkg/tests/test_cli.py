import json

import numpy as np
import pytest
from helpers import SQRT2, basis, random_vectors

from ucfactor.app import EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, EXIT_VERIFY, main
from ucfactor.util.jsonio import encode_complex_array


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, json.loads(captured.out), captured


def statuses(report):
    return {check["name"]: check["status"] for check in report["checks"]}


class TestFactorize:
    def test_rank_one(self, capsys, write_problem):
        code, report, _ = run(capsys, "factorize", write_problem({"dim": 2, "phi": basis(2, 0, 0)}))
        assert code == EXIT_OK
        assert report["status"] == "ok"
        assert report["results"]["alpha"] == pytest.approx([SQRT2, SQRT2], abs=1e-6)
        assert report["results"]["bessel"] == pytest.approx(1.0)
        assert report["results"]["pi2_sq"] == pytest.approx(4.0)
        assert set(report["certificate"]) >= {"v", "X", "gap"}
        assert set(statuses(report).values()) == {"pass"}

    def test_orthonormal(self, capsys, write_problem):
        code, report, _ = run(capsys, "factorize", write_problem({"dim": 2, "phi": basis(2, 0, 1)}))
        assert code == EXIT_OK
        assert report["results"]["alpha"] == pytest.approx([1, 1], abs=1e-7)

    def test_missing_phi(self, capsys, write_problem):
        code, report, _ = run(capsys, "factorize", write_problem({"dim": 2}))
        assert code == EXIT_INPUT
        assert report["error"]["type"] == "ProblemFileError"

    def test_missing_file(self, capsys, tmp_path):
        code, report, _ = run(capsys, "factorize", str(tmp_path / "absent.json"))
        assert code == EXIT_INPUT
        assert report["status"] == "error"

    def test_certification_failure_keeps_partial_certificate(self, capsys, write_problem, isolated_config):
        (isolated_config / "settings.json").write_text(json.dumps({"max_iter": 1}), encoding="utf-8")
        code, report, _ = run(capsys, "factorize", write_problem({"dim": 2, "phi": basis(2, 0, 0, 0)}))
        assert code == EXIT_NUMERIC
        assert report["error"]["type"] == "CertificationError"
        assert report["certificate"]["certified"] is False

    def test_csv_output(self, capsys, write_problem, tmp_path):
        table = tmp_path / "alpha.csv"
        code, _, _ = run(capsys, "factorize", write_problem({"dim": 2, "phi": basis(2, 0, 1)}), "--csv", str(table))
        assert code == EXIT_OK
        lines = table.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "n,alpha,abs_a,abs_b"
        assert len(lines) == 3
        assert lines[1].startswith("0,") and lines[1].endswith(",,")

    def test_timing_flag(self, capsys, write_problem):
        path = write_problem({"dim": 2, "phi": basis(2, 0, 1)})
        _, plain, _ = run(capsys, "factorize", path)
        _, timed, _ = run(capsys, "factorize", path, "--timing")
        assert "timing_seconds" not in plain
        assert timed["timing_seconds"] >= 0


class TestVerify:
    def _factorized(self, capsys, write_problem, tmp_path):
        _, report, _ = run(capsys, "factorize", write_problem({"dim": 2, "phi": basis(2, 0, 0)}))
        path = tmp_path / "factorized.json"
        path.write_text(json.dumps(report), encoding="utf-8")
        return path, report

    def test_factorize_output_passes(self, capsys, write_problem, tmp_path):
        path, _ = self._factorized(capsys, write_problem, tmp_path)
        code, report, _ = run(capsys, "verify", str(path))
        assert code == EXIT_OK
        checks = statuses(report)
        assert checks["dual_feasibility"] == "pass"
        assert checks["brute_pietsch"] == "pass"
        assert checks["brute_sign_norm"] == "pass"
        assert checks["reconstruction"] == "pass"
        assert report["results"]["certificate_source"] == "file"
        assert report["results"]["dual_check"]["feasible"] is True

    def test_tampered_certificate(self, capsys, write_problem, tmp_path):
        path, report = self._factorized(capsys, write_problem, tmp_path)
        X = report["certificate"]["X"]
        X[0][0] = [2.0, 0.0]
        X[1][1] = [2.0, 0.0]
        path.write_text(json.dumps(report), encoding="utf-8")
        code, verified, _ = run(capsys, "verify", str(path))
        assert code == EXIT_VERIFY
        assert statuses(verified)["dual_feasibility"] == "fail"
        assert verified["status"] == "failed"

    def test_split_report_is_rejected(self, capsys, write_problem, tmp_path):
        problem = {"dim": 2, "m": np.array([1, 3]), "phi": basis(2, 0, 1), "psi": basis(2, 0, 0), "witness": basis(2, 0)}
        _, report, _ = run(capsys, "split", write_problem(problem), "--kind", "weak")
        assert report["command"] == "split"
        path = tmp_path / "split.json"
        path.write_text(json.dumps(report), encoding="utf-8")
        code, verified, _ = run(capsys, "verify", str(path))
        assert code == EXIT_INPUT
        assert verified["error"]["type"] == "ProblemFileError"
        assert "split" in verified["error"]["message"]

    def test_verify_report_is_accepted(self, capsys, write_problem, tmp_path):
        path, _ = self._factorized(capsys, write_problem, tmp_path)
        _, report, _ = run(capsys, "verify", str(path))
        path.write_text(json.dumps(report), encoding="utf-8")
        code, _, _ = run(capsys, "verify", str(path))
        assert code == EXIT_OK

    def test_malformed_certificate(self, capsys, write_problem, tmp_path):
        path, report = self._factorized(capsys, write_problem, tmp_path)
        report["certificate"]["X"] = [[[1.0, 0.0]]]
        path.write_text(json.dumps(report), encoding="utf-8")
        code, _, _ = run(capsys, "verify", str(path))
        assert code == EXIT_INPUT

    def test_large_input_skips_brute_checks(self, capsys, write_problem):
        rng = np.random.default_rng(30)
        path = write_problem({"dim": 4, "phi": random_vectors(rng, 30, 4)})
        code, report, _ = run(capsys, "verify", path, "--trials", "200")
        checks = statuses(report)
        assert checks["brute_pietsch"] == "skipped"
        assert checks["brute_sign_norm"] == "skipped"
        assert checks["reconstruction"] == "skipped"
        assert code == EXIT_OK
        assert report["results"]["certificate_source"] == "computed"


class TestSplit:
    def test_weak(self, capsys, write_problem):
        path = write_problem(
            {"dim": 2, "m": np.array([1, 1]), "phi": basis(2, 0, 1), "psi": basis(2, 0, 0), "witness": basis(2, 0)}
        )
        code, report, _ = run(capsys, "split", path, "--kind", "weak")
        assert code == EXIT_OK
        results = report["results"]
        assert results["max_residual"] <= 1e-12
        assert results["margin"] == pytest.approx(1.0)
        assert results["witness"] == {"margin": pytest.approx(1.0), "worst_index": 0, "size": 1}
        assert results["side"] == "psi"
        assert results["bessel_a_phi"] <= 1 + 1e-8
        assert results["bessel_b_psi"] <= 2 + 1e-8

    def test_weak_margin_below_one(self, capsys, write_problem):
        path = write_problem({"dim": 2, "phi": basis(2, 0, 1), "psi": basis(2, 0, 1), "witness": basis(2, 0)})
        code, report, _ = run(capsys, "split", path, "--kind", "weak")
        assert code == EXIT_NUMERIC
        assert report["error"]["type"] == "WitnessMarginError"
        assert report["error"]["index"] == 1

    def test_weak_without_witness(self, capsys, write_problem):
        path = write_problem({"dim": 2, "phi": basis(2, 0, 1), "psi": basis(2, 0, 0)})
        code, _, _ = run(capsys, "split", path, "--kind", "weak")
        assert code == EXIT_INPUT

    def test_weak_phi_side(self, capsys, write_problem):
        path = write_problem(
            {"dim": 2, "m": np.array([1, 1]), "phi": basis(2, 0, 0), "psi": basis(2, 0, 1), "witness": basis(2, 0)}
        )
        code, report, _ = run(capsys, "split", path, "--kind", "weak")
        assert code == EXIT_NUMERIC
        code, report, _ = run(capsys, "split", path, "--kind", "weak", "--side", "phi")
        assert code == EXIT_OK
        assert report["flags"]["side"] == "phi"
        results = report["results"]
        assert results["side"] == "phi"
        assert results["max_residual"] <= 1e-12
        assert results["bessel_b_psi"] <= 1 + 1e-8
        assert set(statuses(report).values()) == {"pass"}

    def test_absolute(self, capsys, write_problem):
        path = write_problem({"dim": 2, "m": np.array([1, 1]), "phi": basis(2, 0, 1), "psi": basis(2, 0, 0)})
        code, report, _ = run(capsys, "split", path, "--kind", "absolute")
        assert code == EXIT_OK
        assert report["results"]["bessel_b_psi"] == pytest.approx(1.0, abs=1e-8)
        assert report["results"]["bessel_a_phi"] == pytest.approx(2.0, abs=1e-6)

    def test_measure(self, capsys, write_problem):
        measure = {"points": basis(2, 0, 1), "weights": [0.5, 0.5]}
        path = write_problem({"dim": 2, "phi": basis(2, 0, 1), "psi": basis(2, 0, 1), "measure": measure})
        code, report, _ = run(capsys, "split", path, "--kind", "measure")
        assert code == EXIT_OK
        results = report["results"]
        assert results["measure_identity"] == pytest.approx(results["alpha_sq_sum"], rel=1e-8)
        assert statuses(report)["hs_bessel_probe"] == "pass"

    def test_degenerate_measure(self, capsys, write_problem):
        measure = {"points": basis(2, 1), "weights": [1.0]}
        path = write_problem({"dim": 2, "phi": basis(2, 1, 0), "psi": basis(2, 0, 1), "measure": measure})
        code, report, _ = run(capsys, "split", path, "--kind", "measure")
        assert code == EXIT_NUMERIC
        assert report["error"]["type"] == "DegenerateMeasureError"
        assert report["error"]["index"] == 1

    def test_kind_is_required(self, write_problem):
        with pytest.raises(SystemExit) as info:
            main(["split", write_problem({"dim": 1})])
        assert info.value.code == 2


class TestDiagnose:
    def _problem(self, write_problem, n=5):
        rng = np.random.default_rng(n)
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        return write_problem(
            {
                "dim": 3,
                "phi": random_vectors(rng, n, 3),
                "psi": random_vectors(rng, n, 3),
                "m": rng.standard_normal(n) + 1j * rng.standard_normal(n),
                "basis": Q.T.astype(complex),
                "operator": rng.standard_normal((3, 3)) + 0j,
            }
        )

    def test_all_checks_pass(self, capsys, write_problem):
        code, report, _ = run(capsys, "diagnose", self._problem(write_problem))
        assert code == EXIT_OK
        checks = statuses(report)
        assert checks["sandwich"] == "pass"
        assert checks["uc_constant"] == "pass"
        assert checks["operator_roundtrip"] == "pass"
        assert checks["orlicz_condition"] == "skipped"
        assert report["results"]["uc"]["method"] == "exact"

    def test_constant_psi_runs_orlicz_condition(self, capsys, write_problem):
        rng = np.random.default_rng(2)
        psi = np.tile(rng.standard_normal(3) + 1j * rng.standard_normal(3), (4, 1))
        path = write_problem({"dim": 3, "phi": random_vectors(rng, 4, 3), "psi": psi})
        code, report, _ = run(capsys, "diagnose", path)
        assert code == EXIT_OK
        assert statuses(report)["orlicz_condition"] == "pass"

    def test_cap_falls_back_to_sampling(self, capsys, write_problem):
        code, report, captured = run(capsys, "diagnose", self._problem(write_problem, n=8), "--max-enum", "4")
        assert code == EXIT_OK
        assert report["flags"]["c0_max_enum"] == 4
        assert report["results"]["uc"]["method"] == "sampled"
        assert "sampled mode" in captured.err

    def test_zero_vectors_do_not_count_towards_caps(self, capsys, write_problem):
        rng = np.random.default_rng(12)
        phi = np.vstack([random_vectors(rng, 2, 2), np.zeros((8, 2))])
        path = write_problem({"dim": 2, "phi": phi, "psi": random_vectors(rng, 10, 2)})
        code, report, captured = run(capsys, "diagnose", path, "--max-enum", "4")
        assert code == EXIT_OK
        assert report["results"]["uc"]["method"] == "exact"
        assert "sampled mode" not in captured.err

    def test_environment_cap(self, capsys, write_problem, monkeypatch):
        monkeypatch.setenv("UCFACTOR_MAX_ENUM", "3")
        _, report, _ = run(capsys, "diagnose", self._problem(write_problem))
        assert report["flags"]["uc_max_enum"] == 3
        assert report["results"]["uc"]["method"] == "sampled"

    def test_reports_are_byte_identical(self, capsys, write_problem):
        path = self._problem(write_problem, n=9)
        outputs = []
        for _ in range(2):
            main(["diagnose", path, "--mode", "sampled", "--trials", "300", "--seed", "5", "-q"])
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]
        assert json.loads(outputs[0])["flags"]["seed"] == 5

    def test_quiet_suppresses_summary(self, capsys, write_problem):
        main(["diagnose", self._problem(write_problem), "-q"])
        assert capsys.readouterr().err == ""

    def test_input_digest_tracks_content(self, capsys, write_problem):
        first = write_problem({"dim": 1, "phi": np.array([[1.0]])}, name="a.json")
        second = write_problem({"dim": 1, "phi": np.array([[2.0]])}, name="b.json")
        _, one, _ = run(capsys, "diagnose", first)
        _, two, _ = run(capsys, "diagnose", second)
        assert one["input_digest"] != two["input_digest"]
        assert one["problem"]["phi"] == encode_complex_array([[1.0]])
