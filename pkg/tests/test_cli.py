import json

import pytest

from ntangle import cli, concurrence, qstate
from ntangle.errors import InvalidDensityMatrixError, NonConvergenceError


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv("NTANGLE_SEED", raising=False)
    monkeypatch.delenv("NTANGLE_WORKERS", raising=False)


def run(capsys, *argv) -> tuple[int, str]:
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv) -> tuple[int, dict]:
    code, out = run(capsys, *argv)
    return code, json.loads(out)


# --- measure ---


def test_measure_ghz(capsys):
    code, output = run_json(capsys, "measure", "--named", "ghz:4")
    assert code == 0
    assert output["source"] == "ghz:4"
    assert output["invariants"]["n_tangle"] == pytest.approx(1, abs=1e-12)
    assert output["invariants"]["s0"] == pytest.approx([0.5, 0])
    assert output["concurrence"]["residual"] == pytest.approx(1, abs=1e-10)
    assert output["mult_counts"] == {"fast_sum": 8, "final_ops": 2}
    assert set(output["timings"]) == {"invariants", "n_tangle_fast", "concurrence"}


def test_measure_dicke(capsys):
    code, output = run_json(capsys, "measure", "--named", "dicke:2,4")
    assert code == 0
    report = output["concurrence"]
    assert report["c_pairs"][0] ** 2 == pytest.approx(1 / 9, abs=1e-9)
    assert report["c_one_rest_squared"] == pytest.approx(1, abs=1e-12)
    assert report["residual"] == pytest.approx(2 / 3, abs=1e-9)
    assert output["invariants"]["n_tangle"] == pytest.approx(1, abs=1e-12)


def test_measure_odd_n_has_null_tangle(capsys):
    code, output = run_json(capsys, "measure", "--named", "w:5")
    assert code == 0
    assert output["invariants"] is None
    assert output["mult_counts"] == {}
    assert abs(output["concurrence"]["residual"]) <= 1e-10
    assert "odd" in output["notes"][0]


def test_measure_require_tangle_rejects_odd_n(capsys):
    assert cli.main(["measure", "--named", "ghz:3", "--require-tangle"]) == 2
    assert "even n" in capsys.readouterr().err


@pytest.mark.parametrize("name", ["ghz4", "ghz:1", "dicke:4,4", "w:x", "cluster:4"])
def test_measure_rejects_bad_names(capsys, name):
    assert cli.main(["measure", "--named", name]) == 2


def test_measure_without_timing_is_reproducible(capsys):
    first = run(capsys, "measure", "--named", "dicke:3,6", "--no-timing")
    second = run(capsys, "measure", "--named", "dicke:3,6", "--no-timing")
    assert first == second
    assert json.loads(first[1])["timings"] is None


def test_measure_from_file(capsys, write_state):
    path = write_state(qstate.ghz(4))
    code, output = run_json(capsys, "measure", "--file", str(path), "--no-timing")
    assert code == 0
    assert output["source"] == f"sha256:{qstate.spec_digest(path.read_text())}"
    assert output["invariants"]["n_tangle"] == pytest.approx(1, abs=1e-12)


def test_measure_bad_files(capsys, write_state, tmp_path):
    assert cli.main(["measure", "--file", str(tmp_path / "missing.json")]) == 2
    corrupted = write_state({"n": 2, "terms": [{"basis": "00", "re": 3.0}]})
    assert cli.main(["measure", "--file", str(corrupted)]) == 2
    malformed = write_state({"n": 2, "terms": [{"basis": "0", "re": 1.0}]}, "malformed.json")
    assert cli.main(["measure", "--file", str(malformed)]) == 2


def test_measure_odd_tangle_experiment(capsys):
    code, output = run_json(capsys, "measure", "--named", "ghz:3", "--odd-tangle-experiment")
    assert code == 0
    assert output["odd_tangle_experiment"]["oracle_tau"] == pytest.approx(1, abs=1e-12)
    assert cli.main(["measure", "--named", "ghz:4", "--odd-tangle-experiment"]) == 2


@pytest.mark.parametrize("error", [
    NonConvergenceError("Durand-Kerner iteration did not converge", [1e-3]),
    InvalidDensityMatrixError("rho rho~ spectrum is not real non-negative"),
])
def test_measure_computation_failure_exits_one(capsys, monkeypatch, error):
    def fail(state):
        raise error

    monkeypatch.setattr(concurrence, "residual_tangle", fail)
    assert cli.main(["measure", "--named", "ghz:4"]) == 1
    assert "computation failed" in capsys.readouterr().err


def test_measure_product_of_mixed_qubits(capsys, write_state):
    path = write_state(qstate.tensor(qstate.ghz(3), qstate.ghz(3)))
    code, output = run_json(capsys, "measure", "--file", str(path), "--no-timing")
    assert code == 0
    assert output["concurrence"]["residual"] == pytest.approx(1, abs=1e-10)


# --- verify ---


def test_verify_passes(capsys):
    code, output = run_json(capsys, "verify", "--n", "4", "--trials", "3", "--seed", "7")
    assert code == 0
    assert output["passed"]
    assert len(output["suites"]) == 17


def test_verify_single_suite(capsys):
    code, output = run_json(capsys, "verify", "--n", "4,6", "--trials", "2", "--suite", "istar_forms")
    assert code == 0
    assert [suite["name"] for suite in output["suites"]] == ["istar_forms"]
    assert output["qubits"] == [4, 6]


def test_verify_corrupted_file_fails(capsys, write_state):
    corrupted = write_state({"n": 2, "terms": [{"basis": "00", "re": 3.0}]})
    code, output = run_json(
        capsys, "verify", "--n", "4", "--trials", "2", "--suite", "result1_forms", "--file", str(corrupted)
    )
    assert code == 1
    assert not output["suites"][0]["passed"]


def test_verify_usage_errors(capsys):
    assert cli.main(["verify", "--suite", "nonexistent"]) == 2
    assert cli.main(["verify", "--n", "four"]) == 2
    assert cli.main(["verify", "--trials", "0"]) == 2


def test_environment_settings(capsys, monkeypatch):
    monkeypatch.setenv("NTANGLE_SEED", "11")
    code, output = run_json(capsys, "verify", "--trials", "2", "--suite", "tangle_range")
    assert code == 0
    assert output["seed"] == 11
    monkeypatch.setenv("NTANGLE_WORKERS", "0")
    assert cli.main(["verify", "--trials", "2"]) == 2


# --- bench ---


def test_bench_json(capsys):
    code, output = run_json(capsys, "bench", "--n", "4", "--methods", "fast,constrained,raw", "--trials", "2", "--json")
    assert code == 0
    assert output["agreement_ok"]
    assert [record["method"] for record in output["records"]] == ["fast", "constrained", "raw"]


def test_bench_table(capsys):
    code, out = run(capsys, "bench", "--n", "2", "--methods", "fast", "--trials", "1")
    assert code == 0
    assert "median s" in out


def test_bench_usage_errors(capsys):
    assert cli.main(["bench", "--n", "4", "--methods", "slow"]) == 2
    assert cli.main(["bench", "--n", "5", "--methods", "raw"]) == 2
    assert cli.main(["bench", "--n", "3", "--methods", "fast"]) == 2


# --- factor ---


def test_factor_product(capsys, write_state, tmp_path):
    qubit = qstate.superposition({"0": 1, "1": 2})
    path = write_state(qstate.tensor(qubit, qstate.ghz(3)))
    out_dir = tmp_path / "parts"
    code, output = run_json(capsys, "factor", "--file", str(path), "--out-dir", str(out_dir))
    assert code == 0
    assert output["product"]
    assert output["case"] == 2
    assert output["fidelity"] >= 1 - 1e-9
    (re0, im0), (re1, im1) = output["qubit"]["amplitudes"]
    assert abs(complex(re1, im1) / complex(re0, im0) - 2) <= 1e-10
    assert "c_value" not in output
    assert qstate.load_state(out_dir / "rest.json").allclose(qstate.ghz(3), atol=1e-12)
    assert sorted(output["written"]) == sorted([str(out_dir / "qubit.json"), str(out_dir / "rest.json")])


def test_factor_case_one(capsys, write_state):
    path = write_state(qstate.tensor(qstate.basis("1"), qstate.w(3)))
    code, output = run_json(capsys, "factor", "--file", str(path))
    assert code == 0
    assert output["case"] == 1
    assert output["written"] == []


def test_factor_entangled(capsys, write_state):
    code, output = run_json(capsys, "factor", "--file", str(write_state(qstate.ghz(4))))
    assert code == 0
    assert not output["product"]
    assert output["c_value"] == pytest.approx(1, abs=1e-12)
    assert "qubit" not in output


def test_factor_tolerance_flag(capsys, write_state):
    almost = qstate.superposition({"0000": 1, "1111": 1e-6})
    path = write_state(almost)
    _, strict = run_json(capsys, "factor", "--file", str(path))
    _, loose = run_json(capsys, "factor", "--file", str(path), "--tol", "1e-4")
    assert not strict["product"]
    assert loose["product"]
    assert strict["c_value"] == pytest.approx(2e-6 / (1 + 1e-12), rel=1e-6)


def test_no_command_is_a_usage_error(capsys):
    assert cli.main([]) == 2
    assert cli.main(["--help"]) == 0
