"""
Checks for the command line.
Tests: measure, check, scan, fuzz with replay files, reproduce, exit codes, run configuration
"""

import asyncio
import csv
import io
import json
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

import pytest

from concurrence_monogamy import cli
from concurrence_monogamy.cli import RunConfig, case_seed, default_grid, main, run_concurrently
from concurrence_monogamy.config import OptimizerSettings
from concurrence_monogamy.utils.monogamy import BoundReport, check_qubit_ckw, ckw_sum
from concurrence_monogamy.utils.reporting import decode_state, encode_state, replay_document
from concurrence_monogamy.utils.states import antisymmetric_qutrit, ghz, paper_state_223
from concurrence_monogamy.utils.weights import WeightPoint
from monogamy_checks.test_oracles import ANTISYMMETRIC_C_1_23, FIG1_POINTS


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def _run(capsys, *argv):
    capsys.readouterr()
    status = main(list(argv))
    return status, capsys.readouterr().out


def test_measure_pure_concurrence(capsys):
    print("\n=== Test 1: measure ===")
    status, out = _run(capsys, "measure", "--state", "bell")
    rows = _rows(out)
    assert status == 0
    assert rows[0]["cut"] == "0|1" and float(rows[0]["value"]) == 1.0
    assert rows[0]["direction"] == "exact"

    status, out = _run(capsys, "measure", "--state", "antisymmetric-qutrit", "--cut", "0|12")
    assert status == 0
    assert abs(float(_rows(out)[0]["value"]) - ANTISYMMETRIC_C_1_23) <= 1e-8
    print("✅ Bell and antisymmetric concurrences")


def test_measure_two_qubit_and_jsonl(capsys):
    status, out = _run(capsys, "measure", "--state", "werner", "--t", "0.7", "--quantity", "two-qubit", "--format", "jsonl")
    assert status == 0
    document = json.loads(out.strip())
    assert abs(document["value"] - 0.55) <= 1e-9
    assert document["quantity"] == "two-qubit"


def test_check_theorem2(capsys):
    print("\n=== Test 2: check theorem2 ===")
    status, out = _run(
        capsys, "check", "theorem2", "--state", "antisymmetric-qutrit", "--x", "0.5", "--restarts", "16"
    )
    row = _rows(out)[0]
    assert status == 0
    assert abs(float(row["lhs"]) - 4.0 / 3.0) <= 1e-8
    assert row["satisfied"] == "true" and row["certificate"] == "sufficient"
    print(f"✅ {row['lhs']} >= {row['rhs']}")


def test_check_violation_exit_code(capsys):
    status, out = _run(capsys, "check", "ckw-sum", "--state", "antisymmetric-qutrit", "--restarts", "16")
    assert status == 1
    assert _rows(out)[0]["satisfied"] == "false"


def test_check_theorem4_family(capsys):
    status, out = _run(capsys, "check", "theorem4", "--state", "paper-2223", "--t", "0.2", "--weights", "paper")
    row = _rows(out)[0]
    assert status == 0
    assert abs(float(row["rhs"])) <= 1e-9
    assert row["lhs"] == "" and row["certificate"] == "bound-only"


def test_check_theorem4_optimized(capsys):
    status, out = _run(capsys, "check", "theorem4", "--state", "paper-2223", "--t", "0.2", "--optimize")
    row = _rows(out)[0]
    assert status == 0
    # the rho_23 roof is a search estimate rather than an exact zero
    assert float(row["rhs"]) <= 1e-4


def test_measure_coa_cap(capsys):
    status, out = _run(capsys, "measure", "--state", "paper-223", "--cut", "0,2|1", "--quantity", "coa-upper")
    assert status == 0
    assert abs(float(_rows(out)[0]["value"]) - 1.0) <= 1e-12


def test_human_format_shows_provenance(capsys):
    status, out = _run(capsys, "check", "qubit-ckw", "--state", "w", "--format", "human")
    assert status == 0
    assert "C^2(rho_01)" in out and "two-qubit closed form" in out


def test_usage_errors_exit_2(capsys):
    print("\n=== Test 3: Usage Errors ===")
    assert main(["check", "theorem1", "--state", "bell"]) == 2
    assert main(["measure", "--state", "no-such-state"]) == 2
    assert main(["measure", "--state", "bell", "--cut", "0|1|2"]) == 2
    assert main(["scan", "--start", "1.0", "--stop", "0.5"]) == 2
    assert main(["check", "theorem3", "--state", "ghz", "--param", "n=4", "--weights", "paper"]) == 2
    with pytest.raises(SystemExit) as exit_info:
        main(["check", "not-an-inequality", "--state", "bell"])
    assert exit_info.value.code == 2
    capsys.readouterr()
    print("✅ Inconsistent requests exit with status 2")


def test_unknown_state_reported_directly(capsys):
    assert main(["check", "theorem4", "--state", "nope"]) == 2
    err = capsys.readouterr().err
    assert "unknown state 'nope'" in err and "does not fit" not in err
    assert main(["check", "theorem1", "--state", "ghz", "--param", "n=4"]) == 2
    assert "theorem1 does not fit" in capsys.readouterr().err


def test_fuzz_theorem2_shares_pair_roofs(monkeypatch):
    """Both endpoints of one case reuse a single evaluator"""
    evaluators = []
    original = cli.check_theorem2

    def recording(state, x, opts, tol, evaluator=None):
        evaluators.append(evaluator)
        return original(state, x, opts, tol, evaluator=evaluator)

    monkeypatch.setattr(cli, "check_theorem2", recording)
    config = RunConfig(command="fuzz", suite="theorem2", seed=3, restarts=8)
    reports = cli.fuzz_reports(config, cli.fuzz_state(config, 0))
    assert [report.weights.x for report in reports] == [0.0, 1.0]
    assert len(evaluators) == 2 and evaluators[0] is not None and evaluators[0] is evaluators[1]


def test_scan_published_points(capsys):
    print("\n=== Test 4: scan ===")
    grid = [str(t) for t in FIG1_POINTS]
    status, out = _run(capsys, "scan", "--t-values", *grid)
    assert status == 0
    for row in _rows(out):
        t = float(row["t"])
        assert abs(float(row["lower_bound"]) - FIG1_POINTS[t]) <= 1e-9
        assert abs(float(row["exact_pair_concurrence"]) - FIG1_POINTS[t]) <= 1e-9
        print(f"✅ t={t}: {row['lower_bound']}")


def test_scan_default_grid(capsys):
    assert len(default_grid()) == 68 and default_grid()[0] == 0.33 and default_grid()[-1] == 1.0
    status, out = _run(capsys, "scan", "--workers", "8")
    rows = _rows(out)
    assert status == 0 and len(rows) == 68
    assert float(rows[0]["lower_bound"]) == 0.0
    bounds = [float(row["lower_bound"]) for row in rows]
    assert bounds == sorted(bounds)
    for row in rows:
        t = float(row["t"])
        assert abs(float(row["exact_pair_concurrence"]) - max(0.0, (3 * t - 1) / 2)) <= 1e-10
        assert abs(float(row["lower_bound"]) - float(row["exact_pair_concurrence"])) <= 1e-9


def test_fuzz_passing_suites(capsys):
    print("\n=== Test 5: fuzz ===")
    status, out = _run(capsys, "fuzz", "qubit-ckw", "--count", "5", "--dims", "2x2x2x2")
    assert status == 0 and _rows(out)[0]["passed"] == "5"
    status, out = _run(capsys, "fuzz", "theorem2", "--count", "3", "--dims", "2x2x2")
    assert status == 0 and _rows(out)[0]["failed"] == "0"
    print("✅ CKW and theorem2 suites pass on qubits")


def test_fuzz_failures_write_replay_files(capsys, monkeypatch, tmp_path):
    violated = BoundReport(
        inequality="qubit-ckw", lhs=0.0, rhs=1.0, margin=-1.0, satisfied=False,
        tolerance=1e-9, weights=WeightPoint(), certificate="exact",
    )
    monkeypatch.setattr(cli, "fuzz_reports", lambda config, state: [violated])
    status, out = _run(capsys, "fuzz", "qubit-ckw", "--count", "2", "--failures-dir", str(tmp_path))
    assert status == 1 and _rows(out)[0]["failed"] == "2"
    written = sorted(path.name for path in tmp_path.iterdir())
    assert written == ["replay-qubit-ckw-00000.json", "replay-qubit-ckw-00001.json"]
    document = json.loads((tmp_path / written[0]).read_text())
    assert document["case"] == 0 and document["run_config"]["suite"] == "qubit-ckw"


def test_replay_file_reruns_case(capsys, tmp_path):
    print("\n=== Test 6: Replay ===")
    state = ghz(3)
    report = check_qubit_ckw(state, OptimizerSettings(seed=1))
    config = RunConfig(command="fuzz", suite="qubit-ckw", seed=1).model_dump(mode="json")
    text = replay_document(config, 4, state, report)
    assert text == replay_document(config, 4, state, report)
    path = tmp_path / "replay.json"
    path.write_text(text)

    status, out = _run(capsys, "fuzz", "qubit-ckw", "--replay", str(path))
    row = _rows(out)[0]
    assert status == 0 and row["state"] == "replay:4"
    assert abs(float(row["lhs"]) - 1.0) <= 1e-9
    print("✅ Replay re-evaluates the embedded state")


def test_real_failure_replay_is_reproducible(capsys, monkeypatch, tmp_path):
    """Two runs of a failing fuzz case write byte-identical replay files"""
    print("\n=== Test 7: Reproducible Replay Files ===")
    monkeypatch.setattr(cli, "fuzz_state", lambda config, case: antisymmetric_qutrit())
    monkeypatch.setattr(
        cli, "fuzz_reports", lambda config, state: [ckw_sum(state, config.optimizer(), config.tolerances)]
    )
    argv = ["fuzz", "dual-coa", "--count", "1", "--restarts", "16", "--failures-dir", str(tmp_path)]
    artifacts = []
    for _ in range(2):
        status, out = _run(capsys, *argv)
        assert status == 1 and _rows(out)[0]["failed"] == "1"
        path = tmp_path / "replay-dual-coa-00000.json"
        artifacts.append(path.read_bytes())
        path.unlink()
    assert artifacts[0] == artifacts[1]
    document = json.loads(artifacts[0])
    assert document["report"]["inequality"] == "ckw-sum" and document["report"]["satisfied"] is False
    print(f"✅ {len(artifacts[0])} identical bytes on both runs")


def test_embedded_state_round_trip():
    state = paper_state_223()
    decoded = decode_state(encode_state(state))
    assert decoded.profile == state.profile
    assert (decoded.amplitudes == state.amplitudes).all()
    rho = decode_state(encode_state(state.projector()))
    assert (rho.matrix == state.projector().matrix).all()


def test_run_config(monkeypatch):
    print("\n=== Test 8: Run Configuration ===")
    monkeypatch.setenv("MONOGAMY_SEED", "123")
    config = RunConfig(command="reproduce")
    assert config.seed == 123
    assert RunConfig.model_validate_json(config.model_dump_json()) == config
    monkeypatch.setenv("MONOGAMY_SEED", "not-a-number")
    assert RunConfig(command="reproduce").seed == 20240917
    print("✅ Seed from the environment and JSON round trip")


def test_run_concurrently_keeps_order():
    results = asyncio.run(run_concurrently([3, 1, 2], lambda x: x * 2, workers=2))
    assert results == [6, 2, 4]
    assert case_seed(5, 0) == case_seed(5, 0)
    assert case_seed(5, 0) != case_seed(5, 1)


@pytest.mark.slow
def test_reproduce(capsys):
    print("\n=== Test 9: reproduce ===")
    status, out = _run(capsys, "reproduce")
    rows = _rows(out)
    assert status == 0
    assert all(row["ok"] == "true" for row in rows)
    print(f"✅ {len(rows)} published values reproduced")


@pytest.mark.slow
@pytest.mark.parametrize(
    "suite,dims,count",
    [("theorem2", "2x2x2", 1000), ("theorem2", "3x3x3", 100), ("lemma1", None, 500)],
)
def test_fuzz_long_runs(capsys, tmp_path, suite, dims, count):
    print(f"\n=== Test 10: fuzz {suite} ({count} cases) ===")
    argv = ["fuzz", suite, "--count", str(count), "--workers", "8", "--failures-dir", str(tmp_path)]
    if dims:
        argv += ["--dims", dims]
    status, out = _run(capsys, *argv)
    row = _rows(out)[0]
    assert status == 0 and row["failed"] == "0"
    assert not list(tmp_path.iterdir())
    print(f"✅ {row['passed']}/{count} cases passed")
