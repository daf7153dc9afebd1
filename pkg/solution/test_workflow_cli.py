#!/usr/bin/env python3
"""
Test the Check Pipeline and the Command Line

This script drives the LangGraph check pipeline directly and every
subcommand through ``main``, checking output formats, exit codes,
reproducibility and the JSONL run log.
"""

import contextlib
import inspect
import io
import json
import sys
import tempfile
from pathlib import Path
from types import SimpleNamespace

import pytest

# Add the current directory to Python path
sys.path.append(str(Path(__file__).parent))

from corank.cli import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, main
from corank.errors import ModelSyntaxError, UsageError
from corank.run_logger import RunLogger, RunStage
from corank.workflow import CertificationWorkflow

FIXTURES = Path(__file__).parent / "data" / "fixtures"


def fx(name: str) -> str:
    return str(FIXTURES / name)


def body_lines(text: str):
    return [line for line in text.splitlines() if not line.startswith("#")]


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("CORANK_SEED", "CORANK_HORIZON", "CORANK_LOG_FILE", "CORANK_SWEEP_WORKERS"):
        monkeypatch.delenv(name, raising=False)


def test_workflow_runs_a_check():
    workflow = CertificationWorkflow()
    report = workflow.run_check(Path(fx("tpg.lvs")).read_text(), Path(fx("rankfuncconv.crt")).read_text(),
                                with_reference=True)
    assert report.verdict == "pass"
    assert report.kind == "rank"
    assert report.reference == {"x0": "1", "x1": "0", "x2": "1", "x3": "1", "x4": "0"}
    assert report.header["default_horizon"] == "64"


def test_workflow_horizon_override():
    workflow = CertificationWorkflow()
    report = workflow.run_check(Path(fx("rptsnonas.lvs")).read_text(),
                                Path(fx("rptsnonas_drank.crt")).read_text(), horizon=5)
    assert report.horizon == 5 and report.verdict == "pass"


def test_workflow_surfaces_errors():
    workflow = CertificationWorkflow()
    with pytest.raises(ModelSyntaxError):
        workflow.run_check("system game\nstate x0 ?\n", "certificate rank cap=omega\nx0 = 0\n")
    with pytest.raises(UsageError):
        workflow.run_check(Path(fx("tpg.lvs")).read_text(), Path(fx("ex2_11.crt")).read_text())
    info = workflow.get_workflow_info()
    assert info["routes"]["drank"] == "pts"
    assert "reference" in info["nodes"]


def test_check_exit_codes(capsys):
    assert main(["check", fx("tpg.lvs"), fx("rankfuncconv.crt")]) == EXIT_PASS
    assert "verdict: pass" in capsys.readouterr().out
    assert main(["check", fx("intro.lvs"), fx("intro_bad.crt")]) == EXIT_FAIL
    assert "violation x0" in capsys.readouterr().out
    assert main(["check", fx("rptsnonas.lvs"), fx("rptsnonas_drank_geo0.crt")]) == EXIT_FAIL


def test_error_exit_codes(capsys):
    assert main(["check", fx("tpg.lvs"), fx("missing.crt")]) == EXIT_ERROR
    assert capsys.readouterr().err.startswith("corank: error:")
    assert main(["check", fx("tpg.lvs"), fx("ex2_11.crt")]) == EXIT_ERROR
    assert main(["check", fx("tpg.lvs"), fx("rankfuncconv.crt"), "--horizon", "0"]) == EXIT_ERROR
    assert main(["synthesize", fx("rptsnonas.lvs"), "--kind", "ncrank"]) == EXIT_ERROR
    assert main(["synthesize", fx("tpg.lvs"), "--kind", "rank", "--gamma", "1/2"]) == EXIT_ERROR
    assert main(["synthesize", fx("tpg.lvs"), "--kind", "drank"]) == EXIT_ERROR
    assert main(["simulate", fx("ex2_8.lvs"), "--state", "nowhere"]) == EXIT_ERROR
    assert main(["frobnicate", fx("tpg.lvs")]) == EXIT_ERROR
    capsys.readouterr()


def test_json_check_output(capsys):
    assert main(["check", fx("rptsnonas.lvs"), fx("rptsnonas_ncrank.crt"), "--reference",
                 "--format", "json"]) == EXIT_PASS
    payload = json.loads(capsys.readouterr().out)
    assert payload["kind"] == "ncrank"
    assert payload["bound"]["x0"] == "3/7"
    assert payload["reference"]["x0"] == "1/2"
    assert payload["header"]["default_gamma_schedule"] == "1-2^-k, k=1..20"


def test_solve_outputs(capsys):
    assert main(["solve", fx("ex2_8.lvs")]) == EXIT_PASS
    assert body_lines(capsys.readouterr().out) == ["x0 1/2", "x1 1", "x2 1", "x3 0"]
    assert main(["solve", fx("ex2_8.lvs"), "--state", "x1", "--iter", "3"]) == EXIT_PASS
    assert body_lines(capsys.readouterr().out) == ["x1 3/4"]
    assert main(["solve", fx("tpg.lvs"), "--iter", "1"]) == EXIT_PASS
    assert body_lines(capsys.readouterr().out) == ["x0 0", "x1 0", "x2 1", "x3 1", "x4 0"]
    assert main(["solve", fx("tree_sample.lvs"), "--format", "json"]) == EXIT_PASS
    payload = json.loads(capsys.readouterr().out)
    assert payload["values"] == {"r": "1", "a": "1", "b": "1", "l": "0", "m": "0"}


def test_synthesize_then_check(tmp_path, capsys):
    cases = [
        ("tpg.lvs", ["--kind", "rank"], "pass"),
        ("tpg.lvs", ["--kind", "rank", "--cap", "1"], "pass"),
        ("tree_sample.lvs", ["--kind", "trank"], "pass"),
        ("rptsnonas.lvs", ["--kind", "ncrank", "--gamma", "9/10"], "pass"),
        ("rptsnonas.lvs", ["--kind", "drank", "--horizon", "16"], "verified-up-to-horizon"),
    ]
    for index, (model, flags, verdict) in enumerate(cases):
        output = tmp_path / f"cert{index}.crt"
        assert main(["synthesize", fx(model), *flags, "--output", str(output)]) == EXIT_PASS
        assert output.read_text().startswith("# ")
        assert main(["check", fx(model), str(output), "--format", "json"]) == EXIT_PASS
        assert json.loads(capsys.readouterr().out)["verdict"] == verdict


def test_strategy_output(capsys):
    assert main(["strategy", fx("intro.lvs"), fx("intro.crt")]) == EXIT_PASS
    assert body_lines(capsys.readouterr().out) == [
        "choose x0 : {x2}",
        "choose x2 : {x3 x4}",
        "choose x3 : {x1}",
        "choose x4 : {x5}",
        "choose x5 : {x3}",
    ]
    assert main(["strategy", fx("intro.lvs"), fx("intro_bad.crt")]) == EXIT_ERROR


def test_sweep_output(capsys):
    assert main(["sweep", fx("rptsnonas.lvs"), "--gammas", "0,1/2"]) == EXIT_PASS
    assert capsys.readouterr().out.splitlines() == ["gamma,x0,x1,x2", "0,0,1,0", "1/2,1/5,1,0", "sup,1/5,1,0"]
    assert main(["sweep", fx("rptsnonas.lvs"), "--workers", "3"]) == EXIT_PASS
    rows = capsys.readouterr().out.splitlines()
    assert len(rows) == 22 and rows[-2].startswith("1048575/1048576,")
    assert main(["sweep", fx("rptsnonas.lvs"), "--gammas", "1"]) == EXIT_ERROR


def test_output_is_reproducible(capsys):
    runs = []
    for _ in range(2):
        assert main(["simulate", fx("ex2_8.lvs"), "--state", "x0", "--trials", "2000", "--seed", "5"]) == EXIT_PASS
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]
    for _ in range(2):
        assert main(["check", fx("intro.lvs"), fx("intro.crt"), "--format", "json"]) == EXIT_PASS
        runs.append(capsys.readouterr().out)
    assert runs[2] == runs[3]


def test_environment_seed_overrides_flag(monkeypatch, capsys):
    monkeypatch.setenv("CORANK_SEED", "7")
    outputs = []
    for seed in ("1", "2"):
        assert main(["simulate", fx("ex2_8.lvs"), "--state", "x0", "--trials", "2000",
                     "--seed", seed, "--format", "json"]) == EXIT_PASS
        outputs.append(json.loads(capsys.readouterr().out))
    assert outputs[0] == outputs[1]
    assert outputs[0]["seed"] == 7
    assert outputs[0]["header"]["seed"] == "7"


def test_run_log_file(tmp_path, capsys):
    log_file = tmp_path / "logs" / "run.jsonl"
    assert main(["check", fx("intro.lvs"), fx("intro_bad.crt"), "--log-file", str(log_file)]) == EXIT_FAIL
    entries = [json.loads(line) for line in log_file.read_text().splitlines()]
    assert entries[0]["entry_type"] == "run_start"
    assert entries[-1]["entry_type"] == "run_end"
    assert entries[-1]["data"]["exit_code"] == EXIT_FAIL
    assert any(e["entry_type"] == "verdict" and e["data"]["verdict"] == "fail" for e in entries)
    assert len({e["run_id"] for e in entries}) == 1
    capsys.readouterr()


def test_run_log_queries(tmp_path):
    run_logger = RunLogger(str(tmp_path / "queries.jsonl"))
    first = run_logger.start_run("check", {"model": "tpg.lvs"})
    workflow = CertificationWorkflow(run_logger=run_logger)
    workflow.run_check(Path(fx("tpg.lvs")).read_text(), Path(fx("rankfuncconv.crt")).read_text(),
                       with_reference=True)
    run_logger.end_run(EXIT_PASS)
    logs = run_logger.get_run_logs()
    assert (logs[0]["entry_type"], logs[-1]["entry_type"]) == ("run_start", "run_end")

    second = run_logger.start_run("check", {"model": "intro.lvs"})
    run_logger.log_verdict("rank", "fail", 2)
    run_logger.log_error(RunStage.REPORT, "UsageError", "bad flag")
    run_logger.end_run(EXIT_FAIL)
    assert len(run_logger.get_run_logs()) == 4

    summary = run_logger.get_run_summary(first)
    assert summary["run_id"] == first
    assert summary["stages"][:2] == ["parse", "check"]
    assert summary["verdicts"] == [{"kind": "rank", "verdict": "pass", "violations": 0}]
    assert summary["errors"] == []
    latest = run_logger.get_run_summary()
    assert latest["run_id"] == second
    assert latest["verdicts"] == [{"kind": "rank", "verdict": "fail", "violations": 2}]
    assert latest["errors"] == ["UsageError: bad flag"]
    assert latest["total_entries"] == 4
    assert run_logger.get_run_summary("run_missing") == {"error": "Run not found"}

    ends = run_logger.search_logs({"entry_type": "run_end"})
    assert [e["data"]["exit_code"] for e in ends] == [EXIT_PASS, EXIT_FAIL]
    assert {e["run_id"] for e in run_logger.search_logs({"entry_type": "verdict"})} == {first, second}


def test_run_log_queries_without_a_file():
    run_logger = RunLogger()
    run_id = run_logger.start_run("solve", {})
    run_logger.log_stage(RunStage.SOLVE, "Solving game model")
    assert run_logger.search_logs({"stage": "solve"})[0]["message"] == "Solving game model"
    assert run_logger.get_run_summary()["stages"] == ["solve"]
    assert run_logger.get_run_summary()["run_id"] == run_id


class _CapturedOutput:
    """Minimal stand-in for the capsys fixture when running without pytest"""

    def __init__(self):
        self._out, self._err = io.StringIO(), io.StringIO()

    def readouterr(self):
        captured = SimpleNamespace(out=self._out.getvalue(), err=self._err.getvalue())
        self._out.seek(0)
        self._out.truncate()
        self._err.seek(0)
        self._err.truncate()
        return captured


def _run_with_fixtures(test):
    wanted = inspect.signature(test).parameters
    capture = _CapturedOutput()
    with pytest.MonkeyPatch.context() as monkeypatch, tempfile.TemporaryDirectory() as tmp_dir:
        for name in ("CORANK_SEED", "CORANK_HORIZON", "CORANK_LOG_FILE", "CORANK_SWEEP_WORKERS"):
            monkeypatch.delenv(name, raising=False)
        available = {"capsys": capture, "monkeypatch": monkeypatch, "tmp_path": Path(tmp_dir)}
        with contextlib.redirect_stdout(capture._out), contextlib.redirect_stderr(capture._err):
            test(**{name: available[name] for name in wanted})


def main_runner():
    """Main function"""
    print("🚀 Pipeline and Command Line Test")
    print("=" * 60)
    tests = [
        test_workflow_runs_a_check,
        test_workflow_horizon_override,
        test_workflow_surfaces_errors,
        test_check_exit_codes,
        test_error_exit_codes,
        test_json_check_output,
        test_solve_outputs,
        test_synthesize_then_check,
        test_strategy_output,
        test_sweep_output,
        test_output_is_reproducible,
        test_environment_seed_overrides_flag,
        test_run_log_file,
        test_run_log_queries,
        test_run_log_queries_without_a_file,
    ]
    failures = 0
    for test in tests:
        try:
            _run_with_fixtures(test)
            print(f"   ✅ {test.__name__}")
        except AssertionError as e:
            failures += 1
            print(f"   ❌ {test.__name__}: {e}")
    print(f"\n📊 {len(tests) - failures}/{len(tests)} passed")
    return failures == 0


if __name__ == "__main__":
    main_runner()
