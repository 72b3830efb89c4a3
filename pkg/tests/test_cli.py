import json

import numpy as np
import pytest

from gdacube import cli
from gdacube.lin_vi import LinVIInstance
from gdacube.pure_circuit import PureCircuitInstance
from gdacube.reduction import GdaInstance, JointPoint


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def workspace(tmp_path):
    """Generated pc/vi files plus a built instance and a random point."""
    pc = tmp_path / "pc.json"
    vi = tmp_path / "vi.json"
    inst = tmp_path / "inst.json"
    assert run("gen-pc", "--kind", "ring", "--size", 3, "--seed", 0, "--out", pc) == 0
    assert run("gen-vi", "--m", 1, "--seed", 5, "--out", vi) == 0
    assert run("build", "--pc", pc, "--vi", vi, "--n", 2, "--epsilon", 1e-3,
               "--delta", 0.5, "--out", inst) == 0
    instance = GdaInstance.from_json_dict(json.loads(inst.read_text()))
    point = tmp_path / "point.json"
    rng = np.random.default_rng(0)
    p = JointPoint(rng.uniform(0, 1, instance.d), rng.uniform(0, 1, instance.d))
    point.write_text(json.dumps(p.to_json_dict()))
    return tmp_path, pc, vi, inst, point, instance


def test_gen_outputs_are_valid(workspace):
    _, pc, vi, *_ = workspace
    PureCircuitInstance.from_json_dict(json.loads(pc.read_text()))
    LinVIInstance.from_json_dict(json.loads(vi.read_text()))


def test_build_writes_instance_with_bounds(workspace):
    *_, inst_path, _point, instance = workspace
    blob = json.loads(inst_path.read_text())
    assert blob["d"] == 6
    assert set(blob["bounds"]) == {"G", "L", "B", "note"}
    assert instance.d == 6


def test_build_paper_mode_refuses_with_cap_exit(workspace, capsys):
    tmp, pc, vi, *_ = workspace
    vi2 = tmp / "vi2.json"
    assert run("gen-vi", "--m", 2, "--seed", 0, "--out", vi2) == 0
    code = run("build", "--pc", pc, "--vi", vi2, "--paper", "--rho", "1/2",
               "--out", tmp / "nope.json")
    assert code == cli.EXIT_CAP
    out = capsys.readouterr()
    # exact rational parameters are reported before refusal
    assert str(9 * 2**86) in out.out
    assert "1/16384" in out.out
    assert not (tmp / "nope.json").exists()


def test_eval_prints_value(workspace, capsys):
    tmp, _pc, _vi, inst, point, instance = workspace
    assert run("eval", "--instance", inst, "--point", point,
               "--out", tmp / "diag.json") == 0
    out = capsys.readouterr().out
    assert out.startswith("f = ")
    diag = json.loads((tmp / "diag.json").read_text())
    assert len(diag["diagnostics"]["gate_value"]) == instance.kappa


def test_grad_check_passes(workspace, tmp_path):
    *_, inst, _point, _instance = workspace
    outfile = tmp_path / "gc.json"
    assert run("grad-check", "--instance", inst, "--points", 100, "--seed", 3,
               "--out", outfile) == 0
    result = json.loads(outfile.read_text())
    assert result["points"] == 100
    assert result["pass"] and result["max_dual_relative_error"] <= 1e-12


@pytest.mark.parametrize("method", ["gda", "extragradient"])
def test_solve_reports_required_fields(workspace, tmp_path, method):
    *_, inst, _point, _instance = workspace
    outfile = tmp_path / "sol.json"
    assert run("solve", "--instance", inst, "--method", method, "--step", 0.05,
               "--iters", 200, "--seed", 1, "--out", outfile) == 0
    rep = json.loads(outfile.read_text())
    assert {"max_violation", "epsilon", "pass", "method", "iterations", "seed"} <= set(rep)
    assert rep["method"] == method


def test_solve_grid_method(workspace, tmp_path):
    *_, inst, _point, _instance = workspace
    outfile = tmp_path / "sol.json"
    assert run("solve", "--instance", inst, "--method", "grid", "--h", 0.5,
               "--out", outfile) == 0
    rep = json.loads(outfile.read_text())
    assert rep["method"] == "grid"
    # grid method without spacing is a usage error
    assert run("solve", "--instance", inst, "--method", "grid") == cli.EXIT_PARSE


def test_decode_and_audit_commands(workspace, tmp_path, capsys):
    tmp, _pc, _vi, inst, point, instance = workspace
    assert run("decode", "--instance", inst, "--point", point,
               "--out", tmp_path / "dec.json") == 0
    outcome = json.loads((tmp_path / "dec.json").read_text())
    assert outcome["kind"] in ("linvi", "pc", "inconclusive")
    # a generous eps certifies any point, the audit then runs observationally
    assert run("audit", "--instance", inst, "--point", point,
               "--eps", instance.bounds.G, "--out", tmp_path / "audit.json") == 0
    audit = json.loads((tmp_path / "audit.json").read_text())
    assert audit["lemmas"]["coord_bound"]["holds"]
    # an unreachable eps is a precondition failure, not an audit failure
    assert run("audit", "--instance", inst, "--point", point,
               "--eps", 1e-15) == cli.EXIT_VALIDATION


def test_pipeline_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    flags = ["pipeline", "--seed", 7, "--pc-size", 4, "--n", 4, "--iters", 300,
             "--no-timings"]
    assert run(*flags, "--out", a) == 0
    assert run(*flags, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert report["config"]["seed"] == 7
    assert "timings_sec" not in report
    assert {"instance", "solver", "decode", "audit", "dichotomy"} <= set(report)


def test_pipeline_timings_included_by_default(tmp_path):
    out = tmp_path / "r.json"
    assert run("pipeline", "--seed", 1, "--iters", 50, "--out", out) == 0
    assert "timings_sec" in json.loads(out.read_text())


def test_malformed_json_is_a_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert run("build", "--pc", bad, "--vi", bad, "--n", 1, "--epsilon", 1e-3,
               "--delta", 0.5) == cli.EXIT_PARSE
    err = capsys.readouterr().err
    assert "line 1" in err and "bad.json" in err


def test_missing_file_is_a_parse_error(tmp_path):
    assert run("eval", "--instance", tmp_path / "nothere.json",
               "--point", tmp_path / "alsonot.json") == cli.EXIT_PARSE


def test_invalid_circuit_is_a_validation_error(tmp_path, capsys):
    pc = tmp_path / "pc.json"
    pc.write_text(json.dumps({"kappa": 3, "nor": [[0, 1, 2]], "purify": []}))
    vi = tmp_path / "vi.json"
    assert run("gen-vi", "--m", 1, "--seed", 0, "--out", vi) == 0
    assert run("build", "--pc", pc, "--vi", vi, "--n", 1, "--epsilon", 1e-3,
               "--delta", 0.5) == cli.EXIT_VALIDATION


def test_instance_files_round_trip(workspace):
    *_, inst_path, _point, _instance = workspace
    blob = inst_path.read_text()
    back = GdaInstance.from_json_dict(json.loads(blob))
    assert json.dumps(back.to_json_dict(), indent=2, sort_keys=True) + "\n" == blob
