import json

import pytest

from app.bounds import CSV_HEADER, INCONCLUSIVE
from app.cli import build_parser, main
from app.manager.settings_manager import settings_manager
from app.mc import SUMMARY_HEADER
from tests.conftest import FAMILIES, SPECS


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_verify_passes(capsys):
    code, out = _run(capsys, "verify", SPECS / "x1x2.json", "--chain")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert doc["kappa_provenance"] == "paper-symmetric"
    assert doc["proof_chain"]["passed"] is True


def test_verify_reports_violation(capsys):
    code, out = _run(capsys, "verify", SPECS / "not_degenerate.json", "--kappa", "4")
    assert code == 1
    assert json.loads(out)["passed"] is False


def test_verify_without_kappa_on_asymmetric_spec(capsys):
    code, out = _run(capsys, "verify", SPECS / "skewed_pairs.json")
    assert code == 4
    assert out == ""


def test_invalid_kappa(capsys):
    code, _ = _run(capsys, "verify", SPECS / "x1x2.json", "--kappa", "0")
    assert code == 2


def test_malformed_spec_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    assert _run(capsys, "decompose", path)[0] == 2
    assert _run(capsys, "decompose", tmp_path / "missing.json")[0] == 2


def test_outcome_guard_exit_code(capsys, monkeypatch):
    monkeypatch.setitem(settings_manager.engine, "max_outcomes", 80)
    code, _ = _run(capsys, "decompose", SPECS / "skewed_pairs.json")
    assert code == 3


def test_decompose_to_file(capsys, tmp_path):
    out = tmp_path / "half_sum4.decomposition.json"
    code, stdout = _run(capsys, "decompose", SPECS / "half_sum4.json", "--out", out)
    assert code == 0
    assert stdout == ""
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["var"] == "1"
    assert doc["rho2"] == "1/4"
    assert doc["degenerate"] is True


def test_bound_inputs_only(capsys):
    code, out = _run(
        capsys, "bound", "--inputs-only", "--e4", "1", "--rho", "1", "--kappa", "4", "--p", "2", "--n", "2", "--format", "csv"
    )
    assert code == 0
    header, row = out.splitlines()
    assert header == ",".join(CSV_HEADER)
    fields = dict(zip(CSV_HEADER, row.split(",")))
    assert float(fields["bK"]) == pytest.approx(41.93, abs=0.01)
    assert fields["verdict"] == INCONCLUSIVE


def test_bound_inputs_only_needs_all_values(capsys):
    assert _run(capsys, "bound", "--inputs-only", "--e4", "1", "--p", "2", "--n", "2")[0] == 2
    assert _run(capsys, "bound")[0] == 2


def test_bound_from_spec(capsys):
    code, out = _run(capsys, "bound", SPECS / "half_sum4.json")
    assert code == 0
    doc = json.loads(out)
    assert float(doc["exact_dk"]) == pytest.approx(0.1875, abs=1e-12)
    assert doc["verdict"] == "dominates"
    assert float(doc["symmetric_bound"]) == pytest.approx(17.985, abs=0.001)


def test_distance_needs_samples_for_sampler_specs(capsys):
    assert _run(capsys, "distance", SPECS / "gaussian_pairs.json")[0] == 2
    code, out = _run(capsys, "distance", SPECS / "gaussian_pairs.json", "--mc", "20000", "--seed", "1")
    assert code == 0
    assert json.loads(out)["source"] == "mc"


def test_simulate_csv(capsys):
    code, out = _run(capsys, "simulate", SPECS / "x1x2.json", "--mc", "1000", "--seed", "3", "--workers", "2", "--format", "csv")
    assert code == 0
    header, row = out.splitlines()
    assert header == ",".join(SUMMARY_HEADER)
    assert row.startswith("3,1000,")


def test_sweep_to_file(capsys, tmp_path):
    out = tmp_path / "linear.csv"
    code, _ = _run(capsys, "sweep", FAMILIES / "linear.yaml", "--out", out)
    assert code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 5
    assert all(line.endswith(",dominates") for line in lines[1:])


def test_unknown_command_is_an_argparse_error():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["explode"])
    assert info.value.code == 2
