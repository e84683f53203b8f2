import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from entangle_verdict import entanglement
from entangle_verdict.cli import EXIT_INCONSISTENT, EXIT_INPUT, EXIT_OK, main
from entangle_verdict.fileio import parse_counts_text, parse_matrix_text
from entangle_verdict.report import REPORT_SCHEMA

FIXTURES = Path(__file__).parent / "fixtures"
BELL = str(FIXTURES / "bell.json")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_bell(capsys):
    code, out, _ = run(["analyze", "--input", BELL], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    jsonschema.validate(data, REPORT_SCHEMA)
    assert data["verdict"] == "Entangled"
    assert data["negativity"] == pytest.approx(0.5)


def test_analyze_separable_still_exits_zero(capsys):
    code, out, _ = run(["analyze", "-i", str(FIXTURES / "x_separable.json"), "--pretty"], capsys)
    assert code == EXIT_OK
    assert out.startswith("{\n")
    assert json.loads(out)["verdict"] == "Separable"


def test_analyze_reads_stdin(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO((FIXTURES / "bell_counts.csv").read_text()))
    code, out, _ = run(["analyze"], capsys)
    assert code == EXIT_OK
    assert "reconstructed" in json.loads(out)["flags"]


def test_analyze_writes_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(["analyze", "-i", BELL, "-o", str(target)], capsys)
    assert code == EXIT_OK and out == ""
    jsonschema.validate(json.loads(target.read_text()), REPORT_SCHEMA)


@pytest.mark.parametrize(
    "name", ["malformed.csv", "bad_label.csv", "duplicate.csv", "negative.csv", "matrix_3x3.json", "matrix_nan.json"]
)
def test_bad_input_exits_one(name, capsys):
    code, out, err = run(["analyze", "-i", str(FIXTURES / name)], capsys)
    assert code == EXIT_INPUT
    assert out == ""
    assert err


def test_missing_file_exits_one(tmp_path, capsys):
    code, _, _ = run(["analyze", "-i", str(tmp_path / "nope.json")], capsys)
    assert code == EXIT_INPUT


def test_unphysical_matrix_exits_one(tmp_path, capsys):
    path = tmp_path / "half.json"
    path.write_text((FIXTURES / "identity4.json").read_text().replace("0.25", "0.5"))
    code, _, err = run(["analyze", "-i", str(path)], capsys)
    assert code == EXIT_INPUT
    assert "trace" in err


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["analyze", "--noise-floor", "lots"])
    assert info.value.code == EXIT_INPUT


def test_injected_contradiction_exits_two(monkeypatch, capsys):
    real = entanglement.x_entanglement_condition
    monkeypatch.setattr(
        entanglement, "x_entanglement_condition", lambda p: (not real(p)[0], -real(p)[1])
    )
    code, out, err = run(["analyze", "-i", BELL], capsys)
    assert code == EXIT_INCONSISTENT
    assert out == ""
    assert "inconsistency" in err


def test_batch(tmp_path, capsys):
    for name in ("bell.json", "x_separable.json", "bell_counts.csv"):
        (tmp_path / name).write_text((FIXTURES / name).read_text())
    code, out, _ = run(["analyze", "--batch", str(tmp_path)], capsys)
    assert code == EXIT_OK
    reports = json.loads(out)
    assert [Path(r["input_id"]).name for r in reports] == ["bell.json", "bell_counts.csv", "x_separable.json"]
    for r in reports:
        jsonschema.validate(r, REPORT_SCHEMA)


def test_batch_with_bad_file_exits_one(tmp_path, capsys):
    for name in ("bell.json", "bad_label.csv"):
        (tmp_path / name).write_text((FIXTURES / name).read_text())
    code, out, _ = run(["analyze", "--batch", str(tmp_path)], capsys)
    assert code == EXIT_INPUT
    assert [("error" in r) for r in json.loads(out)] == [True, False]


def test_decompose(tmp_path, capsys):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(dict(alpha=0.3, beta=0.2, beta_prime=0.2, gamma=0.15, alpha_prime=0.3)))
    code, out, _ = run(["decompose", "-i", str(path)], capsys)
    assert code == EXIT_OK
    d = json.loads(out)["decomposition"]
    assert d["verified"] and len(d["terms"]) == 8
    assert sum(t["weight"] for t in d["terms"]) == pytest.approx(1)


def test_decompose_entangled_params(tmp_path, capsys):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(dict(alpha=0.5, beta=0, beta_prime=0, gamma=0.5, alpha_prime=0.5)))
    code, out, _ = run(["decompose", "-i", str(path)], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["decomposition"] is None
    assert "beta-gamma" in data["reason"]


def test_decompose_bad_params_exits_one(tmp_path, capsys):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(dict(alpha=0.3, beta=0.2)))
    assert run(["decompose", "-i", str(path)], capsys)[0] == EXIT_INPUT
    path.write_text(json.dumps(dict(alpha=0.3, beta=0.2, beta_prime=0.2, gamma=0.4, alpha_prime=0.3)))
    assert run(["decompose", "-i", str(path)], capsys)[0] == EXIT_INPUT


def test_simulate_then_tomo(tmp_path, capsys):
    counts = tmp_path / "c.csv"
    code, _, _ = run(["simulate", "-i", BELL, "-n", "100000", "--seed", "7", "-o", str(counts)], capsys)
    assert code == EXIT_OK
    records = parse_counts_text(counts.read_text()).payload
    assert len(records) == 16
    code, out, _ = run(["tomo", "-i", str(counts)], capsys)
    assert code == EXIT_OK
    m = parse_matrix_text(out).payload
    assert abs(m[0, 3] - 0.5) < 0.02


def test_tomo_raw_of_ideal_counts_is_exact(capsys):
    code, out, _ = run(["tomo", "--raw", "-i", str(FIXTURES / "bell_counts.csv")], capsys)
    assert code == EXIT_OK
    expected = parse_matrix_text((FIXTURES / "bell.json").read_text()).payload
    np.testing.assert_allclose(parse_matrix_text(out).payload, expected, atol=1e-12)


def test_simulate_ideal(capsys):
    code, out, _ = run(["simulate", "-i", BELL, "-n", "10000", "--ideal"], capsys)
    assert code == EXIT_OK
    assert out == (FIXTURES / "bell_counts.csv").read_text()


def test_simulate_seed_from_environment(monkeypatch, capsys):
    argv = ["simulate", "-i", BELL, "-n", "1000"]
    explicit = run(argv + ["--seed", "42"], capsys)[1]
    monkeypatch.setenv("ENTANGLE_VERDICT_SEED", "42")
    assert run(argv, capsys)[1] == explicit
    assert run(argv + ["--seed", "43"], capsys)[1] != explicit
    monkeypatch.setenv("ENTANGLE_VERDICT_SEED", "forty-two")
    assert run(argv, capsys)[0] == EXIT_INPUT


def test_custom_settings_file(tmp_path, capsys):
    # an overcomplete list including the anti-diagonal labels
    settings = tmp_path / "s.csv"
    settings.write_text("\n".join(f"{a},{b}" for a in "HVDARL" for b in "HVDARL") + "\n")
    counts = tmp_path / "c.csv"
    args = ["--settings", str(settings)]
    run(["simulate", "-i", BELL, "-n", "10000", "--ideal", "-o", str(counts)] + args, capsys)
    assert len(parse_counts_text(counts.read_text()).payload) == 36
    code, out, _ = run(["analyze", "-i", str(counts)] + args, capsys)
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "Entangled"


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "entangle_verdict", "analyze", "-i", BELL],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "Entangled"


def test_verbose_logs_summary(caplog, capsys):
    with caplog.at_level("INFO", logger="entangle_verdict"):
        assert run(["-v", "analyze", "-i", BELL], capsys)[0] == EXIT_OK
    assert "Entangled, min PT eigenvalue -5.000e-01" in caplog.text
