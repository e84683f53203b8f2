import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from entangle_verdict import entanglement
from entangle_verdict.entanglement import Verdict
from entangle_verdict.fileio import InputDocument, InputKind, matrix_to_json, parse_matrix_file
from entangle_verdict.linalg import IDENTITY4
from entangle_verdict.report import (
    FLAG_ASYMMETRIC,
    FLAG_BOUNDARY,
    FLAG_FIT_REJECTED,
    FLAG_RECONSTRUCTED,
    REPORT_SCHEMA,
    AnalysisOptions,
    InternalInconsistencyError,
    analyze,
    analyze_batch,
    analyze_path,
    report_from_dict,
    report_to_dict,
)
from entangle_verdict.simulate import (
    Regime,
    SimulationPlan,
    ideal_counts,
    random_density_matrix,
    random_x_state,
    sample_counts,
)
from entangle_verdict.states import XStateParams, validate_density, x_state_matrix, x_state_to_density
from entangle_verdict.tomography import CoincidenceRecord

FIXTURES = Path(__file__).parent / "fixtures"


def matrix_doc(m, name="test"):
    return InputDocument(InputKind.MATRIX, np.asarray(m, dtype=complex), {"source": name})


def counts_doc(records, name="counts"):
    return InputDocument(InputKind.COUNTS, list(records), {"source": name})


def test_bell_report():
    r = analyze_path(FIXTURES / "bell.json")
    assert r.verdict is Verdict.ENTANGLED
    assert r.negativity == pytest.approx(0.5, abs=1e-12)
    assert r.concurrence == pytest.approx(1.0, abs=1e-12)
    assert r.decomposition is None
    assert "beta-gamma" in r.decomposition_reason
    assert r.condition_margin == pytest.approx(0.5)


def test_separable_x_state_report():
    r = analyze_path(FIXTURES / "x_separable.json")
    assert r.verdict is Verdict.SEPARABLE
    assert len(r.decomposition.decomposition.terms) == 8
    assert r.decomposition.verified
    assert r.decomposition.max_error <= 1e-12
    assert r.concurrence == 0


def test_counts_from_maximally_mixed_state():
    rho = validate_density(IDENTITY4 / 4)
    r = analyze(counts_doc(sample_counts(SimulationPlan(rho, counts_per_setting=10**6, seed=1))))
    assert r.verdict is Verdict.SEPARABLE
    assert r.negativity < 5e-3
    assert FLAG_RECONSTRUCTED in r.flags


def test_fit_rejected_keeps_ppt_verdict():
    # a random full-rank state is far from X form
    rho = random_density_matrix(3)
    r = analyze(matrix_doc(rho.m))
    assert FLAG_FIT_REJECTED in r.flags
    assert not r.x_fit.accepted
    assert r.condition_margin is None and r.decomposition is None
    assert r.verdict is entanglement.ppt_verdict(rho).verdict


def test_boundary_state_flagged():
    r = analyze(matrix_doc(x_state_matrix(XStateParams(0.3, 0.2, 0.2, 0.2, 0.3))))
    assert r.verdict is Verdict.SEPARABLE
    assert FLAG_BOUNDARY in r.flags
    assert r.decomposition.verified


def test_asymmetric_state_reports_margin_without_decomposition():
    r = analyze(matrix_doc(x_state_matrix(XStateParams(0.25, 0.1, 0.4, 0.21, 0.25))))
    assert r.verdict is Verdict.ENTANGLED
    assert FLAG_ASYMMETRIC in r.flags
    assert r.condition_margin == pytest.approx(0.01)
    assert r.decomposition is None


def test_injected_contradiction_raises(monkeypatch):
    def flipped(p):
        entangled, margin = flipped.real(p)
        return not entangled, -margin

    flipped.real = entanglement.x_entanglement_condition
    monkeypatch.setattr(entanglement, "x_entanglement_condition", flipped)
    with pytest.raises(InternalInconsistencyError):
        analyze_path(FIXTURES / "bell.json")


def test_matrix_and_noiseless_counts_agree():
    for seed in range(100):
        p = random_x_state(seed, list(Regime)[seed % 4])
        rho = x_state_to_density(p)
        a = analyze(matrix_doc(rho.m))
        b = analyze(counts_doc(ideal_counts(SimulationPlan(rho, counts_per_setting=10**6))))
        if not (FLAG_BOUNDARY in a.flags or FLAG_BOUNDARY in b.flags):
            assert a.verdict is b.verdict
        assert abs(a.negativity - b.negativity) <= 2e-3


def test_matrix_and_exact_counts_agree_on_random_states():
    for seed in range(50):
        rho = random_density_matrix(seed)
        exact = [
            CoincidenceRecord(r.setting, r.count)
            for r in ideal_counts(SimulationPlan(rho, counts_per_setting=10**5), rounded=False)
        ]
        a, b = analyze(matrix_doc(rho.m)), analyze(counts_doc(exact))
        assert a.verdict is b.verdict
        assert abs(a.negativity - b.negativity) <= 2e-3


def _fixture_reports():
    names = ["bell.json", "identity4.json", "x_separable.json", "x_entangled.json", "bell_counts.csv"]
    reports = [analyze_path(FIXTURES / n) for n in names]
    reports.append(analyze(matrix_doc(random_density_matrix(3).m)))
    reports.append(analyze(matrix_doc(x_state_matrix(XStateParams(0.25, 0.1, 0.4, 0.21, 0.25)))))
    return reports


@pytest.mark.parametrize("report", _fixture_reports(), ids=lambda r: Path(r.input_id).name)
def test_report_schema_and_round_trip(report):
    data = report_to_dict(report)
    text = json.dumps(data)
    jsonschema.validate(json.loads(text), REPORT_SCHEMA)
    again = report_from_dict(json.loads(text))
    assert again == report
    assert report_to_dict(again) == data


def test_schema_rejects_unknown_key():
    data = report_to_dict(analyze_path(FIXTURES / "bell.json"))
    data["extra"] = 1
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(data, REPORT_SCHEMA)


def test_batch_collects_reports_and_errors(tmp_path):
    for name in ("bell.json", "x_separable.json", "bad_label.csv"):
        (tmp_path / name).write_text((FIXTURES / name).read_text())
    (tmp_path / "notes.txt").write_text("ignored")
    results = dict(analyze_batch(tmp_path, AnalysisOptions(), workers=3))
    assert sorted(p.name for p in results) == ["bad_label.csv", "bell.json", "x_separable.json"]
    assert results[tmp_path / "bell.json"].verdict is Verdict.ENTANGLED
    assert isinstance(results[tmp_path / "bad_label.csv"], ValueError)


def test_batch_matches_sequential(tmp_path):
    for seed in range(12):
        p = random_x_state(seed, Regime.ANY)
        (tmp_path / f"s{seed:02d}.json").write_text(json.dumps(matrix_to_json(x_state_matrix(p))))
    batch = analyze_batch(tmp_path)
    for path, report in batch:
        assert report == analyze(parse_matrix_file(path))
