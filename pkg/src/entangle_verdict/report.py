"""The analysis pipeline: input document in, verdict report out.

Order of work: (counts only) linear inversion and physical projection;
Peres test on the full matrix; X-form fit; closed-form condition;
product-state decomposition when the fit is symmetric and separable.

The Peres verdict on the full matrix is always the reported verdict. The
closed-form condition is evaluated on the fitted X state and cross-checked
against it: by Weyl's inequality the two smallest partial-transpose
eigenvalues differ by at most the Frobenius norm of the fit error, so a
disagreement beyond ``boundary_tol + ||rho - rho_fit||_F`` can only be a
bug and raises :class:`InternalInconsistencyError`.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import entanglement
from .entanglement import (
    DEFAULT_BOUNDARY_TOL,
    DEFAULT_VERIFY_TOL,
    DecompositionTerm,
    NotSeparableByConstructionError,
    NotSymmetricError,
    PptReport,
    SeparableDecomposition,
    Verdict,
    concurrence_x,
    ppt_verdict,
    separable_decomposition,
    verify_decomposition,
    x_min_pt_eigenvalue,
)
from .fileio import InputDocument, InputKind, parse_input_text, read_text
from .states import (
    DEFAULT_NOISE_FLOOR,
    BlochVector,
    ResidualAboveFloorError,
    XStateParams,
    fit_x_state,
    validate_density,
    x_state_matrix,
)
from .tomography import MeasurementSetting, linear_reconstruct, project_to_physical

FLAG_BOUNDARY = "boundary"
FLAG_FIT_REJECTED = "fit-rejected"
FLAG_ASYMMETRIC = "asymmetric-beta"
FLAG_RECONSTRUCTED = "reconstructed"
FLAG_PROJECTED = "projected"
FLAG_WITHIN_NOISE = "condition-within-noise"
FLAG_UNVERIFIED = "decomposition-unverified"


class InternalInconsistencyError(RuntimeError):
    """The Peres verdict and the closed-form condition disagree beyond any noise allowance."""


@dataclass(frozen=True)
class AnalysisOptions:
    noise_floor: float = DEFAULT_NOISE_FLOOR
    boundary_tol: float = DEFAULT_BOUNDARY_TOL
    settings: tuple[MeasurementSetting, ...] | None = None


@dataclass(frozen=True)
class XFit:
    params: XStateParams
    residual: float
    accepted: bool


@dataclass(frozen=True)
class DecompositionResult:
    decomposition: SeparableDecomposition
    verified: bool
    max_error: float


@dataclass(frozen=True)
class VerdictReport:
    input_id: str
    ppt: PptReport
    x_fit: XFit
    condition_margin: float | None
    decomposition: DecompositionResult | None
    decomposition_reason: str | None
    concurrence: float | None
    flags: tuple[str, ...] = ()

    @property
    def verdict(self) -> Verdict:
        return self.ppt.verdict

    @property
    def negativity(self) -> float:
        return self.ppt.negativity


def analyze(doc: InputDocument, options: AnalysisOptions = AnalysisOptions()) -> VerdictReport:
    flags = []
    if doc.kind is InputKind.COUNTS:
        raw = linear_reconstruct(doc.payload, options.settings)
        rho = project_to_physical(raw)
        flags.append(FLAG_RECONSTRUCTED)
        if np.max(np.abs(raw - rho.m)) > 0:
            flags.append(FLAG_PROJECTED)
    else:
        rho = validate_density(doc.payload)

    ppt = ppt_verdict(rho, options.boundary_tol)
    if ppt.boundary:
        flags.append(FLAG_BOUNDARY)

    try:
        params, residual = fit_x_state(rho, options.noise_floor)
        accepted = True
    except ResidualAboveFloorError as exc:
        params, residual, accepted = exc.params, exc.residual, False
    fit = XFit(params, residual, accepted)

    margin = None
    concurrence = None
    decomposition = None
    reason = None
    if not accepted:
        flags.append(FLAG_FIT_REJECTED)
        reason = f"X-form fit rejected (residual {residual:.3e})"
    else:
        entangled, margin = entanglement.x_entanglement_condition(params)
        concurrence = concurrence_x(params)
        if entangled != (ppt.verdict is Verdict.ENTANGLED):
            fit_error = float(np.linalg.norm(rho.m - x_state_matrix(params)))
            band = options.boundary_tol + fit_error + 1e-12
            lowest_fit = x_min_pt_eigenvalue(params)
            if abs(lowest_fit) > band:
                raise InternalInconsistencyError(
                    f"{doc.input_id}: Peres verdict {ppt.verdict.value} but closed-form "
                    f"margin {margin:.3e} (fitted eigenvalue {lowest_fit:.3e}, band {band:.3e})"
                )
            flags.append(FLAG_WITHIN_NOISE)
        if not params.is_symmetric:
            flags.append(FLAG_ASYMMETRIC)
        try:
            d = separable_decomposition(params)
        except NotSymmetricError as exc:
            reason = str(exc)
        except NotSeparableByConstructionError as exc:
            reason = str(exc)
        else:
            if ppt.verdict is Verdict.ENTANGLED:
                reason = "Peres test reports entanglement"
            else:
                tol = max(DEFAULT_VERIFY_TOL, residual) + DEFAULT_VERIFY_TOL
                ok, err = verify_decomposition(d, rho, tol)
                decomposition = DecompositionResult(d, ok, err)
                if not ok:
                    flags.append(FLAG_UNVERIFIED)

    return VerdictReport(
        input_id=doc.input_id,
        ppt=ppt,
        x_fit=fit,
        condition_margin=margin,
        decomposition=decomposition,
        decomposition_reason=reason,
        concurrence=concurrence,
        flags=tuple(flags),
    )


def analyze_path(path, options: AnalysisOptions = AnalysisOptions()) -> VerdictReport:
    return analyze(parse_input_text(read_text(path), str(path)), options)


def analyze_batch(directory, options: AnalysisOptions = AnalysisOptions(), workers=None):
    """Analyze every ``*.json`` and ``*.csv`` file in ``directory`` concurrently.

    Returns ``(path, report_or_exception)`` pairs in sorted path order.
    """
    paths = sorted(
        p for p in Path(directory).iterdir() if p.suffix in (".json", ".csv") and p.is_file()
    )

    def run(p):
        try:
            return p, analyze_path(p, options)
        except Exception as exc:  # reported per file by the caller
            return p, exc

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, paths))


# -- serialization ---------------------------------------------------------

_NUMBER = {"type": "number"}
_VEC3 = {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3}

DECOMPOSITION_SCHEMA = {
    "type": "object",
    "required": ["terms", "verified", "max_error"],
    "additionalProperties": False,
    "properties": {
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["weight", "n_a", "n_b"],
                "additionalProperties": False,
                "properties": {"weight": {"type": "number", "minimum": 0}, "n_a": _VEC3, "n_b": _VEC3},
            },
        },
        "verified": {"type": "boolean"},
        "max_error": _NUMBER,
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "VerdictReport",
    "type": "object",
    "required": [
        "input_id",
        "verdict",
        "min_ppt_eigenvalue",
        "ppt_eigenvalues",
        "negativity",
        "concurrence",
        "x_fit",
        "condition_margin",
        "decomposition",
        "decomposition_reason",
        "flags",
    ],
    "additionalProperties": False,
    "properties": {
        "input_id": {"type": "string"},
        "verdict": {"enum": [v.value for v in Verdict]},
        "min_ppt_eigenvalue": _NUMBER,
        "ppt_eigenvalues": {"type": "array", "items": _NUMBER, "minItems": 4, "maxItems": 4},
        "negativity": {"type": "number", "minimum": 0},
        "concurrence": {"type": ["number", "null"], "minimum": 0},
        "x_fit": {
            "type": "object",
            "required": ["alpha", "beta", "beta_prime", "gamma", "alpha_prime", "residual", "accepted"],
            "additionalProperties": False,
            "properties": {
                "alpha": _NUMBER,
                "beta": _NUMBER,
                "beta_prime": _NUMBER,
                "gamma": _NUMBER,
                "alpha_prime": _NUMBER,
                "residual": {"type": "number", "minimum": 0},
                "accepted": {"type": "boolean"},
            },
        },
        "condition_margin": {"type": ["number", "null"]},
        "decomposition": {"oneOf": [{"type": "null"}, DECOMPOSITION_SCHEMA]},
        "decomposition_reason": {"type": ["string", "null"]},
        "flags": {"type": "array", "items": {"type": "string"}},
    },
}


def decomposition_to_dict(d: SeparableDecomposition) -> list[dict]:
    return [
        {"weight": t.weight, "n_a": list(t.n_a.as_tuple()), "n_b": list(t.n_b.as_tuple())}
        for t in d.terms
    ]


def decomposition_from_dict(terms: list[dict]) -> SeparableDecomposition:
    return SeparableDecomposition(
        tuple(
            DecompositionTerm(float(t["weight"]), BlochVector(*t["n_a"]), BlochVector(*t["n_b"]))
            for t in terms
        )
    )


def report_to_dict(r: VerdictReport) -> dict:
    p = r.x_fit.params
    decomposition = None
    if r.decomposition is not None:
        decomposition = {
            "terms": decomposition_to_dict(r.decomposition.decomposition),
            "verified": r.decomposition.verified,
            "max_error": r.decomposition.max_error,
        }
    return {
        "input_id": r.input_id,
        "verdict": r.ppt.verdict.value,
        "min_ppt_eigenvalue": r.ppt.min_eigenvalue,
        "ppt_eigenvalues": list(r.ppt.eigenvalues),
        "negativity": r.ppt.negativity,
        "concurrence": r.concurrence,
        "x_fit": {
            "alpha": p.alpha,
            "beta": p.beta,
            "beta_prime": p.beta_prime,
            "gamma": p.gamma,
            "alpha_prime": p.alpha_prime,
            "residual": r.x_fit.residual,
            "accepted": r.x_fit.accepted,
        },
        "condition_margin": r.condition_margin,
        "decomposition": decomposition,
        "decomposition_reason": r.decomposition_reason,
        "flags": list(r.flags),
    }


def report_from_dict(data: dict) -> VerdictReport:
    fit = data["x_fit"]
    params = XStateParams(
        fit["alpha"], fit["beta"], fit["beta_prime"], fit["gamma"], fit["alpha_prime"]
    )
    flags = tuple(data["flags"])
    ppt = PptReport(
        verdict=Verdict(data["verdict"]),
        min_eigenvalue=float(data["min_ppt_eigenvalue"]),
        negativity=float(data["negativity"]),
        eigenvalues=tuple(float(x) for x in data["ppt_eigenvalues"]),
        boundary=FLAG_BOUNDARY in flags,
    )
    decomposition = None
    if data["decomposition"] is not None:
        dd = data["decomposition"]
        decomposition = DecompositionResult(
            decomposition_from_dict(dd["terms"]), bool(dd["verified"]), float(dd["max_error"])
        )
    return VerdictReport(
        input_id=data["input_id"],
        ppt=ppt,
        x_fit=XFit(params, float(fit["residual"]), bool(fit["accepted"])),
        condition_margin=data["condition_margin"],
        decomposition=decomposition,
        decomposition_reason=data["decomposition_reason"],
        concurrence=data["concurrence"],
        flags=flags,
    )
