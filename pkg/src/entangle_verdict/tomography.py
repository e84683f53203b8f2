"""Two-qubit polarization tomography from coincidence counts.

Each measurement setting projects photon one onto ``|a>`` and photon two
onto ``|b>`` for polarization letters ``a, b`` in H, V, D, A, R, L. The
density matrix is recovered by linear inversion in the Pauli-product
basis, then optionally clipped back to the physical state space.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg import PAULIS, hermitian_eigen, kron
from .states import DensityMatrix, validate_density

_S = 1 / math.sqrt(2)
KETS = {
    "H": np.array([1, 0], dtype=complex),
    "V": np.array([0, 1], dtype=complex),
    "D": np.array([_S, _S], dtype=complex),
    "A": np.array([_S, -_S], dtype=complex),
    "R": np.array([_S, 1j * _S], dtype=complex),
    "L": np.array([_S, -1j * _S], dtype=complex),
}
LABELS = tuple(KETS)
COMPLEMENT = {"H": "V", "V": "H", "D": "A", "A": "D", "R": "L", "L": "R"}

MAX_CONDITION = 1e12

# Hermitian operator basis sigma_i (x) sigma_j; tr(B_m B_n) = 4 delta_mn.
_OPERATOR_BASIS = tuple(kron(a, b) for a in PAULIS for b in PAULIS)


class TomographyError(ValueError):
    pass


class IncompleteSettingsError(TomographyError):
    def __init__(self, missing):
        self.missing = list(missing)
        names = ", ".join(f"({s.first},{s.second})" for s in self.missing)
        super().__init__(f"missing measurement settings: {names}")


class SingularSystemError(TomographyError):
    def __init__(self, condition: float):
        super().__init__(f"setting set is not informationally complete (condition {condition:.3e})")
        self.condition = condition


class ZeroCountsError(TomographyError):
    pass


class DuplicateSettingError(TomographyError):
    pass


@dataclass(frozen=True, order=True)
class MeasurementSetting:
    first: str
    second: str

    def __post_init__(self):
        for label in (self.first, self.second):
            if label not in KETS:
                raise ValueError(f"unknown polarization label {label!r}")

    def projector(self) -> np.ndarray:
        a, b = KETS[self.first], KETS[self.second]
        return kron(np.outer(a, a.conj()), np.outer(b, b.conj()))

    def __str__(self):
        return f"{self.first}{self.second}"


@dataclass(frozen=True)
class CoincidenceRecord:
    """Counts for one setting.

    Counts are integers when they come from a detector; real-valued counts
    are accepted so noiseless expectations can be fed through unchanged.
    """

    setting: MeasurementSetting
    count: float
    duration_tag: str | None = None

    def __post_init__(self):
        if not self.count >= 0:
            raise ValueError(f"count must be non-negative, got {self.count!r}")


def standard_settings_16() -> list[MeasurementSetting]:
    """{H, V, D, R} x {H, V, D, R}, first photon's letter varying slowest."""
    letters = ("H", "V", "D", "R")
    return [MeasurementSetting(a, b) for a, b in itertools.product(letters, letters)]


def predicted_probability(rho: DensityMatrix, s: MeasurementSetting) -> float:
    """Born-rule probability of a coincidence in setting ``s``, clamped to [0, 1]."""
    p = float(np.real(np.trace(np.asarray(rho) @ s.projector())))
    return min(1.0, max(0.0, p))


def _quadruple(s: MeasurementSetting) -> frozenset[MeasurementSetting]:
    a, b = s.first, s.second
    abar, bbar = COMPLEMENT[a], COMPLEMENT[b]
    return frozenset(
        MeasurementSetting(x, y) for x, y in ((a, b), (a, bbar), (abar, b), (abar, bbar))
    )


def count_probabilities(records: Sequence[CoincidenceRecord]) -> np.ndarray:
    """Convert counts to probability estimates, one per record.

    A setting whose complementary quadruple (both letters and their
    orthogonal partners) was measured is normalized by that quadruple's
    total, which cancels brightness drift between bases. Other settings use
    the mean over all complete quadruples, or the grand total when there
    are none.
    """
    counts = {r.setting: float(r.count) for r in records}
    total = sum(counts.values())
    if total <= 0:
        raise ZeroCountsError("all coincidence counts are zero")
    quad_totals = {}
    for s in counts:
        quad = _quadruple(s)
        if quad not in quad_totals and quad <= counts.keys():
            quad_totals[quad] = sum(counts[q] for q in quad)
    usable = [t for t in quad_totals.values() if t > 0]
    fallback = sum(usable) / len(usable) if usable else total
    out = []
    for r in records:
        norm = quad_totals.get(_quadruple(r.setting), 0.0)
        out.append(float(r.count) / (norm if norm > 0 else fallback))
    return np.array(out)


def design_matrix(settings: Iterable[MeasurementSetting]) -> np.ndarray:
    """Rows map Pauli coordinates ``x`` (with ``rho = sum x_j B_j / 4``) to probabilities."""
    rows = []
    for s in settings:
        proj = s.projector()
        rows.append([np.real(np.trace(b @ proj)) / 4 for b in _OPERATOR_BASIS])
    return np.array(rows)


def linear_reconstruct(
    records: Sequence[CoincidenceRecord],
    settings: Sequence[MeasurementSetting] | None = None,
) -> np.ndarray:
    """Linear-inversion estimate of the density matrix.

    ``settings`` lists the settings that must be present (the standard 16
    by default); additional records join a least-squares fit. The result is
    Hermitian with unit trace but may have negative eigenvalues.

    Raises
    ------
    IncompleteSettingsError, DuplicateSettingError, SingularSystemError, ZeroCountsError
    """
    records = list(records)
    seen = set()
    for r in records:
        if r.setting in seen:
            raise DuplicateSettingError(f"setting {r.setting} appears more than once")
        seen.add(r.setting)
    required = standard_settings_16() if settings is None else list(settings)
    missing = [s for s in required if s not in seen]
    if missing:
        raise IncompleteSettingsError(missing)

    a = design_matrix(r.setting for r in records)
    gram = a.T @ a
    cond = float(np.linalg.cond(gram))
    if not cond <= MAX_CONDITION:
        raise SingularSystemError(cond)
    probs = count_probabilities(records)
    x = np.linalg.solve(gram, a.T @ probs)
    trace = x[0]
    if not trace > 0:
        raise ZeroCountsError(f"reconstructed trace {trace:.3e} is not positive")
    rho = sum(xj * b for xj, b in zip(x, _OPERATOR_BASIS)) / 4 / trace
    return (rho + rho.conj().T) / 2


def project_to_physical(raw) -> DensityMatrix:
    """Clip negative eigenvalues to zero and rescale to unit trace.

    A matrix that is already positive semidefinite comes back as
    ``raw / tr(raw)``.
    """
    raw = np.asarray(raw, dtype=complex)
    eig = hermitian_eigen(raw)
    tr = float(np.sum(eig.values))
    if abs(tr - 1.0) > 0.1:
        raise ValueError(f"trace {tr:.4f} too far from 1 to project")
    if eig.values[0] >= 0:
        out = raw / float(np.trace(raw).real)
    else:
        vals = np.clip(eig.values, 0.0, None)
        vals = vals / vals.sum()
        out = (eig.vectors * vals) @ eig.vectors.conj().T
    return validate_density((out + out.conj().T) / 2)
