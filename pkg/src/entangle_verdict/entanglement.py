"""Partial transpose, the PPT verdict, and separable decompositions of X states.

For two qubits a state is entangled exactly when its partial transpose has
a negative eigenvalue, so :func:`ppt_verdict` is definitive. For the X
family that eigenvalue lives in the HV/VH block ``[[beta, gamma],
[gamma, beta_prime]]``, which gives the closed form in
:func:`x_entanglement_condition`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .linalg import hermitian_eigen, kron, max_entry_distance
from .states import (
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    BlochVector,
    DensityMatrix,
    XStateParams,
    bloch_state,
)

DEFAULT_BOUNDARY_TOL = 1e-9
DEFAULT_VERIFY_TOL = 1e-12


class Subsystem(enum.Enum):
    FIRST = "first"
    SECOND = "second"


class Verdict(str, enum.Enum):
    ENTANGLED = "Entangled"
    SEPARABLE = "Separable"


class NotSymmetricError(ValueError):
    def __init__(self, asymmetry: float):
        super().__init__(
            f"decomposition needs alpha == alpha' and beta == beta' (asymmetry {asymmetry:.3e})"
        )
        self.asymmetry = asymmetry


class NotSeparableByConstructionError(ValueError):
    """A weight of the eight-term decomposition would be negative.

    This alone does not prove entanglement unless the failing weight is
    ``beta - gamma``.
    """

    def __init__(self, weight_name: str, value: float):
        super().__init__(f"weight {weight_name} negative ({value:.6g})")
        self.weight_name = weight_name
        self.value = value


@dataclass(frozen=True)
class PptReport:
    verdict: Verdict
    min_eigenvalue: float
    negativity: float
    eigenvalues: tuple[float, ...]
    boundary: bool = False


@dataclass(frozen=True)
class DecompositionTerm:
    weight: float
    n_a: BlochVector
    n_b: BlochVector


@dataclass(frozen=True)
class SeparableDecomposition:
    """Convex mixture ``sum_k w_k rho(n_a) (x) rho(n_b)`` of product states."""

    terms: tuple[DecompositionTerm, ...]

    @property
    def weights(self) -> list[float]:
        return [t.weight for t in self.terms]

    def matrix(self) -> np.ndarray:
        out = np.zeros((4, 4), dtype=complex)
        for t in self.terms:
            out += t.weight * kron(bloch_state(t.n_a), bloch_state(t.n_b))
        return out


def partial_transpose(rho, subsystem: Subsystem = Subsystem.SECOND) -> np.ndarray:
    """Transpose one tensor factor of a two-qubit operator.

    With rows ``(i, j)`` and columns ``(k, l)``, ``SECOND`` swaps ``j`` and
    ``l``; ``FIRST`` swaps ``i`` and ``k``.
    """
    a = np.asarray(rho, dtype=complex)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 operator, got shape {a.shape}")
    t = a.reshape(2, 2, 2, 2)
    if subsystem is Subsystem.SECOND:
        t = t.transpose(0, 3, 2, 1)
    elif subsystem is Subsystem.FIRST:
        t = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError(f"unknown subsystem {subsystem!r}")
    return np.ascontiguousarray(t.reshape(4, 4))


def ppt_verdict(
    rho: DensityMatrix,
    boundary_tol: float = DEFAULT_BOUNDARY_TOL,
    subsystem: Subsystem = Subsystem.SECOND,
) -> PptReport:
    """Peres test: entangled iff the partial transpose has an eigenvalue below ``-boundary_tol``.

    States whose smallest eigenvalue lies within ``boundary_tol`` of zero are
    called separable and marked ``boundary``.
    """
    if boundary_tol < 0:
        raise ValueError("boundary_tol must be non-negative")
    eig = hermitian_eigen(partial_transpose(rho, subsystem)).values
    lowest = float(eig[0])
    verdict = Verdict.ENTANGLED if lowest < -boundary_tol else Verdict.SEPARABLE
    return PptReport(
        verdict=verdict,
        min_eigenvalue=lowest,
        negativity=_negativity_of(eig),
        eigenvalues=tuple(float(x) for x in eig),
        boundary=abs(lowest) <= boundary_tol,
    )


def _negativity_of(eigenvalues) -> float:
    return float(sum(max(0.0, -float(x)) for x in eigenvalues))


def negativity(rho: DensityMatrix) -> float:
    """Sum of the magnitudes of the negative partial-transpose eigenvalues."""
    return _negativity_of(hermitian_eigen(partial_transpose(rho)).values)


def x_entanglement_condition(p: XStateParams) -> tuple[bool, float]:
    """Closed-form entanglement test for the X family.

    Returns ``(entangled, margin)`` with ``margin = gamma - sqrt(beta * beta')``.
    With ``beta == beta'`` this is simply ``gamma > beta``.
    """
    margin = p.gamma - math.sqrt(max(0.0, p.beta * p.beta_prime))
    return margin > 0, margin


def x_min_pt_eigenvalue(p: XStateParams) -> float:
    """Smallest partial-transpose eigenvalue of an X state, in closed form."""
    mean = (p.beta + p.beta_prime) / 2
    half_gap = (p.beta - p.beta_prime) / 2
    block_low = mean - math.hypot(half_gap, p.gamma)
    return min(p.alpha, p.alpha_prime, block_low)


def concurrence_x(p: XStateParams) -> float:
    return 2.0 * max(0.0, p.gamma - math.sqrt(max(0.0, p.beta * p.beta_prime)))


def separable_decomposition(p: XStateParams) -> SeparableDecomposition:
    """Eight-term product-state decomposition of a symmetric X state.

    Weights, in order: ``alpha - gamma`` on (z, z) and (-z, -z);
    ``beta - gamma`` on (z, -z) and (-z, z); ``gamma`` on (x, x), (-x, -x),
    (-y, y) and (y, -y). Zero weights are kept so the layout is fixed.

    Raises
    ------
    NotSymmetricError
        If ``alpha != alpha'`` or ``beta != beta'`` beyond ``1e-9``.
    NotSeparableByConstructionError
        If ``gamma`` exceeds ``alpha`` or ``beta``.
    """
    if not p.is_symmetric:
        raise NotSymmetricError(p.asymmetry)
    alpha = (p.alpha + p.alpha_prime) / 2
    beta = (p.beta + p.beta_prime) / 2
    gamma = p.gamma
    w_alpha = alpha - gamma
    w_beta = beta - gamma
    if w_beta < 0:
        raise NotSeparableByConstructionError("beta-gamma", w_beta)
    if w_alpha < 0:
        raise NotSeparableByConstructionError("alpha-gamma", w_alpha)
    z, x, y = Z_AXIS, X_AXIS, Y_AXIS
    terms = (
        DecompositionTerm(w_alpha, z, z),
        DecompositionTerm(w_alpha, -z, -z),
        DecompositionTerm(w_beta, z, -z),
        DecompositionTerm(w_beta, -z, z),
        DecompositionTerm(gamma, x, x),
        DecompositionTerm(gamma, -x, -x),
        DecompositionTerm(gamma, -y, y),
        DecompositionTerm(gamma, y, -y),
    )
    return SeparableDecomposition(terms)


def verify_decomposition(
    d: SeparableDecomposition, rho, tol: float = DEFAULT_VERIFY_TOL
) -> tuple[bool, float]:
    """Rebuild the mixture and compare it entrywise with ``rho``.

    ``ok`` also requires non-negative weights summing to one within ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    max_error = max_entry_distance(d.matrix(), np.asarray(rho, dtype=complex))
    weights = d.weights
    ok = max_error <= tol and min(weights) >= 0 and abs(sum(weights) - 1.0) <= tol
    return ok, max_error
