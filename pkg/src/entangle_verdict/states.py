"""Validated two-qubit density matrices, the X-form family, and Bloch states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    IDENTITY2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    as_matrix,
    hermitian_deviation,
    hermitian_eigen,
)

DENSITY_TOL = 1e-9
PARAM_TOL = 1e-9
BLOCH_NORM_TOL = 1e-12
DEFAULT_NOISE_FLOOR = 0.01

# Off-diagonal positions that vanish in the X-form (everything except the
# HH/VV coherence).
_STRUCTURAL_ZEROS = tuple(
    (i, j) for i in range(4) for j in range(4) if i != j and {i, j} != {0, 3}
)


class InvalidStateError(ValueError):
    """A matrix failed density-matrix validation.

    ``violation`` is the measured size of the failure (the amount by which
    the invariant is broken).
    """

    kind = "invalid-state"

    def __init__(self, message: str, violation: float):
        super().__init__(message)
        self.violation = violation


class NotHermitianError(InvalidStateError):
    kind = "not-hermitian"


class BadTraceError(InvalidStateError):
    kind = "bad-trace"


class NotPSDError(InvalidStateError):
    kind = "not-psd"


class ResidualAboveFloorError(ValueError):
    """The matrix is not of X form at the requested noise floor.

    The fitted parameters are still attached so callers can report them.
    """

    def __init__(self, residual: float, noise_floor: float, params: "XStateParams"):
        super().__init__(
            f"X-form residual {residual:.3e} exceeds noise floor {noise_floor:.3e}"
        )
        self.residual = residual
        self.noise_floor = noise_floor
        self.params = params


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A 4x4 two-qubit state that passed :func:`validate_density`.

    The stored array is Hermitized and read-only.
    """

    m: np.ndarray

    def __post_init__(self):
        a = np.array(self.m, dtype=complex)
        a.setflags(write=False)
        object.__setattr__(self, "m", a)

    def __array__(self, dtype=None, copy=None):
        return self.m if dtype is None else self.m.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    __hash__ = None


@dataclass(frozen=True)
class XStateParams:
    """Real parameters of the X-form state

        [[alpha, 0,    0,          gamma      ],
         [0,     beta, 0,          0          ],
         [0,     0,    beta_prime, 0          ],
         [gamma, 0,    0,          alpha_prime]]

    in the basis HH, HV, VH, VV.
    """

    alpha: float
    beta: float
    beta_prime: float
    gamma: float
    alpha_prime: float

    def __post_init__(self):
        for name in ("alpha", "beta", "beta_prime", "gamma", "alpha_prime"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} is not finite")
            object.__setattr__(self, name, value)
        diag = (self.alpha, self.beta, self.beta_prime, self.alpha_prime)
        if min(diag) < -PARAM_TOL:
            raise ValueError(f"negative population {min(diag):.3e}")
        total = sum(diag)
        if abs(total - 1.0) > PARAM_TOL:
            raise ValueError(f"populations sum to {total!r}, not 1")
        # The coherence phase is removed on fitting, so gamma is a modulus.
        if self.gamma < -PARAM_TOL:
            raise ValueError(f"gamma must be non-negative, got {self.gamma!r}")
        excess = self.gamma**2 - self.alpha * self.alpha_prime
        if excess > PARAM_TOL:
            raise ValueError(
                f"gamma^2 exceeds alpha*alpha_prime by {excess:.3e}; matrix not PSD"
            )

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.alpha, self.beta, self.beta_prime, self.gamma, self.alpha_prime)

    @property
    def is_symmetric(self) -> bool:
        return self.asymmetry <= PARAM_TOL

    @property
    def asymmetry(self) -> float:
        return max(abs(self.alpha - self.alpha_prime), abs(self.beta - self.beta_prime))


@dataclass(frozen=True)
class BlochVector:
    nx: float
    ny: float
    nz: float

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        norm = math.sqrt(self.nx**2 + self.ny**2 + self.nz**2)
        if not abs(norm - 1.0) <= BLOCH_NORM_TOL:
            raise ValueError(f"Bloch vector has norm {norm!r}, expected 1")

    def __neg__(self) -> "BlochVector":
        # + 0.0 turns -0.0 into 0.0
        return BlochVector(-self.nx + 0.0, -self.ny + 0.0, -self.nz + 0.0)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.nx, self.ny, self.nz)


X_AXIS = BlochVector(1.0, 0.0, 0.0)
Y_AXIS = BlochVector(0.0, 1.0, 0.0)
Z_AXIS = BlochVector(0.0, 0.0, 1.0)


def validate_density(m, tol: float = DENSITY_TOL) -> DensityMatrix:
    """Check that ``m`` is a physical two-qubit state and wrap it.

    Raises the first failing check as :class:`NotHermitianError`,
    :class:`BadTraceError` or :class:`NotPSDError`, each carrying the size of
    the violation.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = as_matrix(m, dims=(4,))
    dev = hermitian_deviation(a)
    if dev > tol:
        raise NotHermitianError(f"matrix is not Hermitian (deviation {dev:.3e})", dev)
    a = (a + a.conj().T) / 2
    trace_err = abs(float(np.trace(a).real) - 1.0)
    if trace_err > tol:
        raise BadTraceError(f"trace differs from 1 by {trace_err:.3e}", trace_err)
    lowest = float(hermitian_eigen(a).values[0])
    if lowest < -tol:
        raise NotPSDError(f"minimum eigenvalue {lowest:.3e} is negative", -lowest)
    return DensityMatrix(a)


def x_state_matrix(p: XStateParams) -> np.ndarray:
    m = np.diag(
        np.array([p.alpha, p.beta, p.beta_prime, p.alpha_prime], dtype=complex)
    )
    m[0, 3] = m[3, 0] = p.gamma
    return m


def x_state_to_density(p: XStateParams) -> DensityMatrix:
    """The X-form matrix for ``p`` (populations on the diagonal, gamma on the HH/VV corners)."""
    if not isinstance(p, XStateParams):
        raise TypeError("expected XStateParams")
    return validate_density(x_state_matrix(p))


def x_form_residual(rho) -> float:
    """Largest entry outside the X pattern, including Im of the HH/VV coherence."""
    a = np.asarray(rho, dtype=complex)
    worst = max(abs(a[i, j]) for i, j in _STRUCTURAL_ZEROS)
    return float(max(worst, abs(a[0, 3].imag)))


def fit_x_state(
    rho: DensityMatrix, noise_floor: float = DEFAULT_NOISE_FLOOR
) -> tuple[XStateParams, float]:
    """Read X-form parameters off a density matrix.

    Populations come from the diagonal and ``gamma`` from ``|rho[0, 3]|``;
    everything is scaled so the populations sum to exactly one. The residual
    is the largest modulus among the structurally-zero entries and the
    imaginary part of ``rho[0, 3]``.

    Raises
    ------
    ResidualAboveFloorError
        If the residual exceeds ``noise_floor``.
    """
    if noise_floor < 0:
        raise ValueError("noise_floor must be non-negative")
    a = np.asarray(rho, dtype=complex)
    diag = np.real(np.diag(a))
    total = float(np.sum(diag))
    scale = 1.0 / total
    alpha, beta, beta_prime, alpha_prime = (float(d) * scale for d in diag)
    gamma = float(abs(a[0, 3])) * scale
    params = XStateParams(alpha, beta, beta_prime, gamma, alpha_prime)
    residual = x_form_residual(a)
    if residual > noise_floor:
        raise ResidualAboveFloorError(residual, noise_floor, params)
    return params, residual


def bloch_state(n: BlochVector) -> np.ndarray:
    """Pure qubit state ``(I + n.sigma) / 2``."""
    if not isinstance(n, BlochVector):
        n = BlochVector(*n)
    return (IDENTITY2 + n.nx * SIGMA_X + n.ny * SIGMA_Y + n.nz * SIGMA_Z) / 2
