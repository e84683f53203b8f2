"""Small dense complex linear algebra for qubit and two-qubit operators.

Matrices are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4).
The eigensolver is a cyclic complex Jacobi iteration written for these
sizes; it has no dependency on LAPACK.

Basis convention for two-qubit operators: index ``2*i + j`` labels the
product ket ``|i>|j>``, so 0, 1, 2, 3 are HH, HV, VH, VV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ALLOWED_DIMS = (2, 4)

HERMITIAN_TOL = 1e-9
OFF_DIAGONAL_TOL = 1e-14
MAX_SWEEPS = 100

IDENTITY2 = np.eye(2, dtype=complex)
IDENTITY4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (IDENTITY2, IDENTITY4, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)


class NumericalFailure(ArithmeticError):
    """Raised when an iterative routine exhausts its iteration budget."""


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Spectral decomposition of a Hermitian matrix.

    ``values`` are ascending; column ``k`` of ``vectors`` is the
    normalized eigenvector belonging to ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(m, dims=ALLOWED_DIMS) -> np.ndarray:
    """Coerce ``m`` to a complex square array and check its size and entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] not in dims:
        raise ValueError(f"matrix dimension {a.shape[0]} not in {dims}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product of two single-qubit operators.

    Entry ``(2i + j, 2k + l)`` of the result is ``a[i, k] * b[j, l]``; the
    first factor is the first photon.
    """
    a = as_matrix(a, dims=(2,))
    b = as_matrix(b, dims=(2,))
    return np.kron(a, b)


def hermitian_deviation(m) -> float:
    """Max-norm of the anti-Hermitian part ``(m - m^dagger) / 2``."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)) / 2)


def hermitian_eigen(m, tol: float = HERMITIAN_TOL) -> EigenResult:
    """Eigendecomposition of a Hermitian 2x2 or 4x4 matrix.

    Cyclic Jacobi: every sweep visits each upper off-diagonal pair once
    and annihilates it with a complex plane rotation. Iteration stops when
    the off-diagonal Frobenius mass drops below ``1e-14`` times the matrix
    scale (``max(1, ||m||_F)``).

    Raises
    ------
    ValueError
        If ``m`` is not Hermitian within ``tol``.
    NumericalFailure
        If convergence is not reached within 100 sweeps.
    """
    m = as_matrix(m)
    dev = hermitian_deviation(m)
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e})")
    n = m.shape[0]
    herm = (m + m.conj().T) / 2
    # Pure-Python lists are markedly faster than numpy slicing at n <= 4.
    a = [[complex(herm[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        a[i][i] = complex(a[i][i].real, 0.0)
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]

    scale = max(1.0, float(np.linalg.norm(herm)))
    threshold = OFF_DIAGONAL_TOL * scale
    sweeps = 0
    while True:
        off = math.sqrt(
            sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j)
        )
        if off < threshold:
            break
        if sweeps >= MAX_SWEEPS:
            raise NumericalFailure(
                f"Jacobi did not converge in {MAX_SWEEPS} sweeps (off-diagonal {off:.3e})"
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q, n)

    values = np.array([a[i][i].real for i in range(n)])
    vectors = np.array(v, dtype=complex)
    order = np.argsort(values, kind="stable")
    return EigenResult(values[order], vectors[:, order], sweeps)


def _rotate(a, v, p, q, n):
    apq = a[p][q]
    r = abs(apq)
    if r == 0.0:
        return
    # Phase e^{-i phi} on column q makes the (p, q) entry real and positive,
    # then a real Jacobi rotation finishes the job.
    phase = apq / r
    app = a[p][p].real
    aqq = a[q][q].real
    theta = (aqq - app) / (2.0 * r)
    if math.isinf(theta * theta):
        t = 1.0 / (2.0 * theta)
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # U restricted to the (p, q) plane:
    #   [[c,            s          ],
    #    [-s e^{-i phi}, c e^{-i phi}]]
    cph = phase.conjugate()
    u_pp, u_pq = c, s
    u_qp, u_qq = -s * cph, c * cph

    # A <- A U (columns p, q)
    for i in range(n):
        aip, aiq = a[i][p], a[i][q]
        a[i][p] = aip * u_pp + aiq * u_qp
        a[i][q] = aip * u_pq + aiq * u_qq
    # A <- U^dagger A (rows p, q)
    for j in range(n):
        apj, aqj = a[p][j], a[q][j]
        a[p][j] = u_pp.conjugate() * apj + u_qp.conjugate() * aqj
        a[q][j] = u_pq.conjugate() * apj + u_qq.conjugate() * aqj
    a[p][q] = 0j
    a[q][p] = 0j
    a[p][p] = complex(app - t * r, 0.0)
    a[q][q] = complex(aqq + t * r, 0.0)
    for i in range(n):
        vip, viq = v[i][p], v[i][q]
        v[i][p] = vip * u_pp + viq * u_qp
        v[i][q] = vip * u_pq + viq * u_qq


def max_entry_distance(a, b) -> float:
    """Largest complex modulus of ``a - b`` over all entries."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a - b)))


def trace_distance(a, b) -> float:
    """Half the sum of absolute eigenvalues of ``a - b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    eig = hermitian_eigen(a - b)
    return float(0.5 * np.sum(np.abs(eig.values)))
