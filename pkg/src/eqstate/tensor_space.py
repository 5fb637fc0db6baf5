"""Dense complex linear algebra over a bipartite space H_A (x) H_B.

Index convention, used by every module in the package: the composite basis
is A-major, global index = alpha * dimB + beta.  This matches numpy's
``kron`` ordering, so ``tensor_product`` is a checked wrapper around it.

All operations are pure functions on immutable arrays; dimensions are kept
at desk scale (total dimension <= 64) and stored dense.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ValidationError

# Tolerances, scaled for double precision at dim <= 64.
EPS_HERM_FACTOR = 1e-10   # Hermiticity: |H - H^dag| <= factor * dim
EPS_ORTH = 1e-9           # eigenvector orthonormality
EPS_RECON_FACTOR = 1e-9   # spectral reconstruction, relative to |H|_F


@dataclass(frozen=True)
class BipartiteSpace:
    """Dimensions of a two-factor Hilbert space, A-major index convention."""

    dimA: int
    dimB: int

    def __post_init__(self):
        if self.dimA < 1 or self.dimB < 1:
            raise ValidationError(f"dimensions must be positive, got ({self.dimA}, {self.dimB})")

    @property
    def dim(self) -> int:
        return self.dimA * self.dimB

    def index(self, alpha: int, beta: int) -> int:
        """Global basis index of |alpha>_A |beta>_B."""
        return alpha * self.dimB + beta


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def frobenius(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermiticity_defect(m: np.ndarray) -> float:
    return frobenius(m - dagger(m))


def herm_tolerance(dim: int) -> float:
    return EPS_HERM_FACTOR * dim


def tensor_product(space: BipartiteSpace, x, y) -> np.ndarray:
    """Kronecker product of an A-operator and a B-operator, A-major.

    The result satisfies (x (x) y)[alpha*dimB+beta, alpha'*dimB+beta'] =
    x[alpha, alpha'] * y[beta, beta'].
    """
    x = as_complex_matrix(x, "A operator")
    y = as_complex_matrix(y, "B operator")
    if x.shape != (space.dimA, space.dimA):
        raise DimensionMismatchError(
            f"A operator has shape {x.shape}, expected ({space.dimA}, {space.dimA})")
    if y.shape != (space.dimB, space.dimB):
        raise DimensionMismatchError(
            f"B operator has shape {y.shape}, expected ({space.dimB}, {space.dimB})")
    return np.kron(x, y)


def partial_trace_A(space: BipartiteSpace, m) -> np.ndarray:
    """Trace out the A factor: result[beta, beta'] = sum_alpha m[ab, ab'].

    Linear and trace-preserving; for a product operator X (x) Y it returns
    tr(X) * Y.
    """
    m = as_complex_matrix(m)
    d = space.dim
    if m.shape != (d, d):
        raise DimensionMismatchError(f"operator has shape {m.shape}, expected ({d}, {d})")
    blocks = m.reshape(space.dimA, space.dimB, space.dimA, space.dimB)
    return np.einsum("abad->bd", blocks)


def spectral_decompose(h, herm_tol: float | None = None) -> list[tuple[float, np.ndarray]]:
    """Eigen-decompose a Hermitian matrix, eigenvalues sorted descending.

    Returns a list of (eigenvalue, unit eigenvector) pairs.  The input must
    be Hermitian within ``herm_tol`` (default EPS_HERM_FACTOR * dim); the
    symmetrized matrix is decomposed so the reconstruction error stays at
    the level of the Hermiticity defect.
    """
    h = as_complex_matrix(h, "Hermitian operator")
    n = h.shape[0]
    if h.shape[1] != n:
        raise DimensionMismatchError(f"expected a square matrix, got shape {h.shape}")
    tol = herm_tolerance(n) if herm_tol is None else herm_tol
    defect = hermiticity_defect(h)
    if defect > tol:
        raise ValidationError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")
    vals, vecs = np.linalg.eigh((h + dagger(h)) / 2.0)
    order = np.argsort(vals)[::-1]
    return [(float(vals[i]), vecs[:, i].copy()) for i in order]
