"""Quantum-state and projector-set domain objects.

Pure bipartite states are stored as their coefficient matrix c[alpha, beta]
over fixed orthonormal product bases, so the row alpha *is* the
(unnormalized) relative state of B attached to A-basis vector alpha.
Apparatus projector families act nontrivially only on A: each sector is a
subspace of H_A, lifted to the composite space as P_A (x) 1_B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    ProjectorSetError,
    StateError,
    ValidationError,
    Violation,
)
from .tensor_space import (
    BipartiteSpace,
    as_complex_matrix,
    dagger,
    frobenius,
    herm_tolerance,
    tensor_product,
    partial_trace_A,
)

# Invariant tolerances.
EPS_NORM = 1e-9           # state normalization
NORMALIZE_WINDOW = 1e-6   # constructor auto-normalization window
EPS_TRACE = 1e-9          # density operator trace
EPS_PSD = 1e-10           # density operator minimum eigenvalue
EPS_PROJ = 1e-9           # projector orthogonality / completeness
EPS_W = 1e-12             # sector occupation threshold


@dataclass(frozen=True)
class PureState:
    """Pure bipartite state given by its coefficient matrix (dimA x dimB)."""

    space: BipartiteSpace
    coefficients: np.ndarray

    def __post_init__(self):
        c = as_complex_matrix(self.coefficients, "coefficients")
        if c.shape != (self.space.dimA, self.space.dimB):
            raise StateError(
                f"coefficients have shape {c.shape}, expected "
                f"({self.space.dimA}, {self.space.dimB})")
        norm = float(np.linalg.norm(c))
        if abs(norm - 1.0) > EPS_NORM:
            raise StateError(f"state norm {norm} deviates from 1 beyond {EPS_NORM}")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    def vector(self) -> np.ndarray:
        """Amplitudes in the A-major composite basis."""
        return self.coefficients.reshape(-1)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, "density matrix")
        if m.shape != (self.dim, self.dim):
            raise StateError(f"matrix shape {m.shape} does not match dim {self.dim}")
        defect = frobenius(m - dagger(m))
        tol = herm_tolerance(self.dim)
        if defect > tol:
            raise StateError(f"not Hermitian: defect {defect:.3e} > {tol:.3e}")
        m = (m + dagger(m)) / 2.0
        tr = float(m.trace().real)
        if abs(tr - 1.0) > EPS_TRACE:
            raise StateError(f"trace {tr} deviates from 1 beyond {EPS_TRACE}")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -EPS_PSD:
            raise StateError(f"not positive semidefinite: min eigenvalue {min_eig:.3e}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, m) -> "DensityOperator":
        m = as_complex_matrix(m, "density matrix")
        return cls(dim=m.shape[0], matrix=m)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True)
class ProjectorSet:
    """Exhaustive orthonormal projector family: Pi Pj = delta_ij Pi, sum Pi = 1."""

    projectors: tuple
    labels: tuple

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def __len__(self) -> int:
        return len(self.projectors)

    def ranks(self) -> tuple:
        return tuple(int(round(float(p.trace().real))) for p in self.projectors)


@dataclass(frozen=True)
class ApparatusProjectorSet:
    """Projectors of the form P_A (x) 1_B, one per apparatus sector.

    ``sector_bases[i]`` holds the orthonormal A-vectors spanning sector i as
    the columns of a (dimA x d_i) matrix; ``lifted`` is the induced
    projector set on the composite space.
    """

    space: BipartiteSpace
    sector_bases: tuple
    projectors_A: tuple
    lifted: ProjectorSet
    sector_dims: tuple
    labels: tuple

    def __len__(self) -> int:
        return len(self.projectors_A)

    def sector_state_A(self, i: int) -> DensityOperator:
        """Maximally mixed A-state supported on sector i: P_A / d_A."""
        return DensityOperator.from_matrix(self.projectors_A[i] / self.sector_dims[i])


def make_pure(space: BipartiteSpace, coefficients) -> tuple[PureState, DensityOperator]:
    """Build a pure state and its rank-1 density operator.

    Coefficients whose norm deviates from 1 by at most NORMALIZE_WINDOW are
    rescaled; larger deviations (and zero vectors) are rejected.
    """
    c = as_complex_matrix(coefficients, "coefficients")
    if c.shape != (space.dimA, space.dimB):
        raise StateError(
            f"coefficients have shape {c.shape}, expected ({space.dimA}, {space.dimB})")
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        raise StateError("zero coefficient vector")
    if abs(norm - 1.0) > NORMALIZE_WINDOW:
        raise StateError(
            f"norm {norm} outside the auto-normalization window {NORMALIZE_WINDOW}")
    c = c / norm
    psi = PureState(space=space, coefficients=c)
    v = psi.vector()
    rho = DensityOperator.from_matrix(np.outer(v, v.conj()))
    return psi, rho


def relative_state(psi: PureState, alpha: int) -> tuple[np.ndarray, float]:
    """Unnormalized B-state paired with A-basis vector alpha, plus its norm^2.

    The vector is row alpha of the coefficient matrix; summing
    |alpha>_A (x) (row alpha) over alpha reassembles the full state, which
    is why the rows are returned unnormalized.
    """
    if not 0 <= alpha < psi.space.dimA:
        raise IndexError(f"A-basis index {alpha} out of range [0, {psi.space.dimA})")
    row = psi.coefficients[alpha].copy()
    return row, float(np.vdot(row, row).real)


def relative_expansion(psi: PureState) -> list[tuple[int, np.ndarray, float]]:
    """All occupied (alpha, relative vector, weight) triples.

    Rows with weight below EPS_W are omitted; the remaining weights sum
    to 1 and the triples reassemble the state exactly.
    """
    out = []
    for alpha in range(psi.space.dimA):
        vec, weight = relative_state(psi, alpha)
        if weight > EPS_W:
            out.append((alpha, vec, weight))
    return out


def _projector_violations(mats: list[np.ndarray]) -> list[Violation]:
    violations = []
    d = mats[0].shape[0]
    for i, p in enumerate(mats):
        defect = frobenius(p - dagger(p))
        if defect > EPS_PROJ:
            violations.append(Violation("hermiticity", defect, f"projector {i}", (i,)))
    for i, p in enumerate(mats):
        defect = frobenius(p @ p - p)
        if defect > EPS_PROJ:
            violations.append(Violation("idempotence", defect, f"projector {i}", (i,)))
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            defect = frobenius(dagger(mats[i]) @ mats[j])
            if defect > EPS_PROJ:
                violations.append(
                    Violation("orthogonality", defect, f"projectors {i}, {j}", (i, j)))
    total = sum(mats)
    defect = frobenius(total - np.eye(d))
    if defect > EPS_PROJ:
        violations.append(Violation("completeness", defect, "sum of projectors vs identity"))
    return violations


def validate_projector_set(candidates, labels=None) -> ProjectorSet:
    """Check a candidate family and return it as a ProjectorSet.

    Raises ProjectorSetError carrying one Violation per failed invariant
    (hermiticity, idempotence, pairwise orthogonality, completeness) with
    the numerical residual.
    """
    if not candidates:
        raise ProjectorSetError([Violation("nonempty", 1.0, "no projectors given")])
    mats = [as_complex_matrix(p, f"projector {i}") for i, p in enumerate(candidates)]
    d = mats[0].shape[0]
    for i, p in enumerate(mats):
        if p.shape != (d, d):
            raise DimensionMismatchError(
                f"projector {i} has shape {p.shape}, expected ({d}, {d})")
    violations = _projector_violations(mats)
    if violations:
        raise ProjectorSetError(violations)
    if labels is None:
        labels = tuple(range(len(mats)))
    frozen = []
    for p in mats:
        q = p.copy()
        q.flags.writeable = False
        frozen.append(q)
    return ProjectorSet(projectors=tuple(frozen), labels=tuple(labels))


def lift_apparatus_projectors(space: BipartiteSpace, sector_bases, labels=None) -> ApparatusProjectorSet:
    """Build apparatus projectors P_A (x) 1_B from per-sector A-vector groups.

    The union of the sector bases must be an orthonormal basis of H_A; the
    sector dimension d_A is the number of vectors in the group.
    """
    bases = []
    for i, group in enumerate(sector_bases):
        g = np.asarray(group, dtype=np.complex128)
        if g.ndim == 1:
            g = g.reshape(1, -1)
        # rows are vectors; store as columns
        if g.shape[1] != space.dimA:
            raise DimensionMismatchError(
                f"sector {i} vectors have length {g.shape[1]}, expected {space.dimA}")
        bases.append(g.T.copy())
    stacked = np.hstack(bases)
    if stacked.shape[1] != space.dimA:
        raise ValidationError(
            f"sector bases supply {stacked.shape[1]} vectors, expected dimA = {space.dimA}")
    gram_defect = frobenius(dagger(stacked) @ stacked - np.eye(space.dimA))
    if gram_defect > EPS_PROJ:
        raise ValidationError(
            f"union of sector bases is not orthonormal: residual {gram_defect:.3e}")

    projectors_A = []
    lifted = []
    dims = []
    eye_B = np.eye(space.dimB)
    for basis in bases:
        p_A = basis @ dagger(basis)
        projectors_A.append(p_A)
        lifted.append(tensor_product(space, p_A, eye_B))
        dims.append(basis.shape[1])
    if labels is None:
        labels = tuple(range(len(bases)))
    lifted_set = validate_projector_set(lifted, labels)
    for arr in projectors_A + bases:
        arr.flags.writeable = False
    return ApparatusProjectorSet(
        space=space,
        sector_bases=tuple(bases),
        projectors_A=tuple(projectors_A),
        lifted=lifted_set,
        sector_dims=tuple(dims),
        labels=tuple(labels),
    )


def sectors_from_indices(space: BipartiteSpace, index_groups, labels=None) -> ApparatusProjectorSet:
    """Apparatus set whose sectors group standard A-basis vectors by index."""
    eye = np.eye(space.dimA)
    groups = [[eye[k] for k in group] for group in index_groups]
    return lift_apparatus_projectors(space, groups, labels)


def conditional_state(
    rho: DensityOperator,
    apparatus: ApparatusProjectorSet,
    i: int,
) -> tuple[float, DensityOperator | None]:
    """Outcome probability w_i and the B-state conditioned on sector i.

    w_i = tr(rho P_i); the conditional state is the A-partial trace of
    P_i rho renormalized by w_i.  Sectors with w_i <= EPS_W are unoccupied
    and reported as (w_i, None).
    """
    space = apparatus.space
    if rho.dim != space.dim:
        raise DimensionMismatchError(
            f"state dim {rho.dim} does not match composite dim {space.dim}")
    p = apparatus.lifted.projectors[i]
    w = float(np.trace(rho.matrix @ p).real)
    if w <= EPS_W:
        return w, None
    reduced = partial_trace_A(space, p @ rho.matrix) / w
    return w, DensityOperator.from_matrix(reduced)
