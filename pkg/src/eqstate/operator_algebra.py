"""Finite-dimensional *-algebra machinery: commutants, centers, sectors.

Algebras are represented as linear subspaces of d x d complex matrices with
an orthonormal basis in the Hilbert-Schmidt inner product <X, Y> =
tr(X^dag Y), stored as a (k, d, d) array.  Row-major vectorization maps
matrix equations to linear systems: vec(A X B) = (A kron B^T) vec(X).

Two commutant routes are provided.  ``commutant`` solves the stacked null
space of the commutator maps X -> X A - A X by SVD, which works for any
generator list.  ``algebra_commutant`` exploits that for a *-algebra with
orthonormal basis {B_r} the map X -> sum_r B_r X B_r^dag has range exactly
equal to the commutant, so a handful of generic samples span it at a tiny
fraction of the SVD cost.  The two routes are cross-checked in the test
suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AlgebraError, DimensionMismatchError
from .states import ProjectorSet, validate_projector_set
from .tensor_space import as_complex_matrix, dagger, frobenius, spectral_decompose

MAX_ALGEBRA_DIM = 16        # null spaces are d^2 x d^2; keep memory in the MB range
NULLSPACE_RTOL = 1e-9       # singular values <= rtol * largest count as zero
MEMBERSHIP_RTOL = 1e-9      # span membership, relative to the operator norm
DUALITY_TOL = 1e-9
SECTOR_GROUP_TOL = 1e-8     # eigenvalue grouping for sector extraction
SECTOR_MEMBER_TOL = 1e-8
SECTOR_RETRIES = 3


@dataclass(frozen=True)
class OperatorAlgebra:
    """A *-closed operator subspace with Hilbert-Schmidt orthonormal basis."""

    dim: int
    basis: np.ndarray  # (k, dim, dim), rows orthonormal under tr(X^dag Y)
    contains_identity: bool

    @property
    def linear_dimension(self) -> int:
        return self.basis.shape[0]

    def vecs(self) -> np.ndarray:
        """Basis flattened to orthonormal rows of length dim^2."""
        return self.basis.reshape(self.linear_dimension, -1)

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of a matrix onto the algebra's span."""
        v = self.vecs()
        coeffs = v.conj() @ x.reshape(-1)
        return (v.T @ coeffs).reshape(self.dim, self.dim)

    def verify(self, seed: int = 0, max_pairs: int = 512) -> dict:
        """Residuals of the algebra invariants, for diagnostic use.

        Product closure is checked on all basis pairs up to ``max_pairs``,
        then on a seeded random subset.
        """
        adjoint = 0.0
        for b in self.basis:
            adjoint = max(adjoint, frobenius(dagger(b) - self.project(dagger(b))))
        k = self.linear_dimension
        pairs = [(i, j) for i in range(k) for j in range(k)]
        if len(pairs) > max_pairs:
            rng = np.random.default_rng(seed)
            idx = rng.choice(len(pairs), size=max_pairs, replace=False)
            pairs = [pairs[int(t)] for t in idx]
        product = 0.0
        for i, j in pairs:
            prod = self.basis[i] @ self.basis[j]
            product = max(product, frobenius(prod - self.project(prod)))
        identity = frobenius(np.eye(self.dim) - self.project(np.eye(self.dim)))
        return {"adjoint": adjoint, "product": product, "identity": identity}


class ContainmentCheck(NamedTuple):
    contained: bool
    residual: float


@dataclass(frozen=True)
class SuperselectionOperator:
    """Operator of the form sum_i lambda_i P_i over a fixed sector set."""

    eigenvalues: tuple
    sectors: ProjectorSet

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.sectors.dim, self.sectors.dim), dtype=np.complex128)
        for lam, p in zip(self.eigenvalues, self.sectors.projectors):
            out += lam * p
        return out


def _check_dim(d: int):
    if d > MAX_ALGEBRA_DIM:
        raise AlgebraError(
            f"algebra operations are capped at dimension {MAX_ALGEBRA_DIM}, got {d}")


def _algebra_from_vecs(vecs: np.ndarray, d: int) -> OperatorAlgebra:
    basis = vecs.reshape(-1, d, d).copy()
    eye = np.eye(d)
    coeffs = vecs.conj() @ eye.reshape(-1)
    identity_residual = frobenius(eye.reshape(-1) - vecs.T @ coeffs)
    basis.flags.writeable = False
    return OperatorAlgebra(dim=d, basis=basis, contains_identity=identity_residual <= 1e-8)


def _nullspace_rows(m: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the right null space of m."""
    if m.size == 0 or not np.any(m):
        return np.eye(m.shape[1], dtype=np.complex128)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    tol = NULLSPACE_RTOL * s[0]
    rows = [vh[i].conj() for i in range(vh.shape[0]) if i >= len(s) or s[i] <= tol]
    if not rows:
        return np.zeros((0, m.shape[1]), dtype=np.complex128)
    return np.vstack(rows)


def commutant(generators) -> OperatorAlgebra:
    """All operators commuting with every generator (and their adjoints).

    The generator list is closed under adjoints first so the result is a
    *-algebra; for self-adjoint generator families this changes nothing.
    Solved as the joint null space of the maps X -> X A - A X, vectorized
    row-major and stacked, with singular values below NULLSPACE_RTOL times
    the largest treated as zero.
    """
    gens = [as_complex_matrix(g, f"generator {i}") for i, g in enumerate(generators)]
    if not gens:
        raise AlgebraError("commutant of an empty generator list is undefined")
    d = gens[0].shape[0]
    _check_dim(d)
    for i, g in enumerate(gens):
        if g.shape != (d, d):
            raise DimensionMismatchError(
                f"generator {i} has shape {g.shape}, expected ({d}, {d})")
    augmented = list(gens)
    for g in gens:
        if frobenius(g - dagger(g)) > 1e-14 * max(1.0, frobenius(g)):
            augmented.append(dagger(g))
    eye = np.eye(d)
    blocks = [np.kron(eye, a.T) - np.kron(a, eye) for a in augmented]
    vecs = _nullspace_rows(np.vstack(blocks))
    return _algebra_from_vecs(vecs, d)


def _basis_average(basis: np.ndarray, x: np.ndarray) -> np.ndarray:
    """sum_r B_r x B_r^dag, the conditional-expectation-like range map."""
    t = basis @ x
    return np.einsum("rij,rkj->ik", t, basis.conj())


def algebra_commutant(algebra: OperatorAlgebra, seed: int = 0) -> OperatorAlgebra:
    """Commutant of a validated *-algebra via the range of its averaging map.

    For an orthonormal basis {B_r} of a *-algebra containing the identity,
    Phi(X) = sum_r B_r X B_r^dag is basis-independent and unitarily
    invariant under the algebra, so its range equals the commutant; generic
    samples of the range are accumulated until the rank saturates.
    """
    if not algebra.contains_identity:
        raise AlgebraError("averaging-map commutant requires the identity in the algebra")
    d = algebra.dim
    rng = np.random.default_rng(seed)
    samples: list[np.ndarray] = []
    batch = 8
    while True:
        for _ in range(batch):
            x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            samples.append(_basis_average(algebra.basis, x).reshape(-1))
        stack = np.vstack(samples)
        _, s, vh = np.linalg.svd(stack, full_matrices=False)
        rank = int(np.sum(s > NULLSPACE_RTOL * s[0]))
        if rank <= len(samples) - 3 or len(samples) >= d * d + 8:
            vecs = vh[:rank].copy()
            break
        batch = len(samples)  # double
    result = _algebra_from_vecs(vecs, d)
    # Insurance against an under-sampled range: every element must commute
    # with a generic element of the algebra.
    g_coeffs = rng.standard_normal(algebra.linear_dimension) + 1j * rng.standard_normal(
        algebra.linear_dimension)
    generic = np.tensordot(g_coeffs, algebra.basis, axes=(0, 0))
    scale = max(frobenius(generic), 1e-30)
    worst = max(frobenius(b @ generic - generic @ b) / scale for b in result.basis)
    if worst > 1e-8:
        raise AlgebraError(f"commutant sampling failed consistency check ({worst:.3e})")
    return result


def generated_algebra(projset: ProjectorSet) -> OperatorAlgebra:
    """The observable algebra fixed by an exhaustive orthonormal projector set.

    This is the block algebra of operators supported within single sectors,
    i.e. the commutant of the projector family, built directly from each
    sector's eigenbasis; its linear dimension is sum_i (tr P_i)^2.
    """
    d = projset.dim
    _check_dim(d)
    units = []
    for p in projset.projectors:
        pairs = spectral_decompose(p)
        cols = [v for val, v in pairs if val > 0.5]
        for u in cols:
            for w in cols:
                units.append(np.outer(u, w.conj()).reshape(-1))
    vecs = np.vstack(units)
    return _algebra_from_vecs(vecs, d)


def bicommutant(generators, seed: int = 0) -> OperatorAlgebra:
    """Commutant of the commutant; the algebra generated by the input set."""
    inner = commutant(generators)
    return algebra_commutant(inner, seed=seed)


def span_containment_residual(inner: OperatorAlgebra, outer: OperatorAlgebra) -> float:
    """Largest distance from a basis element of ``inner`` to ``outer``'s span."""
    worst = 0.0
    for b in inner.basis:
        worst = max(worst, frobenius(b - outer.project(b)))
    return worst


def span_equality_residual(a: OperatorAlgebra, b: OperatorAlgebra) -> float:
    return max(span_containment_residual(a, b), span_containment_residual(b, a))


def _intersect_spans(a: OperatorAlgebra, b: OperatorAlgebra) -> OperatorAlgebra:
    """Orthonormal basis of span(a) intersect span(b)."""
    u = a.vecs()
    w = b.vecs()
    proj_w = w.T @ w.conj()
    m = u.T - proj_w @ u.T
    coeff_rows = _nullspace_rows(m)
    if coeff_rows.shape[0] == 0:
        return _algebra_from_vecs(np.zeros((0, a.dim * a.dim), dtype=np.complex128), a.dim)
    vecs = coeff_rows @ u  # each row: sum_r c_r * u_r
    return _algebra_from_vecs(vecs, a.dim)


def center(algebra: OperatorAlgebra, seed: int = 0) -> OperatorAlgebra:
    """The abelian subalgebra of elements commuting with the whole algebra."""
    aprime = algebra_commutant(algebra, seed=seed)
    return _intersect_spans(algebra, aprime)


def contains(algebra: OperatorAlgebra, x) -> ContainmentCheck:
    """Span membership test with the distance to the span as residual."""
    x = as_complex_matrix(x, "operator")
    if x.shape != (algebra.dim, algebra.dim):
        raise DimensionMismatchError(
            f"operator has shape {x.shape}, expected ({algebra.dim}, {algebra.dim})")
    residual = frobenius(x - algebra.project(x))
    return ContainmentCheck(residual <= MEMBERSHIP_RTOL * max(frobenius(x), 1e-30), residual)


def _cluster_eigenvalues(vals: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(vals)
    groups = [[order[0]]]
    for idx in order[1:]:
        if vals[idx] - vals[groups[-1][-1]] <= tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return [np.array(g) for g in groups]


def superselection_sectors(algebra: OperatorAlgebra, seed: int = 0) -> ProjectorSet:
    """Minimal projectors of the algebra's center.

    A generic Hermitian central element is eigendecomposed and its
    eigenvalue clusters yield the sector projectors; accidental eigenvalue
    collisions are handled by redrawing (up to SECTOR_RETRIES) before
    falling back to plain grouping at SECTOR_GROUP_TOL.
    """
    z = center(algebra, seed=seed)
    k = z.linear_dimension
    if k == 0:
        raise AlgebraError("center is trivial; no sector structure found")
    d = algebra.dim
    last_error = "no draws attempted"
    for draw in range(SECTOR_RETRIES + 1):
        rng = np.random.default_rng(seed + 1000003 * draw)
        coeffs = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        elem = np.tensordot(coeffs, z.basis, axes=(0, 0))
        h = z.project((elem + dagger(elem)) / 2.0)
        h = (h + dagger(h)) / 2.0
        vals, vecs = np.linalg.eigh(h)
        scale = max(1.0, float(np.max(np.abs(vals))))
        groups = _cluster_eigenvalues(vals, SECTOR_GROUP_TOL * scale)
        if len(groups) != k and draw < SECTOR_RETRIES:
            last_error = f"found {len(groups)} clusters for a center of dimension {k}"
            continue
        projectors = []
        for g in groups:
            cols = vecs[:, g]
            projectors.append(cols @ dagger(cols))
        membership = max(frobenius(q - z.project(q)) for q in projectors)
        if membership > SECTOR_MEMBER_TOL:
            last_error = f"cluster projector leaves the center (residual {membership:.3e})"
            continue
        try:
            ordered = sorted(
                projectors,
                key=lambda q: int(np.argmax(np.abs(np.diag(q)) >= 0.5 * np.max(np.abs(np.diag(q))))),
            )
            return validate_projector_set(ordered)
        except Exception as exc:  # retry on numerically degenerate draws
            last_error = str(exc)
            continue
    raise AlgebraError(
        "center is not spanned by commuting Hermitian idempotents within "
        f"tolerance: {last_error}")


@dataclass(frozen=True)
class DualityReport:
    """Numerical check of the bicommutant and center identities."""

    dim: int
    algebra_dimension: int
    commutant_dimension: int
    residual_bicommutant: float       # algebra vs its bicommutant
    residual_commutant_inside: float  # commutant contained in algebra
    residual_center: float            # center vs commutant
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.residual_bicommutant <= self.tolerance
            and self.residual_commutant_inside <= self.tolerance
            and self.residual_center <= self.tolerance
        )


def verify_duality(projset: ProjectorSet, seed: int = 0) -> DualityReport:
    """Check algebra = bicommutant, commutant inside algebra, center = commutant."""
    alg = generated_algebra(projset)
    aprime = algebra_commutant(alg, seed=seed)
    adouble = algebra_commutant(aprime, seed=seed + 1)
    z = _intersect_spans(alg, aprime)
    return DualityReport(
        dim=projset.dim,
        algebra_dimension=alg.linear_dimension,
        commutant_dimension=aprime.linear_dimension,
        residual_bicommutant=span_equality_residual(alg, adouble),
        residual_commutant_inside=span_containment_residual(aprime, alg),
        residual_center=span_equality_residual(z, aprime),
        tolerance=DUALITY_TOL,
    )
