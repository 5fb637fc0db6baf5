"""Reduction channels and the equivalence relations they represent.

Two channels act on a composite state given an apparatus projector set.
The two-stage projective channel dephases across sectors (sum_i P_i rho
P_i) and optionally selects one outcome.  The sector-factorized channel
additionally forgets everything about the apparatus state inside each
sector, replacing the A-block with the maximally mixed sector state while
keeping the conditional B-state fixed:

    rho_hat = sum_i w_i (P_A_i / d_A_i) (x) rho_B_i .

That representative is the canonical member of the equivalence class of
all states sharing the sector-conditioned B-operators tr_A(P_i rho), and
it is the entropy-maximizing member (verified statistically in the entropy
module's tests).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvariantViolationError,
    UnoccupiedSectorError,
)
from .states import (
    EPS_W,
    ApparatusProjectorSet,
    DensityOperator,
    ProjectorSet,
    PureState,
    conditional_state,
)
from .tensor_space import frobenius, spectral_decompose, tensor_product

REP_RECON_TOL = 1e-10
EQUIV_RTOL = 1e-9


@dataclass(frozen=True)
class SectorComponent:
    """One occupied sector of a factorized representative."""

    index: int
    weight: float
    state_A: DensityOperator
    state_B: DensityOperator


@dataclass(frozen=True)
class EquivalenceClassRep:
    """Canonical representative of a state's equivalence class."""

    apparatus: ApparatusProjectorSet
    sectors: tuple
    rho_hat: DensityOperator

    def weights(self) -> dict[int, float]:
        return {s.index: s.weight for s in self.sectors}


@dataclass(frozen=True)
class PurifiedSector:
    """Sector data for the purified-conditional-state comparison channel."""

    index: int
    weight: float
    state_A: DensityOperator
    state_B: DensityOperator   # rank-1 projector onto the dominant eigenvector
    purity_deficit: float      # 1 - tr(rho_B^2) of the honest conditional state


@dataclass(frozen=True)
class PurifiedReduction:
    """Output of the purified-conditional-state variant, plus deficits."""

    apparatus: ApparatusProjectorSet
    sectors: tuple
    rho_hat: DensityOperator


class EquivalenceCheck(NamedTuple):
    equivalent: bool
    residual: float

    def __bool__(self) -> bool:
        return self.equivalent


def _check_dims(rho: DensityOperator, dim: int):
    if rho.dim != dim:
        raise DimensionMismatchError(f"state dim {rho.dim} does not match {dim}")


def luders_dephase(rho: DensityOperator, projset: ProjectorSet) -> DensityOperator:
    """First reduction stage: kill interference across sectors.

    Returns sum_i P_i rho P_i; trace-preserving and positive, idempotent,
    and equal to rho exactly when rho commutes with every projector.
    """
    _check_dims(rho, projset.dim)
    out = np.zeros_like(rho.matrix)
    for p in projset.projectors:
        out += p @ rho.matrix @ p
    return DensityOperator.from_matrix(out)


def luders_select(
    rho: DensityOperator, projset: ProjectorSet, i: int
) -> tuple[float, DensityOperator]:
    """Second reduction stage: condition on outcome i.

    Returns (w_i, P_i rho P_i / w_i); raises UnoccupiedSectorError when the
    outcome probability is numerically zero.
    """
    _check_dims(rho, projset.dim)
    p = projset.projectors[i]
    w = float(np.trace(rho.matrix @ p).real)
    if w <= EPS_W:
        raise UnoccupiedSectorError(
            f"outcome {i} has probability {w:.3e}; no conditional state exists")
    return w, DensityOperator.from_matrix(p @ rho.matrix @ p / w)


def modified_reduce(rho: DensityOperator, apparatus: ApparatusProjectorSet) -> EquivalenceClassRep:
    """Build the sector-factorized canonical representative of rho's class."""
    space = apparatus.space
    _check_dims(rho, space.dim)
    sectors = []
    rho_hat = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for i in range(len(apparatus)):
        w, rho_b = conditional_state(rho, apparatus, i)
        if rho_b is None:
            continue
        rho_a = apparatus.sector_state_A(i)
        sectors.append(SectorComponent(index=i, weight=w, state_A=rho_a, state_B=rho_b))
        rho_hat += w * tensor_product(space, rho_a.matrix, rho_b.matrix)
    rep = EquivalenceClassRep(
        apparatus=apparatus,
        sectors=tuple(sectors),
        rho_hat=DensityOperator.from_matrix(rho_hat),
    )
    _validate_rep(rep)
    return rep


def _validate_rep(rep: EquivalenceClassRep):
    total = sum(s.weight for s in rep.sectors)
    if abs(total - 1.0) > 1e-9:
        raise InvariantViolationError(f"sector weights sum to {total}, expected 1")
    space = rep.apparatus.space
    assembled = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for s in rep.sectors:
        assembled += s.weight * tensor_product(space, s.state_A.matrix, s.state_B.matrix)
    recon = frobenius(assembled - rep.rho_hat.matrix)
    if recon > REP_RECON_TOL:
        raise InvariantViolationError(
            f"representative does not reassemble from its sectors (residual {recon:.3e})")
    for p in rep.apparatus.lifted.projectors:
        comm = frobenius(p @ rep.rho_hat.matrix - rep.rho_hat.matrix @ p)
        if comm > 1e-9:
            raise InvariantViolationError(
                f"representative fails to commute with a sector projector ({comm:.3e})")


def equivalent_standard(
    sigma: DensityOperator, rho: DensityOperator, projset: ProjectorSet
) -> EquivalenceCheck:
    """Same probabilities for every projector of the sector-block algebra.

    Because block compressions determine all traces against the block
    algebra, the quantifier over its projectors reduces to comparing
    P_i sigma P_i with P_i rho P_i for each i; the residual is the largest
    Frobenius difference between those blocks.
    """
    _check_dims(sigma, projset.dim)
    _check_dims(rho, projset.dim)
    residual = 0.0
    for p in projset.projectors:
        residual = max(residual, frobenius(p @ (sigma.matrix - rho.matrix) @ p))
    scale = 1.0 + max(frobenius(sigma.matrix), frobenius(rho.matrix))
    return EquivalenceCheck(residual <= EQUIV_RTOL * scale, residual)


def equivalent_modified(
    sigma: DensityOperator, rho: DensityOperator, apparatus: ApparatusProjectorSet
) -> EquivalenceCheck:
    """Same sector-conditioned B-operators: tr_A(P_i sigma) = tr_A(P_i rho).

    Equivalent to demanding equal probabilities for every P_i paired with
    every B-only projector, but checkable with one partial trace per
    sector; the residual is the largest Frobenius difference between the
    conditioned B-operators.
    """
    from .tensor_space import partial_trace_A

    space = apparatus.space
    _check_dims(sigma, space.dim)
    _check_dims(rho, space.dim)
    residual = 0.0
    diff = sigma.matrix - rho.matrix
    for p in apparatus.lifted.projectors:
        residual = max(residual, frobenius(partial_trace_A(space, p @ diff)))
    scale = 1.0 + max(frobenius(sigma.matrix), frobenius(rho.matrix))
    return EquivalenceCheck(residual <= EQUIV_RTOL * scale, residual)


def representatives_match(a: EquivalenceClassRep, b: EquivalenceClassRep) -> EquivalenceCheck:
    """Frobenius comparison of two canonical representatives."""
    residual = frobenius(a.rho_hat.matrix - b.rho_hat.matrix)
    scale = 1.0 + frobenius(a.rho_hat.matrix)
    return EquivalenceCheck(residual <= EQUIV_RTOL * scale, residual)


def dlp_reduce(psi: PureState, apparatus: ApparatusProjectorSet) -> PurifiedReduction:
    """Comparison channel that purifies each conditional B-state.

    Historically motivated variant: the sector's B-state is replaced by the
    projector onto the dominant eigenvector of the honest conditional
    state.  The reported purity deficit 1 - tr(rho_B^2) measures how much
    this discards; it vanishes exactly when all A-basis vectors in the
    sector share one relative B-direction.
    """
    v = psi.vector()
    rho = DensityOperator.from_matrix(np.outer(v, v.conj()))
    space = apparatus.space
    sectors = []
    rho_hat = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for i in range(len(apparatus)):
        w, rho_b = conditional_state(rho, apparatus, i)
        if rho_b is None:
            continue
        pairs = spectral_decompose(rho_b.matrix)
        _, top = pairs[0]
        pure_b = DensityOperator.from_matrix(np.outer(top, top.conj()))
        deficit = 1.0 - rho_b.purity()
        rho_a = apparatus.sector_state_A(i)
        sectors.append(PurifiedSector(
            index=i, weight=w, state_A=rho_a, state_B=pure_b,
            purity_deficit=max(deficit, 0.0)))
        rho_hat += w * tensor_product(space, rho_a.matrix, pure_b.matrix)
    return PurifiedReduction(
        apparatus=apparatus,
        sectors=tuple(sectors),
        rho_hat=DensityOperator.from_matrix(rho_hat),
    )
