"""Von Neumann entropy and the entropy ordering of the reduction channels.

Entropies are in nats.  For any state and apparatus the three entropies
obey S(rho) <= S(dephased) <= S(factorized representative): dephasing is a
pinching, and the factorized representative maximizes entropy over the
whole equivalence class.  The class sampler below provides the
statistical check of that maximality, building members that provably share
the representative's sector-conditioned B-operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolationError, MaxEntropyCounterexampleError, StateError
from .reduction import EquivalenceClassRep, equivalent_modified, luders_dephase, modified_reduce
from .states import ApparatusProjectorSet, DensityOperator
from .tensor_space import tensor_product

EIG_CLAMP = 1e-10        # negative eigenvalues above this magnitude are invalid
ORDER_TOL = 1e-9
DECOMP_TOL = 1e-8
MAX_ENTROPY_TOL = 1e-8
SAMPLE_EQUIV_TOL = 1e-9


@dataclass(frozen=True)
class EntropyReport:
    """Entropies of a state and its two reduced forms, plus per-sector data."""

    s_rho: float
    s_luders: float
    s_modified: float
    jaynes_gap: float
    sector_entropies: tuple  # (sector index, weight, S(conditional B-state))

    def __post_init__(self):
        if self.s_rho > self.s_luders + ORDER_TOL or self.s_luders > self.s_modified + ORDER_TOL:
            raise InvariantViolationError(
                "entropy ordering violated: "
                f"S={self.s_rho}, S_dephased={self.s_luders}, S_rep={self.s_modified}")
        if self.jaynes_gap < -ORDER_TOL:
            raise InvariantViolationError(f"negative entropy gap {self.jaynes_gap}")


def von_neumann_entropy(rho: DensityOperator) -> float:
    """S = -sum lam ln lam over the spectrum, with 0 ln 0 = 0."""
    vals = np.linalg.eigvalsh(rho.matrix)
    if vals[0] < -EIG_CLAMP:
        raise StateError(f"invalid state: eigenvalue {vals[0]:.3e} below -{EIG_CLAMP}")
    vals = np.clip(vals, 0.0, None)
    positive = vals[vals > 0.0]
    return float(-np.sum(positive * np.log(positive)))


def shannon_entropy(weights) -> float:
    w = np.asarray([x for x in weights if x > 0.0], dtype=float)
    return float(-np.sum(w * np.log(w)))


def entropy_chain(rho: DensityOperator, apparatus: ApparatusProjectorSet) -> EntropyReport:
    """All three entropies for one state, with the ordering enforced.

    Also checks the closed-form decomposition of the representative's
    entropy, S_rep = H(w) + sum_i w_i (ln d_A_i + S(rho_B_i)), which holds
    because the representative is a direct sum of product blocks.
    """
    s_rho = von_neumann_entropy(rho)
    s_lud = von_neumann_entropy(luders_dephase(rho, apparatus.lifted))
    rep = modified_reduce(rho, apparatus)
    s_mod = von_neumann_entropy(rep.rho_hat)
    sector_entropies = tuple(
        (s.index, s.weight, von_neumann_entropy(s.state_B)) for s in rep.sectors)
    decomposed = shannon_entropy([s.weight for s in rep.sectors]) + sum(
        s.weight * (np.log(rep.apparatus.sector_dims[s.index]) + se)
        for s, (_, _, se) in zip(rep.sectors, sector_entropies))
    if abs(decomposed - s_mod) > DECOMP_TOL:
        raise InvariantViolationError(
            f"entropy decomposition identity failed: {decomposed} vs {s_mod}")
    return EntropyReport(
        s_rho=s_rho,
        s_luders=s_lud,
        s_modified=s_mod,
        jaynes_gap=s_mod - s_lud,
        sector_entropies=sector_entropies,
    )


def jaynes_gap(rho: DensityOperator, apparatus: ApparatusProjectorSet) -> float:
    """Entropy shortfall of the dephased state against the factorized one.

    Nonnegative; zero when dephasing already leaves maximally mixed sector
    blocks of product form.
    """
    return entropy_chain(rho, apparatus).jaynes_gap


def random_density_operator(dim: int, rng: np.random.Generator) -> DensityOperator:
    """Hilbert-Schmidt-distributed mixed state via normalized G G^dag."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityOperator.from_matrix(m / np.trace(m).real)


def _random_sector_density(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random A-density supported on the sector spanned by ``basis`` columns."""
    d = basis.shape[1]
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return basis @ m @ basis.conj().T


def _purified_member(rep: EquivalenceClassRep, rng: np.random.Generator) -> np.ndarray | None:
    """Pure class member, when every conditional state fits its sector rank."""
    space = rep.apparatus.space
    psi = np.zeros((space.dimA, space.dimB), dtype=np.complex128)
    for s in rep.sectors:
        vals, vecs = np.linalg.eigh(s.state_B.matrix)
        keep = vals > 1e-12
        vals, vecs = vals[keep], vecs[:, keep]
        sector_basis = rep.apparatus.sector_bases[s.index]
        d_a = sector_basis.shape[1]
        if vals.size > d_a:
            return None
        g = rng.standard_normal((d_a, vals.size)) + 1j * rng.standard_normal((d_a, vals.size))
        q, _ = np.linalg.qr(g)
        a_vecs = sector_basis @ q[:, : vals.size]
        for k in range(vals.size):
            psi += np.sqrt(s.weight * vals[k]) * np.outer(a_vecs[:, k], vecs[:, k])
    v = psi.reshape(-1)
    return np.outer(v, v.conj())


def sample_equivalence_class(
    rep: EquivalenceClassRep, n: int, seed: int
) -> list[DensityOperator]:
    """Draw n states from the representative's equivalence class.

    Each sample keeps every sector's weight and conditional B-state while
    randomizing what the class does not pin down: the A-state inside each
    sector, and (when conditional ranks allow) global purity via an
    embedded random purification.  Every sample is verified against the
    class membership check before it is returned.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    space = rep.apparatus.space
    out = []
    for j in range(n):
        matrix = None
        if j % 2 == 1:
            matrix = _purified_member(rep, rng)
        if matrix is None:
            matrix = np.zeros((space.dim, space.dim), dtype=np.complex128)
            for s in rep.sectors:
                sigma_a = _random_sector_density(rep.apparatus.sector_bases[s.index], rng)
                matrix += s.weight * tensor_product(space, sigma_a, s.state_B.matrix)
        sigma = DensityOperator.from_matrix(matrix)
        check = equivalent_modified(sigma, rep.rho_hat, rep.apparatus)
        if check.residual > SAMPLE_EQUIV_TOL:
            raise InvariantViolationError(
                f"class sampler produced a non-member (residual {check.residual:.3e})")
        out.append(sigma)
    return out


@dataclass(frozen=True)
class MaxEntropyReport:
    """Statistical support for the representative's entropy maximality."""

    n_samples: int
    entropy_rep: float
    max_sample_entropy: float
    min_gap: float  # entropy_rep - max sample entropy

    @property
    def passed(self) -> bool:
        return self.min_gap >= -MAX_ENTROPY_TOL


def verify_max_entropy(rep: EquivalenceClassRep, n: int, seed: int) -> MaxEntropyReport:
    """Assert no sampled class member beats the representative's entropy."""
    s_rep = von_neumann_entropy(rep.rho_hat)
    worst = -np.inf
    for sigma in sample_equivalence_class(rep, n, seed):
        s_sigma = von_neumann_entropy(sigma)
        worst = max(worst, s_sigma)
        if s_sigma > s_rep + MAX_ENTROPY_TOL:
            raise MaxEntropyCounterexampleError(
                f"sampled member has entropy {s_sigma} above representative {s_rep}",
                sigma=sigma.matrix,
                entropy=s_sigma,
                entropy_rep=s_rep,
            )
    return MaxEntropyReport(
        n_samples=n,
        entropy_rep=s_rep,
        max_sample_entropy=float(worst),
        min_gap=float(s_rep - worst),
    )
