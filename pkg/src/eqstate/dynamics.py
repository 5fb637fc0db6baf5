"""Closed-system toy dynamics and entropy-based projector-set selection.

The measurement model couples a qubit system (factor B) to a pointer
register whose qubits flip conditionally on the system state, while
environment qubits monitor the pointer in its z basis (factor A = pointer
(x) environment).  Conditional-flip premeasurement plus z-diagonal
environment coupling makes the pointer z basis the dynamically stable one,
which the sieve is expected to select.

Evolution is exact: the propagator comes from the Hamiltonian's spectral
decomposition, so there is no step-size error anywhere in the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .entropy_analysis import von_neumann_entropy
from .errors import (
    DimensionMismatchError,
    InvariantViolationError,
    ValidationError,
)
from .reduction import modified_reduce
from .states import ApparatusProjectorSet, DensityOperator, lift_apparatus_projectors
from .tensor_space import (
    BipartiteSpace,
    as_complex_matrix,
    dagger,
    frobenius,
    herm_tolerance,
)

MAX_MODEL_DIM = 64
DECAY_THRESHOLD = 1.0 / math.e
DECAY_PERSISTENCE = 3          # consecutive grid points below threshold
MIN_INITIAL_INTERFERENCE = 0.01
TIMESCALE_FACTOR = 10.0        # operational reading of "much less than"
SIEVE_TIE_TOL = 1e-9

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
# Per-qubit environment coupling multipliers; incommensurate values push
# finite-size revivals out of the simulated window.
ENV_COUPLING_SPREAD = (1.0, 0.7613, 1.3127, 0.8719, 1.1531, 0.6841)


@dataclass(frozen=True)
class EvolutionSpec:
    """Hamiltonian, initial state, and time grid of one closed-system run."""

    space: BipartiteSpace
    hamiltonian: np.ndarray
    initial_state: DensityOperator
    time_grid: np.ndarray

    def __post_init__(self):
        h = as_complex_matrix(self.hamiltonian, "hamiltonian")
        d = self.space.dim
        if h.shape != (d, d):
            raise DimensionMismatchError(f"hamiltonian shape {h.shape}, expected ({d}, {d})")
        if frobenius(h - dagger(h)) > herm_tolerance(d):
            raise ValidationError("hamiltonian is not Hermitian within tolerance")
        if self.initial_state.dim != d:
            raise DimensionMismatchError("initial state does not match the space dimension")
        grid = np.asarray(self.time_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise ValidationError("time grid must be strictly increasing and start at 0")
        h = h.copy()
        h.flags.writeable = False
        grid.flags.writeable = False
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "time_grid", grid)


@dataclass(frozen=True)
class PointerModelConfig:
    """Knobs of the system/pointer/environment measurement model."""

    pointer_qubits: int = 2
    env_qubits: int = 2
    system_dim: int = 2
    g: float = 1.0                 # system-pointer premeasurement strength
    g_env: float = 4.0             # pointer-environment monitoring strength
    pointer_tilt: float = math.pi / 8  # initial pointer rotation off the z axis
    system_state: str = "plus"     # "plus" or "zero"
    t_max: float = 12.0
    grid_points: int = 601


@dataclass(frozen=True)
class DecoherenceEstimate:
    """Decay analysis of the sector interference norm over a time grid."""

    tau_dec: float                 # math.inf when no persistent decay occurs
    unbounded: bool
    initial_norm: float
    threshold: float
    times: np.ndarray
    norms: np.ndarray


@dataclass(frozen=True)
class TimescaleReport:
    """Pass/fail record of tau_dec << delta_t << tau_P at a fixed factor."""

    tau_dec: float
    delta_t: float
    tau_p: float
    factor: float
    ratio_dec: float               # delta_t / tau_dec
    ratio_p: float                 # tau_p / delta_t
    separation_dec_ok: bool
    separation_p_ok: bool

    @property
    def passed(self) -> bool:
        return self.separation_dec_ok and self.separation_p_ok


@dataclass(frozen=True)
class SieveReport:
    """Entropy generated over one interval, per candidate projector set."""

    candidate_ids: tuple
    entropies: tuple
    winner_index: int
    tie: bool


@dataclass(frozen=True)
class EntropyTrajectory:
    """Per-step entropies and interference along a repeated-reduction run."""

    steps: int
    delta_t: float
    times: tuple
    s_rho: tuple
    s_luders: tuple
    s_modified: tuple
    interference_norms: tuple


def evolve(rho: DensityOperator, hamiltonian, t: float) -> DensityOperator:
    """Unitary evolution rho -> U rho U^dag with U = exp(-i H t)."""
    h = as_complex_matrix(hamiltonian, "hamiltonian")
    if h.shape != (rho.dim, rho.dim):
        raise DimensionMismatchError(
            f"hamiltonian shape {h.shape} does not match state dim {rho.dim}")
    if frobenius(h - dagger(h)) > herm_tolerance(rho.dim):
        raise ValidationError("hamiltonian is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh((h + dagger(h)) / 2.0)
    phases = np.exp(-1j * vals * t)
    u = (vecs * phases) @ dagger(vecs)
    return DensityOperator.from_matrix(u @ rho.matrix @ dagger(u))


def _propagator(hamiltonian: np.ndarray, t: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(hamiltonian)
    return (vecs * np.exp(-1j * vals * t)) @ dagger(vecs)


def _qubit_operator(op: np.ndarray, k: int, n: int) -> np.ndarray:
    """Embed a single-qubit operator at position k of an n-qubit register."""
    out = np.array([[1.0]], dtype=np.complex128)
    for j in range(n):
        out = np.kron(out, op if j == k else np.eye(2))
    return out


def build_measurement_model(config: PointerModelConfig) -> EvolutionSpec:
    """Assemble the pointer-model evolution spec from its config.

    Factor A is pointer (x) environment, factor B the measured system.
    The Hamiltonian is

        g * sum_k |1><1|_B (x) sigma_x(pointer k)
        + g_env * sum_j c_j sigma_z(pointer j mod n_p) (x) sigma_x(env j)

    with fixed incommensurate multipliers c_j.  Each pointer qubit starts
    tilted off the z axis by ``pointer_tilt`` so sector interference is
    present from the start; the environment starts in its ground state.
    """
    if config.system_dim != 2:
        raise ValidationError("only a qubit system (system_dim = 2) is modeled")
    if config.pointer_qubits < 1 or config.env_qubits < 0:
        raise ValidationError("need at least one pointer qubit and env_qubits >= 0")
    n_p, n_e = config.pointer_qubits, config.env_qubits
    dim_p, dim_e = 2 ** n_p, 2 ** n_e
    dim_a = dim_p * dim_e
    dim = dim_a * config.system_dim
    if dim > MAX_MODEL_DIM:
        raise ValidationError(f"total dimension {dim} exceeds the cap {MAX_MODEL_DIM}")
    space = BipartiteSpace(dimA=dim_a, dimB=config.system_dim)

    eye_p, eye_e = np.eye(dim_p), np.eye(dim_e)
    project_1_b = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=np.complex128)
    h = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(n_p):
        flip = _qubit_operator(PAULI_X, k, n_p)
        h += config.g * np.kron(np.kron(flip, eye_e), project_1_b)
    for j in range(n_e):
        c = ENV_COUPLING_SPREAD[j % len(ENV_COUPLING_SPREAD)]
        monitor = _qubit_operator(PAULI_Z, j % n_p, n_p)
        kick = _qubit_operator(PAULI_X, j, n_e)
        h += config.g_env * c * np.kron(np.kron(monitor, kick), np.eye(2))

    tilt = np.array([math.cos(config.pointer_tilt), math.sin(config.pointer_tilt)],
                    dtype=np.complex128)
    pointer = np.array([1.0], dtype=np.complex128)
    for _ in range(n_p):
        pointer = np.kron(pointer, tilt)
    env = np.zeros(dim_e, dtype=np.complex128)
    env[0] = 1.0
    if config.system_state == "plus":
        system = np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)
    elif config.system_state == "zero":
        system = np.array([1.0, 0.0], dtype=np.complex128)
    else:
        raise ValidationError(f"unknown system_state {config.system_state!r}")
    vec = np.kron(np.kron(pointer, env), system)
    rho0 = DensityOperator.from_matrix(np.outer(vec, vec.conj()))

    grid = np.linspace(0.0, config.t_max, config.grid_points)
    return EvolutionSpec(space=space, hamiltonian=h, initial_state=rho0, time_grid=grid)


def pointer_sectors(config: PointerModelConfig, basis: str) -> ApparatusProjectorSet:
    """Apparatus sectors grouping A by the pointer register's z or x state.

    Each sector spans one pointer basis state tensored with the whole
    environment, so every sector has A-dimension 2**env_qubits.
    """
    n_p, n_e = config.pointer_qubits, config.env_qubits
    dim_p, dim_e = 2 ** n_p, 2 ** n_e
    if basis == "z":
        pointer_basis = np.eye(dim_p, dtype=np.complex128)
    elif basis == "x":
        hadamard = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
        pointer_basis = np.array([[1.0]], dtype=np.complex128)
        for _ in range(n_p):
            pointer_basis = np.kron(pointer_basis, hadamard)
    else:
        raise ValidationError(f"unknown pointer basis {basis!r}")
    eye_e = np.eye(dim_e, dtype=np.complex128)
    groups = []
    for m in range(dim_p):
        vectors = [np.kron(pointer_basis[:, m], eye_e[:, j]) for j in range(dim_e)]
        groups.append(vectors)
    space = BipartiteSpace(dimA=dim_p * dim_e, dimB=config.system_dim)
    return lift_apparatus_projectors(space, groups, labels=tuple(range(dim_p)))


def interference_norm(rho: DensityOperator, apparatus: ApparatusProjectorSet) -> float:
    """Relative norm of the part of rho that dephasing would remove."""
    space = apparatus.space
    if rho.dim != space.dim:
        raise DimensionMismatchError("state does not match the apparatus space")
    dephased = np.zeros_like(rho.matrix)
    for p in apparatus.lifted.projectors:
        dephased += p @ rho.matrix @ p
    return frobenius(rho.matrix - dephased) / max(frobenius(rho.matrix), 1e-30)


def estimate_decoherence_time(
    spec: EvolutionSpec, apparatus: ApparatusProjectorSet
) -> DecoherenceEstimate:
    """First grid time at which sector interference has persistently decayed.

    The interference norm is recorded along the grid; tau_dec is the
    earliest time at which it falls to 1/e of its initial value and stays
    below for DECAY_PERSISTENCE consecutive grid points.  If that never
    happens the estimate is flagged unbounded rather than raising.
    """
    initial = interference_norm(spec.initial_state, apparatus)
    if initial <= MIN_INITIAL_INTERFERENCE:
        raise ValidationError(
            f"initial interference {initial:.3e} is below {MIN_INITIAL_INTERFERENCE}; "
            "nothing to decay")
    vals, vecs = np.linalg.eigh(spec.hamiltonian)
    rho0 = spec.initial_state.matrix
    norms = []
    for t in spec.time_grid:
        u = (vecs * np.exp(-1j * vals * t)) @ dagger(vecs)
        rho_t = DensityOperator.from_matrix(u @ rho0 @ dagger(u))
        norms.append(interference_norm(rho_t, apparatus))
    norms = np.asarray(norms)
    threshold = initial * DECAY_THRESHOLD
    below = norms <= threshold
    tau = math.inf
    for k in range(len(below) - DECAY_PERSISTENCE + 1):
        if np.all(below[k : k + DECAY_PERSISTENCE]):
            tau = float(spec.time_grid[k])
            break
    return DecoherenceEstimate(
        tau_dec=tau,
        unbounded=math.isinf(tau),
        initial_norm=float(initial),
        threshold=float(threshold),
        times=spec.time_grid.copy(),
        norms=norms,
    )


def check_timescales(tau_dec: float, delta_t: float, tau_p: float,
                     factor: float = TIMESCALE_FACTOR) -> TimescaleReport:
    """Separation test: delta_t >= factor * tau_dec and tau_p >= factor * delta_t."""
    if delta_t <= 0 or tau_dec <= 0 or tau_p <= 0:
        raise ValidationError("timescales must be positive (inf allowed for tau_dec, tau_p)")
    ratio_dec = delta_t / tau_dec if not math.isinf(tau_dec) else 0.0
    ratio_p = tau_p / delta_t
    return TimescaleReport(
        tau_dec=tau_dec,
        delta_t=delta_t,
        tau_p=tau_p,
        factor=factor,
        ratio_dec=ratio_dec,
        ratio_p=ratio_p,
        separation_dec_ok=(not math.isinf(tau_dec)) and delta_t >= factor * tau_dec,
        separation_p_ok=ratio_p >= factor,
    )


def sieve(spec: EvolutionSpec, candidates, delta_t: float,
          candidate_ids=None) -> SieveReport:
    """Rank candidate projector sets by entropy generated over one interval.

    Each candidate's score is S(representative of rho(delta_t)) - S(rho(0));
    the winner is the argmin, ties (within SIEVE_TIE_TOL) break to the
    lowest index and set the tie flag.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValidationError("sieve needs at least one candidate projector set")
    if candidate_ids is None:
        candidate_ids = tuple(str(i) for i in range(len(candidates)))
    s0 = von_neumann_entropy(spec.initial_state)
    u = _propagator(spec.hamiltonian, delta_t)
    rho_t = DensityOperator.from_matrix(
        u @ spec.initial_state.matrix @ dagger(u))
    generated = []
    for apparatus in candidates:
        rep = modified_reduce(rho_t, apparatus)
        generated.append(von_neumann_entropy(rep.rho_hat) - s0)
    best = min(generated)
    winner = next(i for i, s in enumerate(generated) if s <= best + SIEVE_TIE_TOL)
    tie = sum(1 for s in generated if s <= best + SIEVE_TIE_TOL) > 1
    return SieveReport(
        candidate_ids=tuple(candidate_ids),
        entropies=tuple(generated),
        winner_index=winner,
        tie=tie,
    )


def repeated_reduction_run(
    spec: EvolutionSpec,
    apparatus: ApparatusProjectorSet,
    delta_t: float,
    steps: int,
) -> EntropyTrajectory:
    """Alternate unitary evolution and reduction, recording entropies.

    At every step the dephased-channel entropy is computed for comparison
    but only the factorized representative is fed back into the evolution.
    The representative entropy is checked to be non-decreasing.
    """
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    if delta_t <= 0:
        raise ValidationError(f"delta_t must be positive, got {delta_t}")
    from .reduction import luders_dephase

    u = _propagator(spec.hamiltonian, delta_t)
    times, s_rho, s_lud, s_mod, interference = [], [], [], [], []

    def record(t: float, sigma: DensityOperator) -> DensityOperator:
        rep = modified_reduce(sigma, apparatus)
        times.append(t)
        s_rho.append(von_neumann_entropy(sigma))
        s_lud.append(von_neumann_entropy(luders_dephase(sigma, apparatus.lifted)))
        s_mod.append(von_neumann_entropy(rep.rho_hat))
        interference.append(interference_norm(sigma, apparatus))
        return rep.rho_hat

    current = record(0.0, spec.initial_state)
    for k in range(1, steps + 1):
        sigma = DensityOperator.from_matrix(u @ current.matrix @ dagger(u))
        current = record(k * delta_t, sigma)
        if s_mod[-1] < s_mod[-2] - 1e-8:
            raise InvariantViolationError(
                f"representative entropy decreased at step {k}: "
                f"{s_mod[-2]} -> {s_mod[-1]}")
    return EntropyTrajectory(
        steps=steps,
        delta_t=delta_t,
        times=tuple(times),
        s_rho=tuple(s_rho),
        s_luders=tuple(s_lud),
        s_modified=tuple(s_mod),
        interference_norms=tuple(interference),
    )


def sieve_winner_stability(
    spec: EvolutionSpec,
    candidates,
    delta_t: float,
    steps: int,
    candidate_ids=None,
) -> tuple[float, tuple]:
    """Time until the per-step sieve winner changes along a reduction run.

    The reduction chain uses the step-0 winner's apparatus throughout; at
    every step the sieve is re-run over the candidate list from the current
    chain state.  Returns (first change time or inf, winner index per step).
    """
    candidates = list(candidates)
    if not candidates:
        raise ValidationError("need at least one candidate projector set")
    winners = []
    state = spec.initial_state

    def step_spec(rho):
        return EvolutionSpec(
            space=spec.space,
            hamiltonian=spec.hamiltonian,
            initial_state=rho,
            time_grid=np.array([0.0, delta_t]),
        )

    report = sieve(step_spec(state), candidates, delta_t, candidate_ids)
    winners.append(report.winner_index)
    chain_apparatus = candidates[report.winner_index]
    u = _propagator(spec.hamiltonian, delta_t)
    tau_p = math.inf
    for k in range(1, steps + 1):
        state = DensityOperator.from_matrix(u @ state.matrix @ dagger(u))
        state = modified_reduce(state, chain_apparatus).rho_hat
        report = sieve(step_spec(state), candidates, delta_t, candidate_ids)
        winners.append(report.winner_index)
        if report.winner_index != winners[0] and math.isinf(tau_p):
            tau_p = k * delta_t
    return tau_p, tuple(winners)
