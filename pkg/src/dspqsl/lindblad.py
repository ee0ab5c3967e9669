"""Lindblad generator and a fixed-step RK4 trajectory integrator.

States evolve under rho' = -i[H, rho] + sum_mu gamma_mu D[L_mu] rho with
D[L] rho = L rho L^dag - {L^dag L, rho}/2. The generator is linear and
time independent, so the integrator works on vectorized states through
the generator's matrix; `lindblad_rhs` is the direct, readable form of
the same map and the two are tested against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat
from .qmat import EigenSystem

__all__ = [
    "BatchEvolution",
    "IntegrationError",
    "ModelError",
    "ModelSpec",
    "Trajectory",
    "coherence_decoupling_diagnostic",
    "default_step",
    "evolve",
    "evolve_batch",
    "lindblad_rhs",
    "rhs_matrix",
]

# Conservation thresholds enforced at every trajectory record.
TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-9
POSITIVITY_TOL = 1e-8

# Fidelity may poke past [0, 1] by at most this much before aborting.
FIDELITY_SLACK = 1e-9

DEFAULT_STRIDE = 20


class ModelError(ValueError):
    """Model construction or validation failure."""


class IntegrationError(RuntimeError):
    """Trajectory aborted; `time` holds the offending instant."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t = {time:.6g}")
        self.time = time


@dataclass
class ModelSpec:
    """Dissipative model with a pure target state.

    `target_index` is the 1-based slot of the target in the ascending
    eigenbasis (the ordered-basis convention used throughout). `gamma_ref`
    is an optional reference damping rate used only for unit conversion in
    reports.
    """

    h_s: np.ndarray
    jump_ops: list[np.ndarray]
    rates: list[float]
    target: np.ndarray
    eigensystem: EigenSystem
    target_index: int
    gamma_ref: float | None = None

    def __post_init__(self):
        self.h_s = qmat.as_complex_matrix(self.h_s)
        d = self.h_s.shape[0]
        scale = max(1.0, qmat.frobenius_norm(self.h_s))
        if qmat.hermiticity_defect(self.h_s) > 1e-12 * scale:
            raise ModelError("Hamiltonian is not Hermitian")
        self.jump_ops = [qmat.as_complex_matrix(l) for l in self.jump_ops]
        if any(l.shape[0] != d for l in self.jump_ops):
            raise ModelError("jump operator dimension mismatch")
        self.rates = [float(g) for g in self.rates]
        if len(self.rates) != len(self.jump_ops):
            raise ModelError("one rate per jump operator required")
        if any(g < 0 for g in self.rates):
            raise ModelError("rates must be nonnegative")
        self.target = qmat.as_ket(self.target)
        if self.target.shape[0] != d:
            raise ModelError("target dimension mismatch")
        if self.eigensystem.dim != d:
            raise ModelError("eigensystem dimension mismatch")
        if not 1 <= self.target_index <= d:
            raise ModelError(f"target_index {self.target_index} outside 1..{d}")

    @property
    def dim(self) -> int:
        return self.h_s.shape[0]

    @property
    def target_energy(self) -> float:
        return float(self.eigensystem.eigenvalues[self.target_index - 1])

    @property
    def target_projector(self) -> np.ndarray:
        return np.outer(self.target, self.target.conj())

    def target_alignment_defect(self) -> float:
        """|1 - |<E_{n*}|target>|^2| for the slot at target_index."""
        overlap = self.eigensystem.vector(self.target_index).conj() @ self.target
        return abs(1.0 - abs(overlap) ** 2)

    def check_target_alignment(self, tol: float = 1e-10) -> None:
        defect = self.target_alignment_defect()
        if defect > tol:
            raise ModelError(
                f"target is not the eigenvector at slot {self.target_index} "
                f"(overlap defect {defect:.3e})"
            )


def lindblad_rhs(model: ModelSpec, rho) -> np.ndarray:
    """-i[H, rho] + sum_mu gamma_mu (L rho L^dag - {L^dag L, rho}/2).

    Output is traceless and Hermitian up to roundoff for Hermitian input.
    """
    r = qmat.as_complex_matrix(rho)
    if r.shape[0] != model.dim:
        raise ValueError(f"state dimension {r.shape[0]} != model dimension {model.dim}")
    h = model.h_s
    out = -1j * (h @ r - r @ h)
    for g, l in zip(model.rates, model.jump_ops):
        if g == 0.0:
            continue
        l_dag = l.conj().T
        ldl = l_dag @ l
        out += g * (l @ r @ l_dag - 0.5 * (ldl @ r + r @ ldl))
    return out


def rhs_matrix(model: ModelSpec) -> np.ndarray:
    """Matrix of `lindblad_rhs` acting on row-major vectorized states."""
    d = model.dim
    eye = np.eye(d, dtype=complex)
    h = model.h_s
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for g, l in zip(model.rates, model.jump_ops):
        if g == 0.0:
            continue
        ldl = l.conj().T @ l
        gen += g * (
            np.kron(l, l.conj())
            - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
        )
    return gen


def default_step(model: ModelSpec) -> float:
    """Fixed step sized against the fastest coherent or dissipative scale."""
    rate_scale = sum(
        g * qmat.frobenius_norm(l.conj().T @ l)
        for g, l in zip(model.rates, model.jump_ops)
    )
    scale = max(qmat.frobenius_norm(model.h_s), rate_scale)
    if scale <= 0.0:
        return 0.05
    return min(0.05, 0.1 / scale)


@dataclass
class Trajectory:
    """Recorded time series of one evolution.

    Records hold the state, the overlap with the target (fidelity), the
    angle arccos(fidelity), and per-record conservation diagnostics.
    """

    model: ModelSpec
    step: float
    times: np.ndarray           # (R,)
    states: np.ndarray          # (R, d, d)
    fidelities: np.ndarray      # (R,)
    angles: np.ndarray          # (R,)
    trace_devs: np.ndarray      # (R,)
    herm_defects: np.ndarray    # (R,)
    min_eigs: np.ndarray        # (R,)
    coherence_maxes: np.ndarray  # (R,) largest off-diagonal in the eigenbasis

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelities[-1])


def _record_steps(n_steps: int, stride: int) -> range:
    return range(0, n_steps + 1, stride)


def _batch_diagnostics(rhos: np.ndarray, phi: np.ndarray):
    """Trace deviation, Hermiticity defect, min eigenvalue, fidelity for a
    stack of states (B, d, d)."""
    trace_dev = np.abs(np.einsum("bii->b", rhos) - 1.0)
    adj = rhos.conj().transpose(0, 2, 1)
    herm_defect = np.linalg.norm(rhos - adj, axis=(1, 2))
    min_eig = np.linalg.eigvalsh((rhos + adj) / 2.0)[:, 0]
    fid = np.einsum("i,bij,j->b", phi.conj(), rhos, phi).real
    return trace_dev, herm_defect, min_eig, fid


def evolve(
    model: ModelSpec,
    rho0,
    t_end: float,
    step: float | None = None,
    stride: int = DEFAULT_STRIDE,
) -> Trajectory:
    """Integrate the master equation with fixed-step classical RK4.

    Records are kept every `stride` steps plus the final step (stride=1 for
    full resolution). The run aborts with IntegrationError when a record
    breaches the conservation thresholds or the state stops being finite.
    """
    r0 = qmat.as_complex_matrix(rho0)
    health = qmat.validate_density_matrix(r0, tol=1e-10)
    if not health.passes:
        raise ValueError(f"initial state is not a valid density matrix: {health}")
    if step is None:
        step = default_step(model)
    if step <= 0.0:
        raise ValueError("step must be positive")
    if t_end < step:
        raise ValueError("t_end must be at least one step")
    if stride < 1:
        raise ValueError("stride must be >= 1")

    d = model.dim
    if r0.shape[0] != d:
        raise ValueError("initial state dimension mismatch")
    n_steps = int(round(t_end / step))
    gen = rhs_matrix(model)
    phi = model.target
    vecs = model.eigensystem.vectors
    offdiag = ~np.eye(d, dtype=bool)

    times, states = [], []
    fids, angles = [], []
    trace_devs, herm_defects, min_eigs, coh_maxes = [], [], [], []

    def record(step_index: int, y: np.ndarray) -> None:
        t = step_index * step
        rho = y.reshape(d, d)
        if not np.all(np.isfinite(rho)):
            raise IntegrationError("state became non-finite", t)
        tr_dev, herm, min_eig, fid = (
            x[0] for x in _batch_diagnostics(rho[None, :, :], phi)
        )
        if tr_dev > TRACE_TOL:
            raise IntegrationError(f"trace deviation {tr_dev:.3e} beyond threshold", t)
        if herm > HERMITICITY_TOL:
            raise IntegrationError(f"Hermiticity defect {herm:.3e} beyond threshold", t)
        if min_eig < -POSITIVITY_TOL:
            raise IntegrationError(f"eigenvalue {min_eig:.3e} beyond threshold", t)
        if fid < -FIDELITY_SLACK or fid > 1.0 + FIDELITY_SLACK:
            raise IntegrationError(f"fidelity {fid} outside [0, 1]", t)
        in_basis = vecs.conj().T @ rho @ vecs
        times.append(t)
        states.append(rho.copy())
        fids.append(float(fid))
        angles.append(float(math.acos(min(max(float(fid), 0.0), 1.0))))
        trace_devs.append(float(tr_dev))
        herm_defects.append(float(herm))
        min_eigs.append(float(min_eig))
        coh_maxes.append(float(np.max(np.abs(in_basis[offdiag]))))

    y = r0.reshape(-1).astype(complex)
    record(0, y)
    next_records = set(_record_steps(n_steps, stride))
    for i in range(1, n_steps + 1):
        k1 = gen @ y
        k2 = gen @ (y + (0.5 * step) * k1)
        k3 = gen @ (y + (0.5 * step) * k2)
        k4 = gen @ (y + step * k3)
        y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if i in next_records or i == n_steps:
            record(i, y)

    return Trajectory(
        model=model,
        step=step,
        times=np.array(times),
        states=np.array(states),
        fidelities=np.array(fids),
        angles=np.array(angles),
        trace_devs=np.array(trace_devs),
        herm_defects=np.array(herm_defects),
        min_eigs=np.array(min_eigs),
        coherence_maxes=np.array(coh_maxes),
    )


def _one_step_matrix(gen: np.ndarray, step: float) -> np.ndarray:
    """Quartic Taylor polynomial of the step map.

    For a linear time-independent generator this is algebraically identical
    to one classical RK4 step, so batch and single-trajectory integration
    follow the same method.
    """
    d2 = gen.shape[0]
    eye = np.eye(d2, dtype=complex)
    p = eye + (step / 4.0) * gen
    p = eye + (step / 3.0) * (gen @ p)
    p = eye + (step / 2.0) * (gen @ p)
    return eye + step * (gen @ p)


@dataclass
class BatchEvolution:
    """Summaries of many trajectories integrated side by side."""

    times: np.ndarray            # (R,)
    fidelities: np.ndarray       # (B, R)
    max_trace_dev: np.ndarray    # (B,)
    max_herm_defect: np.ndarray  # (B,)
    min_eigenvalue: np.ndarray   # (B,)
    final_states: np.ndarray     # (B, d, d)

    @property
    def final_fidelities(self) -> np.ndarray:
        return self.fidelities[:, -1]


def evolve_batch(
    model: ModelSpec,
    states,
    t_end: float,
    step: float | None = None,
    stride: int = DEFAULT_STRIDE,
) -> BatchEvolution:
    """Evolve a stack of initial states (B, d, d) under one model.

    Uses the same fixed step and record grid as `evolve` but keeps only
    per-record fidelities and running conservation extrema per state.
    Aborts only on non-finite states; threshold checks are the caller's.
    """
    stack = np.asarray(states, dtype=complex)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected a (B, d, d) stack, got {stack.shape}")
    d = model.dim
    if stack.shape[1] != d:
        raise ValueError("state dimension mismatch")
    if step is None:
        step = default_step(model)
    if step <= 0.0 or t_end < step:
        raise ValueError("need step > 0 and t_end >= step")
    if stride < 1:
        raise ValueError("stride must be >= 1")

    n_batch = stack.shape[0]
    n_steps = int(round(t_end / step))
    gen = rhs_matrix(model)
    propagator = _one_step_matrix(gen, step)
    phi = model.target

    y = stack.reshape(n_batch, d * d).T.copy()  # (d^2, B), columns are states
    times = []
    fids = []
    max_trace = np.zeros(n_batch)
    max_herm = np.zeros(n_batch)
    min_eig = np.full(n_batch, np.inf)

    def record(step_index: int) -> None:
        t = step_index * step
        rhos = np.ascontiguousarray(y.T).reshape(n_batch, d, d)
        if not np.all(np.isfinite(rhos)):
            raise IntegrationError("batch state became non-finite", t)
        tr_dev, herm, eig_lo, fid = _batch_diagnostics(rhos, phi)
        times.append(t)
        fids.append(fid)
        np.maximum(max_trace, tr_dev, out=max_trace)
        np.maximum(max_herm, herm, out=max_herm)
        np.minimum(min_eig, eig_lo, out=min_eig)

    record(0)
    next_records = set(_record_steps(n_steps, stride))
    for i in range(1, n_steps + 1):
        y = propagator @ y
        if i in next_records or i == n_steps:
            record(i)

    return BatchEvolution(
        times=np.array(times),
        fidelities=np.column_stack(fids),
        max_trace_dev=max_trace,
        max_herm_defect=max_herm,
        min_eigenvalue=min_eig,
        final_states=np.ascontiguousarray(y.T).reshape(n_batch, d, d),
    )


def coherence_decoupling_diagnostic(
    model: ModelSpec,
    rho0,
    t_end: float,
    step: float | None = None,
    stride: int = DEFAULT_STRIDE,
) -> float:
    """Largest eigenbasis off-diagonal magnitude seen along a trajectory.

    The initial state must be diagonal in the model eigenbasis; the returned
    supremum measures how strongly populations couple back into coherences
    for this particular model (zero for fully classical generators).
    """
    r0 = qmat.as_complex_matrix(rho0)
    in_basis = model.eigensystem.to_eigenbasis(r0)
    off = in_basis - np.diag(np.diag(in_basis))
    if np.max(np.abs(off)) > 1e-10:
        raise ValueError("initial state is not diagonal in the model eigenbasis")
    traj = evolve(model, rho0, t_end, step=step, stride=stride)
    return float(np.max(traj.coherence_maxes))
