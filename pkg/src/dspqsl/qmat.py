"""Dense complex linear algebra for small Hermitian problems.

Everything operates on plain numpy arrays: kets are 1-d complex arrays,
operators are square 2-d complex arrays. The intended regime is tiny
dense matrices (dim <= ~16, nothing beyond ~64), so clarity wins over
asymptotic tricks throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "EigenSystem",
    "ValidityReport",
    "as_complex_matrix",
    "as_ket",
    "frobenius_norm",
    "hermitian_eigensystem",
    "hermiticity_defect",
    "trace_product",
    "validate_density_matrix",
]

# Relative Hermiticity defect accepted by the eigensolver.
HERMITICITY_RTOL = 1e-12

# Eigenvalue gap below which neighbouring eigenvalues count as one
# degenerate cluster.
DEGENERACY_GAP = 1e-9


class ConvergenceError(RuntimeError):
    """Jacobi sweeps exhausted before the off-diagonal mass vanished."""


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_ket(v, norm_floor: float = 1e-12) -> np.ndarray:
    """Coerce to an explicitly normalized complex state vector."""
    k = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(k)):
        raise ValueError("ket amplitudes must be finite")
    norm = float(np.linalg.norm(k))
    if norm < norm_floor:
        raise ValueError("cannot normalize a (near-)zero vector")
    return k / norm


def frobenius_norm(m) -> float:
    """Frobenius norm sqrt(Tr(M^dag M))."""
    return float(np.linalg.norm(np.asarray(m, dtype=complex)))


def hermiticity_defect(m) -> float:
    """Frobenius norm of M - M^dag."""
    a = np.asarray(m, dtype=complex)
    return float(np.linalg.norm(a - a.conj().T))


def trace_product(a, b) -> complex:
    """Tr(A B), the Hilbert-Schmidt pairing (relative purity for states).

    Real within roundoff when both arguments are Hermitian.
    """
    am = as_complex_matrix(a)
    bm = as_complex_matrix(b)
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    # Tr(AB) = sum_ij A_ij B_ji
    return complex(np.sum(am * bm.T))


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with matched orthonormal eigenvector columns."""

    eigenvalues: np.ndarray  # (dim,) real, ascending
    vectors: np.ndarray      # (dim, dim) complex; column k pairs with eigenvalues[k]

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def vector(self, index: int) -> np.ndarray:
        """Eigenvector at 1-based position `index` in the ascending order."""
        if not 1 <= index <= self.dim:
            raise IndexError(f"eigenvector index {index} outside 1..{self.dim}")
        return self.vectors[:, index - 1]

    def to_eigenbasis(self, m) -> np.ndarray:
        """Represent an operator in this eigenbasis: V^dag M V."""
        return self.vectors.conj().T @ as_complex_matrix(m) @ self.vectors

    def from_eigenbasis(self, m) -> np.ndarray:
        """Map an eigenbasis representation back: V M V^dag."""
        return self.vectors @ as_complex_matrix(m) @ self.vectors.conj().T


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] with a complex Jacobi rotation, updating a and v in place."""
    apq = a[p, q]
    mag = abs(apq)
    phase = apq / mag
    theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    # Smaller root of t^2 - 2*theta*t - 1 = 0 for a stable rotation angle.
    t = -math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c

    # Right-multiply by the rotation U (columns p, q).
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p + s * np.conj(phase) * col_q
    a[:, q] = -s * phase * col_p + c * col_q
    # Left-multiply by U^dag (rows p, q).
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p + s * phase * row_q
    a[q, :] = -s * np.conj(phase) * row_p + c * row_q
    # The rotation is constructed to annihilate this pair exactly.
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vec_p = v[:, p].copy()
    vec_q = v[:, q].copy()
    v[:, p] = c * vec_p + s * np.conj(phase) * vec_q
    v[:, q] = -s * phase * vec_p + c * vec_q


def _degenerate_clusters(values: np.ndarray, gap: float) -> list[tuple[int, int]]:
    """Half-open index ranges of eigenvalues closer than `gap` to a neighbour."""
    clusters = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] >= gap:
            clusters.append((start, i))
            start = i
    return clusters


def _align_cluster_to_target(
    vals: np.ndarray,
    vecs: np.ndarray,
    target: np.ndarray,
    target_index: int | None,
) -> None:
    """Rotate the degenerate cluster holding most of `target` onto it.

    Within the chosen cluster one basis vector is replaced by the normalized
    projection of the target, placed at `target_index` (1-based) when that
    slot lies inside the cluster, and the remaining vectors are rebuilt by
    Gram-Schmidt so the cluster stays orthonormal.
    """
    clusters = [c for c in _degenerate_clusters(vals, DEGENERACY_GAP) if c[1] - c[0] > 1]
    if not clusters:
        return
    weights = []
    for lo, hi in clusters:
        overlaps = vecs[:, lo:hi].conj().T @ target
        weights.append(float(np.sum(np.abs(overlaps) ** 2)))
    best = int(np.argmax(weights))
    if weights[best] < 1e-12:
        return
    lo, hi = clusters[best]
    block = vecs[:, lo:hi]
    overlaps = block.conj().T @ target
    proj = block @ overlaps
    w = proj / np.linalg.norm(proj)

    # Orthonormal completion of the cluster span against w.
    basis = [w]
    for k in range(block.shape[1]):
        r = block[:, k].copy()
        for b in basis:
            r -= b * (b.conj() @ r)
        norm = np.linalg.norm(r)
        if norm > 1e-8:
            basis.append(r / norm)
        if len(basis) == block.shape[1]:
            break

    if target_index is not None and lo <= target_index - 1 < hi:
        slot = target_index - 1
    else:
        slot = lo + int(np.argmax(np.abs(overlaps)))
    others = iter(basis[1:])
    for k in range(lo, hi):
        vecs[:, k] = w if k == slot else next(others)


def _fix_phases(vecs: np.ndarray, skip: int | None = None) -> None:
    """Make the largest-magnitude component of each column real positive."""
    for k in range(vecs.shape[1]):
        if k == skip:
            continue
        col = vecs[:, k]
        lead = col[int(np.argmax(np.abs(col)))]
        if abs(lead) > 0:
            vecs[:, k] = col * (np.conj(lead) / abs(lead))


def hermitian_eigensystem(
    m,
    target=None,
    target_index: int | None = None,
    *,
    max_sweeps: int = 100,
    off_tol: float = 1e-13,
) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius mass drops below `off_tol`
    (relative to the matrix scale) or `max_sweeps` is exhausted. Eigenvalues
    come out ascending. Degenerate clusters (gap < 1e-9) are rotated so that,
    when `target` is given, a single basis vector carries the full projection
    of the target and sits at the 1-based `target_index` if that slot falls
    inside the cluster. Output is deterministic for identical input.

    Raises ValueError for non-Hermitian input (with the asymmetry norm) and
    ConvergenceError if the sweep budget runs out.
    """
    a = as_complex_matrix(m).copy()
    n = a.shape[0]
    scale = frobenius_norm(a)
    defect = hermiticity_defect(a)
    if defect > HERMITICITY_RTOL * max(1.0, scale):
        raise ValueError(
            f"matrix is not Hermitian: ||M - M^dag||_F = {defect:.3e} "
            f"(relative tolerance {HERMITICITY_RTOL})"
        )
    a = (a + a.conj().T) / 2.0
    v = np.eye(n, dtype=complex)

    threshold = off_tol * max(1.0, scale)
    skip_below = threshold / max(n * n, 1)
    off = _offdiag_norm(a)
    sweeps = 0
    while off > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"no convergence after {max_sweeps} sweeps; "
                f"off-diagonal norm {off:.3e} (threshold {threshold:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > skip_below:
                    _jacobi_rotate(a, v, p, q)
        sweeps += 1
        off = _offdiag_norm(a)

    vals = np.diag(a).real.copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order]

    # Re-orthonormalize degenerate clusters (harmless polish elsewhere).
    for lo, hi in _degenerate_clusters(vals, DEGENERACY_GAP):
        if hi - lo > 1:
            vecs[:, lo:hi] = np.linalg.qr(vecs[:, lo:hi])[0]

    aligned_slot = None
    if target is not None:
        phi = as_ket(target)
        if phi.shape[0] != n:
            raise ValueError("target dimension does not match the matrix")
        _align_cluster_to_target(vals, vecs, phi, target_index)
        overlaps = np.abs(vecs.conj().T @ phi)
        aligned_slot = int(np.argmax(overlaps))
    _fix_phases(vecs, skip=aligned_slot)

    system = EigenSystem(eigenvalues=vals, vectors=vecs)
    _check_eigensystem(as_complex_matrix(m), system)
    return system


def _check_eigensystem(m: np.ndarray, system: EigenSystem) -> None:
    scale = max(1.0, frobenius_norm(m))
    unitarity = system.vectors.conj().T @ system.vectors - np.eye(system.dim)
    if np.linalg.norm(unitarity) > 1e-10 * scale:
        raise ConvergenceError("eigenvector matrix lost orthonormality")
    residual = m @ system.vectors - system.vectors * system.eigenvalues
    if np.linalg.norm(residual) > 1e-9 * scale:
        raise ConvergenceError(
            f"eigenpair residual {np.linalg.norm(residual):.3e} too large"
        )


@dataclass(frozen=True)
class ValidityReport:
    """Density-matrix health check: how far from Hermitian/unit-trace/PSD."""

    hermiticity_defect: float
    trace_deviation: float
    min_eigenvalue: float
    tol: float

    @property
    def passes(self) -> bool:
        return (
            self.hermiticity_defect <= self.tol
            and self.trace_deviation <= self.tol
            and self.min_eigenvalue >= -self.tol
        )


def validate_density_matrix(rho, tol: float = 1e-10) -> ValidityReport:
    """Report Hermiticity defect, trace deviation and the lowest eigenvalue.

    Never raises for unhealthy states; the caller reads `passes`.
    """
    r = as_complex_matrix(rho)
    defect = hermiticity_defect(r)
    trace_dev = abs(complex(np.trace(r)) - 1.0)
    herm = (r + r.conj().T) / 2.0
    min_eig = float(hermitian_eigensystem(herm).eigenvalues[0])
    return ValidityReport(
        hermiticity_defect=float(defect),
        trace_deviation=float(trace_dev),
        min_eigenvalue=min_eig,
        tol=float(tol),
    )
