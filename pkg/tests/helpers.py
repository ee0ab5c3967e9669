"""Shared test utilities: random matrix generators and synthetic models."""

from __future__ import annotations

import numpy as np

from dspqsl import qmat
from dspqsl.lindblad import ModelSpec


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (x + x.conj().T) / 2.0


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(x)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def charpoly_eigenvalues(h) -> np.ndarray:
    """Brute-force spectrum: roots of the characteristic polynomial."""
    roots = np.roots(np.poly(np.asarray(h, dtype=complex)))
    return np.sort(roots.real)


def dark_state_model(
    energies, target_index: int, rate: float = 1.0, source_index: int | None = None
) -> ModelSpec:
    """Diagonal-Hamiltonian model whose target eigenstate is dark.

    The single jump operator |n*><m| pumps population from a source level
    into the target and annihilates the target itself. `energies` must be
    ascending; `target_index` and the optional `source_index` are 1-based.
    """
    e = np.asarray(energies, dtype=float)
    n = e.size
    if np.any(np.diff(e) < 0):
        raise ValueError("energies must be ascending")
    slot = target_index - 1
    phi = np.zeros(n, dtype=complex)
    phi[slot] = 1.0
    h = np.diag(e).astype(complex)
    eig = qmat.hermitian_eigensystem(h, target=phi, target_index=target_index)
    if n == 1:
        jumps, rates = [], []
    else:
        src = (source_index - 1) if source_index is not None else (0 if slot != 0 else 1)
        l = np.zeros((n, n), dtype=complex)
        l[slot, src] = 1.0
        jumps, rates = [l], [rate]
    return ModelSpec(
        h_s=h,
        jump_ops=jumps,
        rates=rates,
        target=phi,
        eigensystem=eig,
        target_index=target_index,
    )


def random_distinct_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    """A populations vector with pairwise-distinct entries."""
    while True:
        lam = rng.uniform(0.05, 1.0, size=n)
        lam /= lam.sum()
        if np.unique(lam).size == n:
            return lam
