"""Permutation search over initial populations.

A permutation is a tuple `perm` with `perm[k]` the input-list index of the
population placed at basis slot k (0-based internally; reports render
1-based). Scoring is (evolution-time bound, dissipated heat): the bound is
minimized first, heat breaks ties, matching the heavy-fidelity limit of the
mixed objective `objective_w`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import dsp_core

__all__ = [
    "DEFAULT_HEAT_WEIGHT",
    "MAX_ENUMERATION_DIM",
    "PermutationReport",
    "apply_permutation",
    "enumerate_permutations",
    "lexicographic_select",
    "objective_w",
    "optimal_permutation",
    "pareto_front",
    "pareto_mask",
    "passive_permutation",
]

MAX_ENUMERATION_DIM = 10

# Bound values closer than this count as tied (heat decides).
T_TIE_TOL = 1e-12

# Small heat weight: fidelity dominates but heat still registers.
DEFAULT_HEAT_WEIGHT = 0.01

Permutation = tuple[int, ...]


def _check_permutation(perm, n: int) -> Permutation:
    p = tuple(int(i) for i in perm)
    if sorted(p) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {perm}")
    return p


def apply_permutation(values, perm) -> np.ndarray:
    """Arrange values so slot k holds values[perm[k]]."""
    v = np.asarray(values, dtype=float)
    p = _check_permutation(perm, v.size)
    return v[list(p)]


def objective_w(g: float, heat: float, fidelity: float) -> float:
    """Mixed objective g*Q - (1-g)*F; g in [0, 1)."""
    if not 0.0 <= g < 1.0:
        raise ValueError(f"weighting factor g must lie in [0, 1), got {g}")
    return g * heat - (1.0 - g) * fidelity


@dataclass(frozen=True)
class PermutationReport:
    """Scores of one arrangement of the populations."""

    permutation: Permutation
    arrangement: tuple[float, ...]
    lambda_target: float
    t_qsl: float
    t_qsl_2: float
    heat: float
    entropy: float
    objective: float


def enumerate_permutations(
    populations, model, g: float = DEFAULT_HEAT_WEIGHT
) -> list[PermutationReport]:
    """Score every distinct arrangement of the population multiset.

    Arrangements produced by different index permutations of equal values
    are de-duplicated (first permutation in lexicographic order kept), so
    the result lists distinct diagonal initial states in canonical order.
    """
    lam = dsp_core.as_populations(populations)
    n = lam.size
    if n != model.dim:
        raise ValueError("population count does not match the model dimension")
    if n > MAX_ENUMERATION_DIM:
        raise ValueError(
            f"refusing to enumerate {math.factorial(n)} permutations "
            f"(dimension {n} exceeds {MAX_ENUMERATION_DIM})"
        )
    energies = model.eigensystem.eigenvalues
    e_target = model.target_energy
    a = dsp_core.coefficient_a(model)
    entropy = dsp_core.entropy_change(lam)
    slot = model.target_index - 1

    reports: dict[tuple[float, ...], PermutationReport] = {}
    for perm in itertools.permutations(range(n)):
        arrangement = tuple(float(lam[i]) for i in perm)
        if arrangement in reports:
            continue
        lam_target = arrangement[slot]
        t_qsl, t_qsl_2 = dsp_core.qsl_times_from_overlap(lam_target, a)
        heat = float(np.dot(arrangement, energies)) - e_target
        reports[arrangement] = PermutationReport(
            permutation=perm,
            arrangement=arrangement,
            lambda_target=lam_target,
            t_qsl=t_qsl,
            t_qsl_2=t_qsl_2,
            heat=heat,
            entropy=entropy,
            objective=objective_w(g, heat, lam_target),
        )
    return list(reports.values())


def optimal_permutation(populations, model) -> Permutation:
    """Largest population on the target slot, the rest decreasing in energy.

    The tail ordering mirrors a passive state over the remaining slots;
    equal values keep their input order (stable).
    """
    lam = dsp_core.as_populations(populations)
    n = lam.size
    slot = model.target_index - 1
    if not 0 <= slot < n:
        raise ValueError("model target index outside the population range")
    decreasing = np.argsort(-lam, kind="stable")
    perm: list[int | None] = [None] * n
    perm[slot] = int(decreasing[0])
    rest = (int(i) for i in decreasing[1:])
    for k in range(n):
        if perm[k] is None:
            perm[k] = next(rest)
    return tuple(perm)  # type: ignore[arg-type]


def passive_permutation(populations) -> Permutation:
    """All populations decreasing against increasing energy (minimal heat)."""
    lam = dsp_core.as_populations(populations)
    return tuple(int(i) for i in np.argsort(-lam, kind="stable"))


def lexicographic_select(reports: list[PermutationReport]) -> PermutationReport:
    """Minimal time bound first, then minimal heat, then permutation order."""
    if not reports:
        raise ValueError("no permutation reports to select from")
    t_min = min(r.t_qsl for r in reports)
    pool = [r for r in reports if r.t_qsl <= t_min + T_TIE_TOL]
    q_min = min(r.heat for r in pool)
    pool = [r for r in pool if r.heat == q_min]
    return min(pool, key=lambda r: r.permutation)


def pareto_mask(reports: list[PermutationReport]) -> np.ndarray:
    """Boolean mask of reports not dominated in (t_qsl, heat) minimization."""
    t = np.array([r.t_qsl for r in reports])
    q = np.array([r.heat for r in reports])
    mask = np.ones(len(reports), dtype=bool)
    for i in range(len(reports)):
        dominated = (t <= t[i]) & (q <= q[i]) & ((t < t[i]) | (q < q[i]))
        mask[i] = not bool(np.any(dominated))
    return mask


def pareto_front(reports: list[PermutationReport]) -> list[PermutationReport]:
    """The non-dominated reports, in the input (canonical) order."""
    mask = pareto_mask(reports)
    return [r for r, keep in zip(reports, mask) if keep]
