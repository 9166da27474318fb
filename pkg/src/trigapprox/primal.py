"""Upper bounds on the distance from chi_s e_k to trigonometric polynomials with frequencies off S.

Both solvers minimize over polynomials supported in the window of the
complement of S, so every returned value is attained by an explicit
polynomial and is a genuine upper bound on the distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _irls
from .acsets import Complement, FrequencySet, contains, window
from .groups import InvalidInput, character_matrix, character_samples
from .laspace import (
    TrigPolynomial,
    as_exponents,
    check_pair_band,
    cross_vector,
    gram_matrix,
    lalpha_norm,
    lalpha_power,
)
from .measures import SpectralMeasure

GRAM_RANK_TOL = 1e-13


class UnsupportedScenario(InvalidInput):
    """The requested combination (e.g. matrix weight with alpha != 2) has no solver."""


@dataclass
class PrimalResult:
    bound: float
    t: TrigPolynomial
    window: int
    alpha: float
    diagnostics: dict = field(default_factory=dict)


def _check_target(m: SpectralMeasure, S: FrequencySet, s, k: int):
    g = m.group
    s = g.check_frequency(s)
    if not contains(S, s, g):
        raise InvalidInput(f"s = {s!r} is not in S")
    if not 1 <= k <= m.q:
        raise InvalidInput(f"k = {k} outside 1..{m.q}")
    return s


def _target(s, k, q):
    u = np.zeros(q, dtype=complex)
    u[k - 1] = 1.0
    return TrigPolynomial({s: u}, q)


def _pinv_solve(G, b):
    vals, vecs = np.linalg.eigh(G)
    keep = vals > GRAM_RANK_TOL * max(vals.max(initial=0.0), 0.0)
    inv = np.zeros_like(vals)
    inv[keep] = 1.0 / vals[keep]
    return vecs @ (inv * (vecs.conj().T @ b)), int(keep.sum())


def primal_l2(m: SpectralMeasure, S: FrequencySet, s, k: int = 1, F: int = 16) -> PrimalResult:
    """Exact L^2(m) projection of chi_s e_k onto polynomials with frequencies in window(G \\ S, F)."""
    s = _check_target(m, S, s, k)
    q = m.q
    freqs = window(Complement(S), m.group, F)
    target = _target(s, k, q)
    target_sq = lalpha_power(target, m, 2.0)
    if not freqs:
        return PrimalResult(np.sqrt(target_sq), TrigPolynomial({}, q), F, 2.0,
                            {"method": "projection", "basis_size": 0, "rank": 0})
    check_pair_band(freqs + [s], m.group)
    G = gram_matrix(freqs, m, check_band=False)
    b = cross_vector(freqs, target, m)
    c, rank = _pinv_solve(G, b)
    t = TrigPolynomial.from_arrays(freqs, c, q)
    formula = target_sq - float(np.real(b.conj() @ c))
    if formula < -1e-9:
        raise ArithmeticError(f"projection formula went negative ({formula:.3e}); Gram solve failed")
    bound = lalpha_norm(target - t, m, 2.0)
    return PrimalResult(
        bound, t, F, 2.0,
        {
            "method": "projection",
            "basis_size": len(freqs) * q,
            "rank": rank,
            "projection_formula": float(np.sqrt(max(formula, 0.0))),
        },
    )


def primal_lalpha(
    m: SpectralMeasure,
    S: FrequencySet,
    s,
    e,
    F: int = 16,
    tol: float = 1e-9,
    max_iter: int = 500,
    floor: float = _irls.WEIGHT_FLOOR,
) -> PrimalResult:
    """Minimize ||chi_s - t||_alpha over scalar polynomials t with frequencies in window(G \\ S, F)."""
    e = as_exponents(e)
    if m.q != 1:
        if e.alpha != 2.0:
            raise UnsupportedScenario("matrix-valued weights are only supported for alpha = 2")
        raise InvalidInput("primal_lalpha takes scalar weights; use primal_l2 for matrix weights")
    s = _check_target(m, S, s, 1)
    g = m.group
    freqs = window(Complement(S), g, F)
    check_pair_band(freqs + [s], g)
    a = character_samples(s, g)
    A = character_matrix(freqs, g)
    v = m.ac.scalar / g.npoints
    if m.atoms:
        idx = np.array([i for i, _ in m.atoms])
        a = np.concatenate([a, a[idx]])
        A = np.concatenate([A, A[idx]])
        v = np.concatenate([v, [mass[0, 0].real for _, mass in m.atoms]])
    c, info = _irls.minimize_power(a, A, v, e.alpha, tol=tol, max_iter=max_iter, floor=floor)
    t = TrigPolynomial.from_arrays(freqs, c, 1)
    bound = lalpha_norm(_target(s, 1, 1) - t, m, e)
    return PrimalResult(
        bound, t, F, e.alpha,
        {
            "method": "irls",
            "iterations": info.iterations,
            "final_rel_step": info.final_rel_step,
            "converged": info.converged,
            "basis_size": len(freqs),
            "note": info.note,
        },
    )


def primal_bound(m: SpectralMeasure, S: FrequencySet, s, k: int = 1, e=2.0, F: int = 16, **opts) -> PrimalResult:
    """Dispatch to the exact alpha = 2 projection or the iterative solver."""
    e = as_exponents(e)
    if e.alpha == 2.0:
        return primal_l2(m, S, s, k, F)
    if m.q != 1:
        raise UnsupportedScenario("matrix-valued weights are only supported for alpha = 2")
    return primal_lalpha(m, S, s, e, F, **opts)

