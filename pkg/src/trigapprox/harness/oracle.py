"""Brute-force distances on small cyclic groups.

Deliberately shares no code with the primal and dual solvers: the characters,
the objective and the minimizer are written out here from scratch so that
agreement with them is evidence rather than tautology.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

MAX_ORDER = 64


class OracleError(ValueError):
    pass


def _dft(n, freqs):
    gamma = np.arange(n)
    return np.exp(2j * np.pi * np.outer(gamma, np.asarray(freqs, dtype=float)) / n)


def _sqrt_psd(W):
    vals, vecs = np.linalg.eigh(W)
    vals = np.clip(vals, 0.0, None)
    return np.einsum("pij,pj,pkj->pik", vecs, np.sqrt(vals), vecs.conj())


def oracle_distance(n: int, density, in_S, s: int, k: int = 1, alpha: float = 2.0) -> float:
    """Exact distance on Z_n from chi_s e_k to polynomials with frequencies outside S.

    ``density`` holds the weight values W(gamma) for gamma = 0..n-1 (shape
    (n,), or (n, q, q)); the Haar measure gives each point mass 1/n.
    ``in_S`` is a boolean mask or a predicate over residues.
    """
    if n > MAX_ORDER:
        raise OracleError(f"oracle is limited to Z_n with n <= {MAX_ORDER}")
    W = np.asarray(density, dtype=complex)
    if W.ndim == 1:
        W = W[:, None, None]
    q = W.shape[1]
    mask = np.array([bool(in_S(x)) for x in range(n)]) if callable(in_S) else np.asarray(in_S, bool)
    s %= n
    if not mask[s]:
        raise OracleError("s must belong to S")
    others = [x for x in range(n) if not mask[x]]
    E = _dft(n, others)                       # (n, m)
    target = np.zeros((n, q), dtype=complex)
    target[:, k - 1] = np.exp(2j * np.pi * s * np.arange(n) / n)
    # unknown U has shape (m, q); t(gamma) = sum_x E[gamma, x] U[x]
    root = _sqrt_psd(W) / np.sqrt(n)

    if alpha == 2.0 or not others:
        if not others:
            # nothing to subtract: the norm of the target itself
            vals, vecs = np.linalg.eigh(W)
            proj = np.abs(np.einsum("pji,pj->pi", vecs.conj(), target)) ** 2
            pw = np.sum(np.clip(vals, 0.0, None) ** (2.0 / alpha) * proj, axis=1) ** (alpha / 2.0)
            return float((np.sum(pw) / n) ** (1.0 / alpha))
        # least squares on the stacked rows root(gamma) (target - E U)
        m = len(others)
        rows = np.zeros((n * q, m * q), dtype=complex)
        for j in range(q):
            basis = np.zeros((n, q, m * q), dtype=complex)
            basis[:, j, j::q] = E
            rows += np.einsum("pik,pkc->pic", root, basis).reshape(n * q, m * q)
        rhs = np.einsum("pij,pj->pi", root, target).reshape(-1)
        A = rows.conj().T @ rows
        b = rows.conj().T @ rhs
        U = np.linalg.lstsq(A, b, rcond=None)[0]
        resid = rhs - rows @ U
        return float(np.linalg.norm(resid))

    if q != 1:
        raise OracleError("the oracle handles alpha != 2 only for scalar weights")
    w = W[:, 0, 0].real / n
    t0 = target[:, 0]

    def objective(v):
        m = len(others)
        u = v[:m] + 1j * v[m:]
        r = t0 - E @ u
        mod = np.abs(r)
        val = np.sum(w * mod**alpha)
        # d/du* of |r|^alpha = -(alpha/2) |r|^(alpha-2) r E^*
        gfac = alpha * w * np.where(mod > 0, mod ** (alpha - 2.0), 0.0) * r
        gc = -(E.conj().T @ gfac)
        return val, np.concatenate([gc.real, gc.imag])

    # warm start from the weighted least-squares solution
    sq = np.sqrt(w)
    u0 = np.linalg.lstsq(sq[:, None] * E, sq * t0, rcond=None)[0]
    v = np.concatenate([u0.real, u0.imag])
    best = np.inf
    for _ in range(4):
        res = minimize(objective, v, jac=True, method="BFGS", options={"gtol": 1e-13, "maxiter": 20000})
        v = res.x
        if best - res.fun <= 1e-15 * max(res.fun, 1.0):
            best = min(best, res.fun)
            break
        best = res.fun
    return float(best ** (1.0 / alpha))
