"""Damped reweighted least squares for  min_c  sum_p v_p |a_p - (A c)_p|^p.

Each step solves a weighted least-squares system whose per-point 2x2 real
weights are the exact curvature of |r|^p (radial factor p-1, tangential 1),
i.e. a Newton step, then backtracks on the true objective so every accepted
step decreases it.  The complex unknowns are handled through their real and
imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WEIGHT_FLOOR = 1e-12


@dataclass
class IRLSInfo:
    iterations: int
    final_rel_step: float
    converged: bool
    objective: float
    note: str = ""


def _objective(a, A, v, c, p):
    r = a - A @ c
    return float(np.sum(v * np.abs(r) ** p))


def weighted_l2_solution(a, A, v):
    """Minimizer of sum v |a - A c|^2 (minimum-norm when degenerate)."""
    sq = np.sqrt(v)
    c, *_ = np.linalg.lstsq(sq[:, None] * A, sq * a, rcond=1e-13)
    return c


def minimize_power(a, A, v, p, c0=None, tol=1e-9, max_iter=500, floor=WEIGHT_FLOOR):
    """Minimize the weighted p-power residual; returns (c, IRLSInfo).

    ``a`` (P,) complex, ``A`` (P, n) complex, ``v`` (P,) nonnegative weights.
    """
    a = np.asarray(a, dtype=complex)
    A = np.asarray(A, dtype=complex)
    v = np.asarray(v, dtype=float)
    keep = v > 0
    a, A, v = a[keep], A[keep], v[keep]
    n = A.shape[1]
    if n == 0:
        return np.zeros(0, dtype=complex), IRLSInfo(0, 0.0, True, float(np.sum(v * np.abs(a) ** p)))
    c = weighted_l2_solution(a, A, v) if c0 is None else np.asarray(c0, dtype=complex)
    J = _objective(a, A, v, c, p)
    if p == 2.0:
        return c, IRLSInfo(0, 0.0, True, J, "exact quadratic")

    # real form: r_R = a_R - M x, x = [Re c, Im c]
    M = np.block([[A.real, -A.imag], [A.imag, A.real]])
    P = len(a)
    rel_step = np.inf
    note = ""
    it = 0
    for it in range(1, max_iter + 1):
        r = a - A @ c
        mod = np.abs(r)
        rho = np.maximum(mod, floor)
        coef = p * v * rho ** (p - 2.0)
        if p < 2 and np.any(mod < floor):
            note = "weight floor active"
        u = np.where(mod > 0, r / np.where(mod > 0, mod, 1.0), 0.0)
        ur, ui = u.real, u.imag
        # per-point Hessian blocks coef * (I + (p-2) u u^T)
        h11 = coef * (1.0 + (p - 2.0) * ur * ur)
        h22 = coef * (1.0 + (p - 2.0) * ui * ui)
        h12 = coef * (p - 2.0) * ur * ui
        Mr, Mi = M[:P], M[P:]
        HM_r = h11[:, None] * Mr + h12[:, None] * Mi
        HM_i = h12[:, None] * Mr + h22[:, None] * Mi
        H = Mr.T @ HM_r + Mi.T @ HM_i
        g_r = coef * r.real
        g_i = coef * r.imag
        grad = -(Mr.T @ g_r + Mi.T @ g_i)
        H = 0.5 * (H + H.T)
        shift = 1e-14 * max(np.trace(H) / H.shape[0], 1e-300)
        try:
            step = -np.linalg.solve(H + shift * np.eye(H.shape[0]), grad)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(H, grad, rcond=1e-13)[0]
        dc = step[:n] + 1j * step[n:]
        slope = float(grad @ step)
        if not slope < 0:
            rel_step = 0.0
            break
        t = 1.0
        accepted = False
        while t > 1e-12:
            trial = c + t * dc
            J_new = _objective(a, A, v, trial, p)
            if J_new <= J + 1e-4 * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted or J_new >= J:
            rel_step = 0.0
            break
        rel_step = (J - J_new) / max(J_new, 1e-300)
        c, J = trial, J_new
        if rel_step < tol:
            break
    converged = rel_step < tol
    return c, IRLSInfo(it, float(rel_step), bool(converged), J, note)
