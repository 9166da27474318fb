"""Certified lower bounds on the distance via dual trigonometric certificates.

A certificate is a trigonometric polynomial h supported on S (so its
conjugated Fourier coefficients vanish on all of G \\ S, not just inside a
window) with the coefficient at s pinned to 1.  Hoelder's inequality then
gives  d >= 1 / F(h)  where

    F(h) = [ int |h|^{alpha'} (w^+)^beta d lambda ]^{1/alpha'}      (scalar)
    F(h) = [ int h^* W^+ h d lambda ]^{1/2}                          (matrix, alpha = 2)

and the best certificate attains d.  h must vanish (pointwise on the grid)
off the range of the weight, otherwise the inequality breaks; this is imposed
as a linear constraint while optimizing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import _irls
from .acsets import FrequencySet, contains, window
from .groups import GroupSpec, InvalidInput, character_matrix, character_samples
from .laspace import TrigPolynomial, as_exponents, check_pair_band, design_matrix, gram_matrix
from .measures import DEFAULT_RANK_TOL, MatrixWeight, SpectralMeasure, pinv_stack, psd_power
from .primal import PrimalResult, UnsupportedScenario

FEASIBILITY_TOL = 1e-10
SANDWICH_TOL = 1e-9


class InfeasibleCertificate(InvalidInput):
    def __init__(self, residuals: dict):
        self.residuals = residuals
        super().__init__(f"certificate is not dual feasible: {residuals}")


class SandwichViolation(ArithmeticError):
    """A certified lower bound exceeded an attained upper bound."""


@dataclass
class DualCertificate:
    h: Optional[TrigPolynomial]
    objective: float
    bound: float
    lower_bound: float
    quadrature_error: float
    residuals: dict
    window: int
    s: object
    k: int = 1
    alpha: float = 2.0
    status: str = "ok"
    diagnostics: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return self.h is None

    def to_dict(self) -> dict:
        coeffs = []
        if self.h is not None:
            for x in self.h.support:
                u = self.h.coeffs[x]
                coeffs.append({
                    "frequency": list(x) if isinstance(x, tuple) else x,
                    "coefficient": [[float(z.real), float(z.imag)] for z in u],
                })
        return {
            "status": self.status,
            "s": list(self.s) if isinstance(self.s, tuple) else self.s,
            "k": self.k,
            "alpha": self.alpha,
            "window": self.window,
            "objective": self.objective,
            "bound": self.bound,
            "lower_bound": self.lower_bound,
            "quadrature_error": self.quadrature_error,
            "residuals": self.residuals,
            "coefficients": coeffs,
        }


def _empty(s, k, alpha, H, reason):
    return DualCertificate(None, np.inf, 0.0, 0.0, 0.0, {}, H, s, k, alpha, "empty", {"reason": reason})


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

def dual_objective_power(h, W: MatrixWeight, e, rel_tol: float = DEFAULT_RANK_TOL) -> float:
    """F(h)^{alpha'} on the grid of W (the matrix form requires alpha = 2)."""
    e = as_exponents(e)
    g = W.group
    values = h.on_grid(g) if isinstance(h, TrigPolynomial) else np.asarray(h, dtype=complex).reshape(g.npoints, W.q)
    if W.q == 1:
        dual_w = psd_power(W.samples, -e.beta, rel_tol)[:, 0, 0].real
        return float(np.sum(np.abs(values[:, 0]) ** e.conjugate * dual_w)) / g.npoints
    if e.alpha != 2.0:
        raise UnsupportedScenario("matrix-valued dual functional is only defined for alpha = 2")
    Wp = pinv_stack(W.samples, rel_tol)
    return float(np.real(np.einsum("pi,pij,pj->", values.conj(), Wp, values))) / g.npoints


def dual_objective(h, W: MatrixWeight, e, rel_tol: float = DEFAULT_RANK_TOL) -> float:
    e = as_exponents(e)
    return dual_objective_power(h, W, e, rel_tol) ** (1.0 / e.conjugate)


def pinned_value(h: TrigPolynomial, s, k: int = 1) -> complex:
    """(h^*)^check(s) e_k, the conjugated k-th coefficient of h at s."""
    return complex(np.conj(h.coefficient(s)[k - 1]))


def feasibility_residuals(h: TrigPolynomial, S: FrequencySet, s, k: int, W: MatrixWeight,
                          rel_tol: float = DEFAULT_RANK_TOL) -> dict:
    """Pinned-coefficient error, largest coefficient off S, and largest off-carrier value."""
    g = W.group
    off_s = [x for x in h.support if not contains(S, x, g)]
    vanishing = max((float(np.abs(h.coeffs[x]).max()) for x in off_s), default=0.0)
    values = h.on_grid(g)
    proj = W.projection(rel_tol)
    stray = values - np.einsum("pij,pj->pi", proj, values)
    return {
        "pinned": abs(pinned_value(h, s, k) - 1.0),
        "vanishing": vanishing,
        "carrier": float(np.abs(stray).max(initial=0.0)),
    }


def _is_feasible(res: dict) -> bool:
    scale = FEASIBILITY_TOL
    return res["pinned"] <= scale and res["vanishing"] <= scale and res["carrier"] <= 1e-8


def _reference_weight(W: MatrixWeight) -> tuple:
    """Weight on a second grid for the quadrature-error estimate, or (None, reason)."""
    g = W.group
    if g.is_exact:
        return None, "exact group"
    fine = W.resample(g.refined(2))
    if fine is not None:
        return fine, "refined grid"
    if g.kind == "integer" and g.size % 2 == 0 and g.size >= 8:
        coarse = GroupSpec(g.kind, g.size // 2)
        return MatrixWeight(coarse, W.samples[::2], W.name), "half grid"
    return None, "no reference grid"


def _finish(h, W, e, s, k, H, extra) -> DualCertificate:
    e = as_exponents(e)
    power = dual_objective_power(h, W, e)
    if not np.isfinite(power) or power <= 0:
        return DualCertificate(h, np.inf, 0.0, 0.0, 0.0, extra.pop("residuals", {}), H, s, k, e.alpha,
                               "non-integrable", extra)
    F = power ** (1.0 / e.conjugate)
    bound = 1.0 / F
    ref, how = _reference_weight(W)
    err = 0.0
    status = "ok"
    if ref is not None:
        ref_power = dual_objective_power(h, ref, e)
        if not np.isfinite(ref_power):
            status = "non-integrable"
        elif ref_power > 0:
            err = abs(bound - ref_power ** (-1.0 / e.conjugate))
    extra["quadrature_reference"] = how
    lower = 0.0 if status != "ok" else max(bound - err, 0.0)
    return DualCertificate(h, F, bound, lower, err, extra.pop("residuals"), H, s, k, e.alpha, status, extra)


def dual_value_scalar(h: Optional[TrigPolynomial], w: MatrixWeight, e, S: FrequencySet, s) -> tuple:
    """(F(h), lower bound 1/F(h)) for a given certificate; ``h=None`` stands for an empty family.

    Raises InfeasibleCertificate when h is not pinned to 1 at s, has
    coefficients off S, or is nonzero where w vanishes.
    """
    e = as_exponents(e)
    if w.q != 1:
        raise InvalidInput("dual_value_scalar needs a scalar weight")
    if h is None:
        return np.inf, 0.0
    s = w.group.check_frequency(s)
    res = feasibility_residuals(h, S, s, 1, w)
    if not _is_feasible(res):
        raise InfeasibleCertificate(res)
    F = dual_objective(h, w, e)
    if not np.isfinite(F):
        return np.inf, 0.0
    return F, 1.0 / F


# ---------------------------------------------------------------------------
# optimization
# ---------------------------------------------------------------------------

def _deficient_nodes(W: MatrixWeight, rel_tol=DEFAULT_RANK_TOL):
    proj = W.projection(rel_tol)
    comp = np.eye(W.q)[None] - proj
    bad = np.where(np.abs(comp).max(axis=(1, 2)) > 1e-12)[0]
    return bad, comp[bad]


def _support(S, g, s, H):
    freqs = window(S, g, H)
    return freqs if s in freqs else None


def dual_maximize_matrix(W: MatrixWeight, S: FrequencySet, s, k: int = 1, H: int = 16) -> DualCertificate:
    """Best certificate supported in window(S, H) for alpha = 2 (any q), via the KKT system."""
    g, q = W.group, W.q
    s = g.check_frequency(s)
    if not contains(S, s, g):
        raise InvalidInput(f"s = {s!r} is not in S")
    if not 1 <= k <= q:
        raise InvalidInput(f"k = {k} outside 1..{q}")
    freqs = _support(S, g, s, H)
    if freqs is None:
        return _empty(s, k, 2.0, H, "window does not contain s")
    check_pair_band(freqs, g)
    dual_measure = SpectralMeasure(MatrixWeight(g, W.pinv(), "pinv"))
    Q = gram_matrix(freqs, dual_measure, check_band=False)
    n = Q.shape[0]
    rows, rhs = [], []
    pin = np.zeros(n, dtype=complex)
    pin[freqs.index(s) * q + (k - 1)] = 1.0
    rows.append(pin[None])
    rhs.append(np.ones(1, dtype=complex))
    bad, comp = _deficient_nodes(W)
    if len(bad):
        D = design_matrix(freqs, g, q)[bad]  # (nb, q, n)
        C = np.einsum("bij,bjn->bin", comp, D).reshape(-1, n)
        rows.append(C)
        rhs.append(np.zeros(C.shape[0], dtype=complex))
    C = np.concatenate(rows)
    d = np.concatenate(rhs)
    m = C.shape[0]
    K = np.block([[Q, C.conj().T], [C, np.zeros((m, m))]])
    sol, *_ = np.linalg.lstsq(K, np.concatenate([np.zeros(n), d]), rcond=1e-13)
    c = sol[:n]
    if np.abs(C @ c - d).max() > FEASIBILITY_TOL:
        return _empty(s, k, 2.0, H, "constraints are inconsistent inside the window")
    h = TrigPolynomial.from_arrays(freqs, c.reshape(len(freqs), q), q)
    # snap the pinned entry, which the solve reproduces only to rounding
    u = np.array(h.coefficient(s))
    u[k - 1] = 1.0
    coeffs = dict(h.coeffs)
    coeffs[s] = u
    h = TrigPolynomial(coeffs, q)
    res = feasibility_residuals(h, S, s, k, W)
    if not _is_feasible(res):
        return _empty(s, k, 2.0, H, f"solution violates constraints: {res}")
    return _finish(h, W, 2.0, s, k, H, {"residuals": res, "method": "kkt", "constraints": m})


def dual_maximize_scalar(w: MatrixWeight, S: FrequencySet, s, e, H: int = 16,
                         tol: float = 1e-9, max_iter: int = 500) -> DualCertificate:
    """Best scalar certificate supported in window(S, H) for any alpha in (1, inf)."""
    e = as_exponents(e)
    if w.q != 1:
        raise InvalidInput("dual_maximize_scalar needs a scalar weight")
    if e.alpha == 2.0:
        return dual_maximize_matrix(w, S, s, 1, H)
    g = w.group
    s = g.check_frequency(s)
    if not contains(S, s, g):
        raise InvalidInput(f"s = {s!r} is not in S")
    freqs = _support(S, g, s, H)
    if freqs is None:
        return _empty(s, 1, e.alpha, H, "window does not contain s")
    check_pair_band(freqs, g)
    free = [x for x in freqs if x != s]
    base = character_samples(s, g)
    Phi = character_matrix(free, g)
    zero = np.where(w.scalar <= 0)[0]
    c0 = np.zeros(len(free), dtype=complex)
    N = np.eye(len(free), dtype=complex)
    if len(zero):
        # h = 0 where w = 0:  Phi[zero] c = -base[zero]
        Cz = Phi[zero]
        c0, *_ = np.linalg.lstsq(Cz, -base[zero], rcond=1e-13)
        if np.abs(Cz @ c0 + base[zero]).max(initial=0.0) > FEASIBILITY_TOL:
            return _empty(s, 1, e.alpha, H, "carrier constraints are inconsistent inside the window")
        N = scipy.linalg.null_space(Cz, rcond=1e-13) if len(free) else N
    dual_w = psd_power(w.samples, -e.beta)[:, 0, 0].real / g.npoints
    a = base + Phi @ c0
    z, info = _irls.minimize_power(a, -(Phi @ N), dual_w, e.conjugate, tol=tol, max_iter=max_iter)
    c = c0 + N @ z
    h = TrigPolynomial.from_arrays(free, c, 1) + TrigPolynomial.character(s)
    res = feasibility_residuals(h, S, s, 1, w)
    if not _is_feasible(res):
        return _empty(s, 1, e.alpha, H, f"solution violates constraints: {res}")
    extra = {
        "residuals": res,
        "method": "irls",
        "iterations": info.iterations,
        "final_rel_step": info.final_rel_step,
        "converged": info.converged,
    }
    return _finish(h, w, e, s, 1, H, extra)


def dual_bound(W: MatrixWeight, S: FrequencySet, s, k: int = 1, e=2.0, H: int = 16, **opts) -> DualCertificate:
    e = as_exponents(e)
    if W.q == 1:
        return dual_maximize_scalar(W, S, s, e, H, **opts)
    if e.alpha != 2.0:
        raise UnsupportedScenario("matrix-valued weights are only supported for alpha = 2")
    return dual_maximize_matrix(W, S, s, k, H)


# ---------------------------------------------------------------------------
# density and reporting
# ---------------------------------------------------------------------------

@dataclass
class DensityReport:
    dense: Optional[bool]  # False when a witness was found, None when inconclusive
    witness: Optional[DualCertificate]
    searched: int
    window: int

    @property
    def verdict(self) -> str:
        return "not dense" if self.dense is False else "inconclusive"


def density_check(W: MatrixWeight, S: FrequencySet, e=2.0, H_max: int = 8) -> DensityReport:
    """Look for a nonzero dual certificate; finding one proves T(G \\ S) is not dense."""
    e = as_exponents(e)
    searched = 0
    for s in window(S, W.group, H_max):
        for k in range(1, W.q + 1):
            searched += 1
            cert = dual_bound(W, S, s, k, e, H_max)
            if not cert.empty and cert.status == "ok" and cert.lower_bound > 1e-10:
                return DensityReport(False, cert, searched, H_max)
    return DensityReport(None, None, searched, H_max)


def gap_report(p: PrimalResult, c: DualCertificate, tol: float = SANDWICH_TOL) -> dict:
    upper, lower = float(p.bound), float(c.lower_bound)
    if lower > upper + tol:
        raise SandwichViolation(f"certified lower bound {lower!r} exceeds upper bound {upper!r}")
    gap = max(upper - lower, 0.0)
    return {
        "upper": upper,
        "lower": lower,
        "absolute_gap": gap,
        "relative_gap": gap / upper if upper > 0 else 0.0,
    }
