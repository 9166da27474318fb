"""Scenario orchestration and report assembly."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import __version__
from ..acsets import Explicit, HalfLine, reduce_measure, simplify
from ..dual import SandwichViolation, dual_bound
from ..laspace import Exponents
from ..measures import moore_penrose, psd_power, restrict
from ..primal import primal_bound
from .config import Scenario

SCHEMA_VERSION = 1


def singleton_reference(W, s_is_only_member: bool, k: int, alpha: float):
    """Closed-form distance when S = {s}: the dual family is one-dimensional."""
    if not s_is_only_member:
        return None
    g = W.group
    if W.q == 1:
        e = Exponents(alpha)
        integral = float(np.sum(psd_power(W.samples, -e.beta)[:, 0, 0].real)) / g.npoints
        return integral ** (-1.0 / e.conjugate) if integral > 0 else np.inf
    if alpha != 2.0:
        return None
    return matrix_singleton_distance(W.pinv(), W.projection(), k)


def matrix_singleton_distance(Wp, P, k: int) -> float:
    """sqrt(r* B^+ r) with B = R* (mean W^+) R, R a basis of the common range of W.

    The certificate is a constant vector u with u_k = 1 that must lie in
    ran W(gamma) at every node. When W > 0 everywhere R is the identity and
    this is [e_k* (mean W^+)^+ e_k]^{1/2}.
    """
    q = Wp.shape[1]
    A = Wp.mean(axis=0)
    # projections have unit eigenvalues, so an absolute cut is safe
    vals, vecs = np.linalg.eigh(np.sum(np.eye(q) - P, axis=0))
    R = vecs[:, vals < 1e-8]
    if R.shape[1] == 0:
        return 0.0
    r = R.conj().T[:, k - 1]
    B = R.conj().T @ A @ R
    return float(np.sqrt(max(np.real(r.conj() @ moore_penrose(B) @ r), 0.0)))


def szego_reference(W, alpha: float):
    """exp(int log w / alpha): the half-line prediction error of a scalar weight on Z."""
    w = W.scalar
    if np.any(w <= 0):
        return 0.0
    return float(np.exp(np.mean(np.log(w)) / alpha))


def _references(sc: Scenario, W) -> dict:
    refs = {}
    g = sc.group
    members = None
    if isinstance(sc.S, Explicit):
        members = {g.check_frequency(x) for x in sc.S.members}
    val = singleton_reference(W, members == {sc.s}, sc.k, sc.alpha)
    if val is not None:
        refs["singleton"] = val
    simple = simplify(sc.S)
    if g.kind == "integer" and W.q == 1 and isinstance(simple, HalfLine) and simple.direction == "le" \
            and simple.bound == sc.s:
        refs["szego"] = szego_reference(W, sc.alpha)
    return refs


def run_scenario(sc: Scenario, timings: bool = False) -> dict:
    t0 = time.perf_counter()
    m = sc.measure
    reduction = {"policy": sc.reduction}
    if sc.reduction == "auto":
        used, rep = reduce_measure(m, sc.S)
        reduction.update(
            status=rep.status.verdict, rule=rep.status.reason, reduced=rep.reduced,
            dropped_atoms=rep.dropped_atoms, warning=rep.warning,
        )
    elif sc.reduction == "force-ac":
        used = restrict(m, "ac")
        reduction.update(status="forced", rule="", reduced=True, dropped_atoms=len(m.atoms), warning="")
    else:
        used = m
        reduction.update(status="forced", rule="", reduced=False, dropped_atoms=0, warning="")

    opts = {}
    if sc.alpha != 2.0:
        opts = {"tol": sc.tolerances.irls_tol, "max_iter": sc.tolerances.max_iter}
    primal = []
    for F in sc.primal_windows:
        p = primal_bound(used, sc.S, sc.s, sc.k, sc.alpha, F, **opts)
        primal.append({"window": F, "bound": p.bound, "diagnostics": _plain(p.diagnostics)})

    if reduction.get("dropped_atoms") and sc.primal_windows:
        # distance over the full measure next to the reduced one
        F = sc.primal_windows[-1]
        full = primal_bound(m, sc.S, sc.s, sc.k, sc.alpha, F, **opts).bound
        reduction["rho_full"] = full
        reduction["rho_reduced"] = primal[-1]["bound"]

    dual = []
    for H in sc.dual_windows:
        c = dual_bound(used.ac, sc.S, sc.s, sc.k, sc.alpha, H, **opts)
        entry = c.to_dict()
        entry["diagnostics"] = _plain(c.diagnostics)
        dual.append(entry)

    upper = min((p["bound"] for p in primal), default=np.inf)
    lower = max((d["lower_bound"] for d in dual), default=0.0)
    violation = lower > upper + sc.tolerances.sandwich
    gap = max(upper - lower, 0.0)
    report = {
        "scenario": sc.describe(),
        "reduction": reduction,
        "primal": primal,
        "dual": dual,
        "sandwich": {
            "lower": lower,
            "upper": upper,
            "absolute_gap": gap,
            "relative_gap": gap / upper if upper > 0 and np.isfinite(upper) else 0.0,
            "violation": bool(violation),
        },
        "references": {},
    }
    if used.has_atoms:
        report["notes"] = ["dual certificates use the absolutely continuous part; they bound the full distance from below"]
    for name, val in _references(sc, used.ac).items():
        report["references"][name] = {
            "value": val,
            "inside_sandwich": bool(lower - 1e-9 <= val <= upper + 1e-9),
        }
    if timings:
        report["timings"] = {"seconds": time.perf_counter() - t0}
    return report


def _plain(d: dict) -> dict:
    out = {}
    for key, val in d.items():
        if isinstance(val, (np.floating, np.integer)):
            val = val.item()
        elif isinstance(val, np.bool_):
            val = bool(val)
        out[key] = val
    return out


def run_all(scenarios, jobs: int = 1, timings: bool = False) -> dict:
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda sc: run_scenario(sc, timings), scenarios))
    else:
        reports = [run_scenario(sc, timings) for sc in scenarios]
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "trigapprox",
        "version": __version__,
        "scenarios": reports,
    }


def check_sandwich(doc: dict):
    for rep in doc["scenarios"]:
        if rep["sandwich"]["violation"]:
            s = rep["sandwich"]
            raise SandwichViolation(
                f"scenario {rep['scenario']['name']!r}: lower {s['lower']!r} > upper {s['upper']!r}"
            )


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, default=_json_default, allow_nan=True) + "\n"


def format_table(doc: dict) -> str:
    lines = []
    for rep in doc["scenarios"]:
        sc = rep["scenario"]
        red = rep["reduction"]
        lines.append(f"== {sc['name']}  (S = {sc['S']}, s = {sc['s']}, k = {sc['k']}, alpha = {sc['alpha']:g})")
        lines.append(f"   reduction: {red.get('status')}  {red.get('rule', '')}".rstrip())
        if red.get("warning"):
            lines.append(f"   warning: {red['warning']}")
        lines.append(f"   {'window':>8}  {'primal (upper)':>20}  {'dual (lower)':>20}")
        rows = {}
        for p in rep["primal"]:
            rows.setdefault(p["window"], [None, None])[0] = p["bound"]
        for d in rep["dual"]:
            rows.setdefault(d["window"], [None, None])[1] = d["lower_bound"]
        for w in sorted(rows):
            up, lo = rows[w]
            up_s = f"{up:.15f}" if up is not None else "-"
            lo_s = f"{lo:.15f}" if lo is not None else "-"
            lines.append(f"   {w:>8}  {up_s:>20}  {lo_s:>20}")
        s = rep["sandwich"]
        lines.append(
            f"   sandwich [{s['lower']:.12f}, {s['upper']:.12f}]  gap {s['absolute_gap']:.3e}"
            f"  (rel {s['relative_gap']:.3e}){'  VIOLATION' if s['violation'] else ''}"
        )
        for name, ref in rep["references"].items():
            inside = "inside" if ref["inside_sandwich"] else "OUTSIDE"
            lines.append(f"   reference {name}: {ref['value']:.12f} ({inside})")
    return "\n".join(lines) + "\n"
