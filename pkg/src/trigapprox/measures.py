"""Lebesgue-decomposed spectral measures and the pseudoinverse algebra they need.

A measure is stored as its absolutely continuous part (a PSD matrix density
sampled on the grid of the dual group) plus a finite list of atoms sitting on
grid nodes.  No decomposition is ever computed; the representation is the
decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .groups import GroupSpec, InvalidInput

DEFAULT_RANK_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10


def _as_square(H) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim == 0:
        H = H.reshape(1, 1)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {H.shape}")
    return H


def _check_hermitian(H: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(H), initial=0.0)))
    if np.max(np.abs(H - np.swapaxes(H, -1, -2).conj()), initial=0.0) > HERMITIAN_TOL * scale:
        raise InvalidInput("matrix is not Hermitian")


def _eigh(H, rel_tol):
    """Eigen-decomposition of a (stack of) Hermitian PSD matrices with small eigenvalues zeroed."""
    vals, vecs = np.linalg.eigh(H)
    top = vals.max(axis=-1, keepdims=True)
    vals = np.where(vals > rel_tol * np.maximum(top, 0.0), vals, 0.0)
    return vals, vecs


def _recompose(vals, vecs):
    return np.einsum("...ij,...j,...kj->...ik", vecs, vals, vecs.conj())


def moore_penrose(H, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a Hermitian PSD matrix.

    Eigenvalues at or below ``rel_tol`` times the largest one count as zero.
    """
    H = _as_square(H)
    _check_hermitian(H)
    if H.shape[0] == 1:
        w = H[0, 0].real
        return np.array([[1.0 / w if w > 0 else 0.0]], dtype=complex)
    vals, vecs = _eigh(H, rel_tol)
    inv = np.divide(1.0, vals, out=np.zeros_like(vals), where=vals > 0)
    return _recompose(inv, vecs)


def range_projection(H, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthoprojection onto the range of a Hermitian PSD matrix."""
    H = _as_square(H)
    _check_hermitian(H)
    vals, vecs = _eigh(H, rel_tol)
    return _recompose((vals > 0).astype(float), vecs)


def psd_power(W: np.ndarray, p: float, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Entrywise-in-the-stack matrix power W**p on the range of W (zero on its kernel).

    Negative ``p`` gives powers of the pseudoinverse.  ``W`` has shape (..., q, q).
    """
    W = np.asarray(W, dtype=complex)
    if W.shape[-1] == 1:
        w = W[..., 0, 0].real
        out = np.zeros_like(w)
        pos = w > 0
        out[pos] = w[pos] ** p
        return out[..., None, None].astype(complex)
    vals, vecs = _eigh(W, rel_tol)
    powed = np.zeros_like(vals)
    pos = vals > 0
    powed[pos] = vals[pos] ** p
    return _recompose(powed, vecs)


def pinv_stack(W, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    return psd_power(W, -1.0, rel_tol)


def projection_stack(W, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    W = np.asarray(W, dtype=complex)
    if W.shape[-1] == 1:
        return (W[..., 0, 0].real > 0).astype(complex)[..., None, None]
    vals, vecs = _eigh(W, rel_tol)
    return _recompose((vals > 0).astype(float), vecs)


def _clean_psd(samples: np.ndarray) -> np.ndarray:
    """Symmetrize and clip tiny negative eigenvalues; reject genuinely indefinite samples."""
    _check_hermitian(samples)
    samples = 0.5 * (samples + np.swapaxes(samples, -1, -2).conj())
    if samples.shape[-1] == 1:
        w = samples[..., 0, 0].real
        if np.any(w < -PSD_TOL * max(float(w.max(initial=0.0)), 1e-300)):
            raise InvalidInput("weight takes negative values")
        return np.maximum(w, 0.0)[..., None, None].astype(complex)
    vals, vecs = np.linalg.eigh(samples)
    top = np.maximum(vals.max(axis=-1, keepdims=True), 0.0)
    if np.any(vals < -PSD_TOL * np.maximum(top, 1e-300)):
        raise InvalidInput("weight sample is not positive semidefinite")
    if np.all(vals >= 0):
        return samples
    return _recompose(np.maximum(vals, 0.0), vecs)


@dataclass(frozen=True)
class MatrixWeight:
    """A PSD matrix density W sampled on the grid of ``group``.

    ``family`` optionally regenerates the samples on any other grid of the same
    group kind, which is what quadrature-error estimates use.
    """

    group: GroupSpec
    samples: np.ndarray
    name: str = "table"
    family: Optional[Callable[[GroupSpec], np.ndarray]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim == 1:
            s = s[:, None, None]
        if s.ndim != 3 or s.shape[1] != s.shape[2] or s.shape[0] != self.group.npoints:
            raise InvalidInput(
                f"weight samples must have shape ({self.group.npoints}, q, q), got {s.shape}"
            )
        s = _clean_psd(s)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def q(self) -> int:
        return self.samples.shape[1]

    @property
    def scalar(self) -> np.ndarray:
        if self.q != 1:
            raise InvalidInput("scalar view requested for a matrix weight")
        return self.samples[:, 0, 0].real

    def resample(self, group: GroupSpec) -> Optional["MatrixWeight"]:
        if group == self.group:
            return self
        if self.family is None:
            return None
        return MatrixWeight(group, self.family(group), self.name, self.family)

    def pinv(self, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
        return pinv_stack(self.samples, rel_tol)

    def projection(self, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
        return projection_stack(self.samples, rel_tol)


def _check_mass(mass, q) -> np.ndarray:
    mass = _as_square(mass)
    if mass.shape[0] != q:
        raise InvalidInput(f"atom mass must be {q}x{q}, got {mass.shape}")
    _check_hermitian(mass)
    mass = 0.5 * (mass + mass.conj().T)
    vals = np.linalg.eigvalsh(mass)
    if vals.min() < -PSD_TOL * max(vals.max(), 1e-300):
        raise InvalidInput("atom mass is not positive semidefinite")
    return mass


@dataclass(frozen=True)
class SpectralMeasure:
    """M = W d(lambda) + sum_j mass_j delta_{gamma_j}, atoms at grid indices.

    On a finite group every point has positive Haar mass, so atoms are folded
    into the density on construction and the singular part is always empty.
    """

    ac: MatrixWeight
    atoms: tuple = ()

    def __post_init__(self):
        g = self.ac.group
        cleaned = {}
        for idx, mass in self.atoms:
            if int(idx) != idx or not 0 <= idx < g.npoints:
                raise InvalidInput(f"atom location {idx!r} is not a grid node of {g}")
            if int(idx) in cleaned:
                raise InvalidInput(f"duplicate atom location {idx}")
            cleaned[int(idx)] = _check_mass(mass, self.ac.q)
        if g.is_exact and cleaned:
            dens = np.array(self.ac.samples)
            for idx, mass in cleaned.items():
                dens[idx] += g.npoints * mass
            object.__setattr__(self, "ac", MatrixWeight(g, dens, self.ac.name + "+atoms"))
            cleaned = {}
        object.__setattr__(self, "atoms", tuple(sorted(cleaned.items())))

    @property
    def group(self) -> GroupSpec:
        return self.ac.group

    @property
    def q(self) -> int:
        return self.ac.q

    @property
    def has_atoms(self) -> bool:
        return bool(self.atoms)


def normalize_equivalence(f, W: MatrixWeight, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Project a grid function pointwise onto ran W(gamma); f has shape (npoints, q) or (npoints,)."""
    f = np.asarray(f, dtype=complex)
    scalar = f.ndim == 1
    if scalar:
        f = f[:, None]
    if f.shape != (W.group.npoints, W.q):
        raise InvalidInput(f"function shape {f.shape} does not match weight ({W.group.npoints}, {W.q})")
    out = np.einsum("pij,pj->pi", W.projection(rel_tol), f)
    return out[:, 0] if scalar else out


def restrict(m: SpectralMeasure, part: str) -> SpectralMeasure:
    """Keep only the absolutely continuous (``"ac"``) or singular (``"singular"``) component."""
    if part == "ac":
        return SpectralMeasure(m.ac, ())
    if part == "singular":
        g = m.group
        zero = MatrixWeight(g, np.zeros((g.npoints, m.q, m.q)), "zero")
        return SpectralMeasure(zero, m.atoms)
    raise InvalidInput(f"unknown part {part!r}; use 'ac' or 'singular'")


def add_measures(a: SpectralMeasure, b: SpectralMeasure) -> SpectralMeasure:
    if a.group != b.group or a.q != b.q:
        raise InvalidInput("measures live on different groups or dimensions")
    atoms = dict(a.atoms)
    for idx, mass in b.atoms:
        atoms[idx] = atoms.get(idx, 0) + mass
    ac = MatrixWeight(a.group, a.ac.samples + b.ac.samples, f"{a.ac.name}+{b.ac.name}")
    return SpectralMeasure(ac, tuple(atoms.items()))


# ---------------------------------------------------------------------------
# weight families
# ---------------------------------------------------------------------------

def _scalar_angles(g: GroupSpec) -> np.ndarray:
    if g.kind == "lattice2":
        raise InvalidInput("this weight family needs a one-dimensional dual group")
    return g.angles


def constant_weight(g: GroupSpec, value=1.0) -> MatrixWeight:
    value = _as_square(value)

    def family(grid):
        return np.broadcast_to(value, (grid.npoints,) + value.shape).copy()

    return MatrixWeight(g, family(g), "constant", family)


def polynomial_modulus_weight(g: GroupSpec, coeffs) -> MatrixWeight:
    """w(theta) = |a_0 + a_1 e^{i theta} + ... + a_p e^{i p theta}|^2."""
    coeffs = np.asarray(coeffs, dtype=complex)

    def family(grid):
        theta = _scalar_angles(grid)
        a = np.polynomial.polynomial.polyval(np.exp(1j * theta), coeffs)
        return (np.abs(a) ** 2).astype(complex)[:, None, None]

    return MatrixWeight(g, family(g), "polynomial-modulus", family)


def piecewise_constant_weight(g: GroupSpec, breakpoints, values) -> MatrixWeight:
    """Scalar weight equal to values[i] on [breakpoints[i-1], breakpoints[i]) in (-pi, pi].

    ``breakpoints`` are ascending interior cut points; there is one more value
    than breakpoints.
    """
    breakpoints = np.asarray(breakpoints, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(values) != len(breakpoints) + 1:
        raise InvalidInput("piecewise-constant weight needs len(values) == len(breakpoints) + 1")

    def family(grid):
        theta = _scalar_angles(grid)
        if grid.kind == "cyclic":
            theta = np.where(theta > np.pi, theta - 2 * np.pi, theta)
        return values[np.searchsorted(breakpoints, theta, side="right")].astype(complex)[:, None, None]

    return MatrixWeight(g, family(g), "piecewise-constant", family)


def matrix_polynomial_weight(g: GroupSpec, coeffs) -> MatrixWeight:
    """W(theta) = A(theta) A(theta)^* with A(theta) = sum_j A_j e^{i j theta}.

    ``coeffs`` has shape (p+1, q, r).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 3:
        raise InvalidInput("matrix polynomial coefficients must have shape (p+1, q, r)")

    def family(grid):
        theta = _scalar_angles(grid)
        phases = np.exp(1j * np.outer(theta, np.arange(coeffs.shape[0])))
        A = np.einsum("pj,jab->pab", phases, coeffs)
        return A @ np.swapaxes(A, -1, -2).conj()

    return MatrixWeight(g, family(g), "matrix-polynomial", family)


def _parse_complex(token: str) -> complex:
    return complex(token.replace("i", "j").replace(" ", ""))


def parse_weight_table(text: str, g: GroupSpec, q: int) -> MatrixWeight:
    """Sample table: one line per grid index, then q*q complex entries row-major.

    Blank lines and ``#`` comments are ignored; every grid index must appear once.
    """
    samples = np.full((g.npoints, q, q), np.nan, dtype=complex)
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 1 + q * q:
            raise InvalidInput(f"weight table line {lineno}: expected {1 + q * q} fields, got {len(parts)}")
        idx = int(parts[0])
        if not 0 <= idx < g.npoints:
            raise InvalidInput(f"weight table line {lineno}: index {idx} is not a grid node")
        samples[idx] = np.array([_parse_complex(t) for t in parts[1:]]).reshape(q, q)
    if np.isnan(samples).any():
        raise InvalidInput("weight table does not cover every grid node")
    return MatrixWeight(g, samples, "table")


def parse_atom_table(text: str, q: int) -> tuple:
    atoms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 1 + q * q:
            raise InvalidInput(f"atom table line {lineno}: expected {1 + q * q} fields, got {len(parts)}")
        atoms.append((int(parts[0]), np.array([_parse_complex(t) for t in parts[1:]]).reshape(q, q)))
    return tuple(atoms)
