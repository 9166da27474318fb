"""Weighted L^alpha norms, Fourier coefficients and Gram matrices over a spectral measure."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import GroupSpec, InvalidInput, character_matrix, character_samples
from .measures import DEFAULT_RANK_TOL, MatrixWeight, SpectralMeasure, psd_power


@dataclass(frozen=True)
class Exponents:
    """alpha together with its conjugate alpha' = alpha/(alpha-1) and beta = 1/(alpha-1)."""

    alpha: float

    def __post_init__(self):
        if not 1.0 < self.alpha < np.inf:
            raise InvalidInput(f"alpha must lie in (1, inf), got {self.alpha!r}")

    @property
    def conjugate(self) -> float:
        return self.alpha / (self.alpha - 1.0)

    @property
    def beta(self) -> float:
        return 1.0 / (self.alpha - 1.0)


def as_exponents(e) -> Exponents:
    return e if isinstance(e, Exponents) else Exponents(float(e))


@dataclass(frozen=True)
class TrigPolynomial:
    """Finite sum of characters chi_x times coefficient vectors u_x in C^q."""

    coeffs: dict = field(default_factory=dict)
    q: int = 1

    def __post_init__(self):
        clean = {}
        for x, u in self.coeffs.items():
            u = np.atleast_1d(np.asarray(u, dtype=complex)).copy()
            if u.shape != (self.q,):
                raise InvalidInput(f"coefficient at {x!r} has shape {u.shape}, expected ({self.q},)")
            if np.any(u != 0):
                u.setflags(write=False)
                clean[tuple(x) if isinstance(x, list) else x] = u
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def from_arrays(cls, freqs, coeffs, q: int = 1) -> "TrigPolynomial":
        coeffs = np.asarray(coeffs, dtype=complex).reshape(len(freqs), q)
        return cls(dict(zip(freqs, coeffs)), q)

    @classmethod
    def character(cls, x, u=1.0, q: int = 1) -> "TrigPolynomial":
        return cls({x: np.broadcast_to(np.asarray(u, dtype=complex), (q,))}, q)

    @property
    def support(self) -> list:
        return sorted(self.coeffs)

    def coefficient(self, x) -> np.ndarray:
        return self.coeffs.get(x, np.zeros(self.q, dtype=complex))

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        out = dict(self.coeffs)
        for x, u in other.coeffs.items():
            out[x] = out.get(x, 0) + u
        return TrigPolynomial(out, self.q)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c) -> "TrigPolynomial":
        return TrigPolynomial({x: c * u for x, u in self.coeffs.items()}, self.q)

    def on_grid(self, g: GroupSpec) -> np.ndarray:
        """Exact values on the grid of g, shape (npoints, q)."""
        freqs = self.support
        if not freqs:
            return np.zeros((g.npoints, self.q), dtype=complex)
        U = np.stack([self.coeffs[x] for x in freqs])
        return character_matrix(freqs, g) @ U

    def __call__(self, theta) -> np.ndarray:
        """Value at a point of the dual group given by its angle(s)."""
        out = np.zeros(self.q, dtype=complex)
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        for x, u in self.coeffs.items():
            ph = np.dot(np.atleast_1d(x), theta) if theta.size > 1 else x * theta[0]
            out += np.exp(1j * ph) * u
        return out


def grid_values(f, g: GroupSpec, q: int) -> np.ndarray:
    """Grid samples of a TrigPolynomial or array, normalized to shape (npoints, q)."""
    if isinstance(f, TrigPolynomial):
        if f.q != q:
            raise InvalidInput(f"dimension mismatch: function has q={f.q}, measure has q={q}")
        return f.on_grid(g)
    f = np.asarray(f, dtype=complex)
    if f.ndim == 1 and q == 1:
        f = f[:, None]
    if f.shape != (g.npoints, q):
        raise InvalidInput(f"grid function shape {f.shape} does not match ({g.npoints}, {q})")
    return f


def _weighted_power(values, W, alpha, rel_tol):
    """||W^{1/alpha} f||^alpha pointwise, f of shape (P, q), W of shape (P, q, q)."""
    if W.shape[-1] == 1:
        return np.abs(values[:, 0]) ** alpha * W[:, 0, 0].real
    root = psd_power(W, 1.0 / alpha, rel_tol)
    v = np.einsum("pij,pj->pi", root, values)
    return np.linalg.norm(v, axis=1) ** alpha


def lalpha_power(f, m: SpectralMeasure, alpha: float, rel_tol: float = DEFAULT_RANK_TOL) -> float:
    """||f||^alpha in L^alpha(m): density integral plus atom contributions."""
    g = m.group
    values = grid_values(f, g, m.q)
    total = float(np.sum(_weighted_power(values, m.ac.samples, alpha, rel_tol))) / g.npoints
    if m.atoms:
        idx = np.array([i for i, _ in m.atoms])
        masses = np.stack([mass for _, mass in m.atoms])
        total += float(np.sum(_weighted_power(values[idx], masses, alpha, rel_tol)))
    return total


def lalpha_norm(f, m: SpectralMeasure, e, rel_tol: float = DEFAULT_RANK_TOL) -> float:
    alpha = as_exponents(e).alpha
    return lalpha_power(f, m, alpha, rel_tol) ** (1.0 / alpha)


def weighted_norm(f, W: MatrixWeight, e, rel_tol: float = DEFAULT_RANK_TOL) -> float:
    """Norm in L^alpha(W d lambda) for a bare density."""
    return lalpha_norm(f, SpectralMeasure(W), e, rel_tol)


def fourier_coefficient(f, x, g: GroupSpec) -> np.ndarray:
    """The row vector (f^*)^check(x) = integral of <gamma, x> f(gamma)^* d lambda.

    Exact for trigonometric polynomials (the conjugated coefficient at x); for
    grid functions x must lie in the alias-free band.
    """
    x = g.check_frequency(x)
    if isinstance(f, TrigPolynomial):
        return f.coefficient(x).conj()
    g.check_band(x)
    f = np.asarray(f, dtype=complex)
    if f.ndim == 1:
        f = f[:, None]
    if f.shape[0] != g.npoints:
        raise InvalidInput(f"expected {g.npoints} grid samples, got {f.shape[0]}")
    return (character_samples(x, g)[:, None] * f.conj()).sum(axis=0) / g.npoints


def check_pair_band(freqs, g: GroupSpec):
    """Reject frequency lists whose pairwise differences alias on the grid."""
    if g.kind == "cyclic" or not freqs:
        return
    if g.kind == "lattice2":
        span = max(max(a[c] for a in freqs) - min(a[c] for a in freqs) for c in (0, 1))
    else:
        span = max(freqs) - min(freqs)
    if span > g.band_limit:
        raise InvalidInput(
            f"frequency differences up to {span} exceed the alias-free band {g.band_limit} of {g}; "
            "use a finer grid"
        )


def design_matrix(freqs, g: GroupSpec, q: int) -> np.ndarray:
    """Grid values of the basis chi_x e_i, ordered (x, i) with i fastest; shape (P, q, n*q)."""
    chars = character_matrix(list(freqs), g)
    P, n = chars.shape
    out = np.zeros((P, q, n * q), dtype=complex)
    for i in range(q):
        out[:, i, i::q] = chars
    return out


def gram_matrix(freqs, m: SpectralMeasure, check_band: bool = True) -> np.ndarray:
    """L^2(m) inner products <chi_y e_j, chi_x e_i> = int (chi_x e_i)^* dM (chi_y e_j).

    Rows and columns are ordered (x, i) with the vector index fastest.  With no
    atoms the result is block Toeplitz in x - y.
    """
    g, q = m.group, m.q
    freqs = list(freqs)
    if check_band:
        check_pair_band(freqs, g)
    chars = character_matrix(freqs, g)
    n = len(freqs)
    G = np.zeros((n * q, n * q), dtype=complex)
    W = m.ac.samples
    for i in range(q):
        for j in range(q):
            G[i::q, j::q] = chars.conj().T @ (W[:, i, j][:, None] * chars) / g.npoints
    for idx, mass in m.atoms:
        phi = chars[idx]
        G += np.kron(np.outer(phi.conj(), phi), mass)
    return 0.5 * (G + G.conj().T)


def cross_vector(freqs, target, m: SpectralMeasure) -> np.ndarray:
    """Inner products <f, chi_x e_i> = int (chi_x e_i)^* dM f against a grid/polynomial target f."""
    g, q = m.group, m.q
    values = grid_values(target, g, q)
    chars = character_matrix(list(freqs), g)
    Wf = np.einsum("pij,pj->pi", m.ac.samples, values)
    b = (chars.conj().T @ Wf / g.npoints).reshape(-1)
    for idx, mass in m.atoms:
        b += np.kron(chars[idx].conj(), mass @ values[idx])
    return b
