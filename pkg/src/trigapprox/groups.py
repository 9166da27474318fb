"""Concrete dual pairs (G, Gamma): Z with the circle, Z_n with itself, Z^2 with the torus.

Every group carries a finite sampling grid on its dual and the normalized Haar
quadrature (total mass 1) on that grid.  Grid points are addressed by their
integer index; functions on Gamma are arrays whose leading axis runs over the
grid in ascending index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

Frequency = Union[int, tuple]


class InvalidInput(ValueError):
    """Raised for arguments that violate an operation's preconditions."""


@dataclass(frozen=True)
class GroupSpec:
    """A group G together with a grid on its dual Gamma.

    kind is one of ``"integer"`` (G = Z, Gamma = circle sampled at N points),
    ``"cyclic"`` (G = Gamma = Z_n, the grid is the group itself) or
    ``"lattice2"`` (G = Z^2, Gamma = torus sampled on an N x N grid).
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("integer", "cyclic", "lattice2"):
            raise InvalidInput(f"unknown group kind {self.kind!r}")
        if int(self.size) != self.size or self.size < 2:
            raise InvalidInput(f"grid size must be an integer >= 2, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))

    @classmethod
    def integer(cls, n: int = 4096) -> "GroupSpec":
        return cls("integer", n)

    @classmethod
    def cyclic(cls, n: int) -> "GroupSpec":
        return cls("cyclic", n)

    @classmethod
    def lattice2(cls, n: int = 64) -> "GroupSpec":
        return cls("lattice2", n)

    def __str__(self):
        if self.kind == "integer":
            return f"Z (circle grid N={self.size})"
        if self.kind == "cyclic":
            return f"Z_{self.size}"
        return f"Z^2 (torus grid {self.size}x{self.size})"

    @property
    def is_exact(self) -> bool:
        """True when the grid is the whole dual group (no discretization)."""
        return self.kind == "cyclic"

    @property
    def npoints(self) -> int:
        return self.size**2 if self.kind == "lattice2" else self.size

    @property
    def band_limit(self) -> int:
        """Largest |frequency| (componentwise on Z^2) that the grid resolves without aliasing."""
        if self.kind == "cyclic":
            return self.size
        return self.size // 2 - 1

    def refined(self, factor: int = 2) -> "GroupSpec":
        if self.kind == "cyclic":
            return self
        return GroupSpec(self.kind, self.size * factor)

    @cached_property
    def angles(self) -> np.ndarray:
        """Grid points as angles in (-pi, pi]; shape (N,) or (N*N, 2) on the torus.

        On Z_n the entry for the point gamma is 2*pi*gamma/n.
        """
        n = self.size
        theta = 2.0 * np.pi * np.arange(n) / n
        if self.kind != "cyclic":
            theta = np.where(theta > np.pi, theta - 2.0 * np.pi, theta)
        if self.kind == "lattice2":
            t1, t2 = np.meshgrid(theta, theta, indexing="ij")
            return np.stack([t1.ravel(), t2.ravel()], axis=1)
        return theta

    def check_frequency(self, x) -> Frequency:
        """Validate x for this group and return its canonical form."""
        if self.kind == "lattice2":
            if isinstance(x, (int, np.integer)) or len(x) != 2:
                raise InvalidInput(f"Z^2 frequency must be an integer pair, got {x!r}")
            a, b = x
            if int(a) != a or int(b) != b:
                raise InvalidInput(f"Z^2 frequency must be an integer pair, got {x!r}")
            return (int(a), int(b))
        if not isinstance(x, (int, np.integer)):
            raise InvalidInput(f"{self} frequency must be an integer, got {x!r}")
        x = int(x)
        return x % self.size if self.kind == "cyclic" else x

    def in_band(self, x) -> bool:
        x = self.check_frequency(x)
        if self.kind == "cyclic":
            return True
        if self.kind == "lattice2":
            return max(abs(x[0]), abs(x[1])) <= self.band_limit
        return abs(x) <= self.band_limit

    def check_band(self, x):
        if not self.in_band(x):
            raise InvalidInput(
                f"frequency {x!r} lies outside the alias-free band |x| <= {self.band_limit} of {self}"
            )

    def difference(self, x, y) -> Frequency:
        if self.kind == "lattice2":
            return (x[0] - y[0], x[1] - y[1])
        d = x - y
        return d % self.size if self.kind == "cyclic" else d

    def phase(self, x) -> np.ndarray:
        """The real phase x . theta at every grid point."""
        x = self.check_frequency(x)
        if self.kind == "lattice2":
            return x[0] * self.angles[:, 0] + x[1] * self.angles[:, 1]
        if self.kind == "cyclic":
            # reduce the product exactly before scaling to keep the phase accurate
            return 2.0 * np.pi * ((x * np.arange(self.size)) % self.size) / self.size
        return x * self.angles


def character_samples(x, g: GroupSpec) -> np.ndarray:
    """Values <gamma, x> of the character chi_x on the grid of g."""
    return np.exp(1j * g.phase(x))


def character_matrix(freqs, g: GroupSpec) -> np.ndarray:
    """Columns are the characters of ``freqs`` sampled on the grid; shape (npoints, len(freqs))."""
    if len(freqs) == 0:
        return np.zeros((g.npoints, 0), dtype=complex)
    return np.stack([character_samples(x, g) for x in freqs], axis=1)


def quadrature(samples, g: GroupSpec):
    """Integral of a grid function against normalized Haar measure.

    ``samples`` has the grid along axis 0; trailing axes (vector or matrix
    values) are integrated entrywise.
    """
    samples = np.asarray(samples)
    if samples.ndim == 0 or samples.shape[0] != g.npoints:
        raise InvalidInput(
            f"expected {g.npoints} grid samples for {g}, got shape {samples.shape}"
        )
    return samples.sum(axis=0) / g.npoints
