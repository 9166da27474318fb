"""Scenario configuration files (TOML).

A file holds one ``[scenario]`` table or an array ``[[scenario]]``; an
optional top-level ``[tolerances]`` table applies to all of them::

    [[scenario]]
    name = "szego"
    group = "integer"          # integer | cyclic | lattice2
    grid = 4096
    S = "halfline(le,0)"
    s = 0
    alpha = 2.0
    primal_windows = [32, 64, 128]
    dual_windows = [32, 64, 128]
    reduction = "auto"         # auto | force-full | force-ac

    [scenario.weight]
    family = "polynomial-modulus"
    coeffs = [1.0, -0.5]

    [[scenario.atoms]]
    index = 1024
    mass = 0.7
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from ..acsets import FrequencySet, contains, format_frequency_set, parse_frequency_set
from ..groups import GroupSpec, InvalidInput
from ..laspace import Exponents
from ..measures import (
    MatrixWeight,
    SpectralMeasure,
    constant_weight,
    matrix_polynomial_weight,
    parse_atom_table,
    parse_weight_table,
    piecewise_constant_weight,
    polynomial_modulus_weight,
)
from ..primal import UnsupportedScenario

REDUCTION_POLICIES = ("auto", "force-full", "force-ac")
DEFAULT_GRID = {"integer": 4096, "lattice2": 64}


class ConfigError(InvalidInput):
    pass


@dataclass(frozen=True)
class Tolerances:
    sandwich: float = 1e-9
    irls_tol: float = 1e-9
    max_iter: int = 500


@dataclass
class Scenario:
    name: str
    group: GroupSpec
    measure: SpectralMeasure
    S: FrequencySet
    s: object
    k: int = 1
    alpha: float = 2.0
    primal_windows: list = field(default_factory=lambda: [16])
    dual_windows: list = field(default_factory=lambda: [16])
    reduction: str = "auto"
    tolerances: Tolerances = field(default_factory=Tolerances)
    weight_spec: dict = field(default_factory=dict)

    def __post_init__(self):
        Exponents(self.alpha)
        self.s = self.group.check_frequency(self.s)
        if not contains(self.S, self.s, self.group):
            raise ConfigError(f"scenario {self.name!r}: s = {self.s!r} is not in S")
        if not 1 <= self.k <= self.measure.q:
            raise ConfigError(f"scenario {self.name!r}: k = {self.k} outside 1..{self.measure.q}")
        if self.measure.q > 1 and self.alpha != 2.0:
            raise UnsupportedScenario(
                f"scenario {self.name!r}: matrix-valued weights (q = {self.measure.q}) "
                f"are only supported for alpha = 2, got alpha = {self.alpha:g}"
            )
        for label, ws in (("primal_windows", self.primal_windows), ("dual_windows", self.dual_windows)):
            if any(int(v) != v or v < 0 for v in ws) or list(ws) != sorted(ws):
                raise ConfigError(f"scenario {self.name!r}: {label} must be ascending nonnegative integers")
        if self.reduction not in REDUCTION_POLICIES:
            raise ConfigError(f"scenario {self.name!r}: reduction must be one of {REDUCTION_POLICIES}")

    def describe(self) -> dict:
        return {
            "name": self.name,
            "group": {"kind": self.group.kind, "size": self.group.size},
            "weight": self.weight_spec,
            "atoms": [[int(i), _encode_matrix(mass)] for i, mass in self.measure.atoms],
            "S": format_frequency_set(self.S),
            "s": list(self.s) if isinstance(self.s, tuple) else self.s,
            "k": self.k,
            "alpha": self.alpha,
            "reduction_policy": self.reduction,
        }


def _encode_matrix(m):
    m = np.asarray(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _complex(v):
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    return complex(v)


def _matrix(v, q=None):
    """Scalars, [[..]] nested lists of numbers/strings/[re, im] pairs -> complex array."""
    if isinstance(v, (int, float, str)):
        arr = np.array([[_complex(v)]])
    else:
        arr = np.array([[_complex(x) for x in row] for row in v])
    if q is not None and arr.shape != (q, q):
        raise ConfigError(f"expected a {q}x{q} matrix, got shape {arr.shape}")
    return arr


def build_weight(spec: dict, g: GroupSpec, base: Path) -> MatrixWeight:
    family = spec.get("family", "constant")
    try:
        if family == "constant":
            return constant_weight(g, _matrix(spec.get("value", 1.0)))
        if family == "polynomial-modulus":
            return polynomial_modulus_weight(g, [_complex(c) for c in spec["coeffs"]])
        if family == "piecewise-constant":
            return piecewise_constant_weight(g, spec["breakpoints"], spec["values"])
        if family == "matrix-polynomial":
            return matrix_polynomial_weight(g, np.array([_matrix(c) for c in spec["coeffs"]]))
        if family == "table":
            q = int(spec.get("q", 1))
            if "file" in spec:
                text = (base / spec["file"]).read_text()
            else:
                text = spec["rows"]
            return parse_weight_table(text, g, q)
    except KeyError as exc:
        raise ConfigError(f"weight family {family!r} is missing parameter {exc}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read weight table: {exc}") from None
    raise ConfigError(f"unknown weight family {family!r}")


def _build_atoms(raw: dict, q: int, base: Path) -> tuple:
    atoms = []
    for item in raw.get("atoms", []):
        atoms.append((int(item["index"]), _matrix(item["mass"], q)))
    if "atoms_file" in raw:
        try:
            atoms.extend(parse_atom_table((base / raw["atoms_file"]).read_text(), q))
        except OSError as exc:
            raise ConfigError(f"cannot read atom table: {exc}") from None
    return tuple(atoms)


def _frequency(v):
    return tuple(int(t) for t in v) if isinstance(v, (list, tuple)) else int(v)


def build_scenario(raw: dict, base: Path, tolerances: Tolerances, grid_override=None, index=0) -> Scenario:
    kind = raw.get("group", "integer")
    if kind == "cyclic":
        size = raw.get("order", raw.get("grid"))
        if size is None:
            raise ConfigError("cyclic scenarios need 'order'")
    else:
        size = grid_override or raw.get("grid", DEFAULT_GRID.get(kind, 4096))
    g = GroupSpec(kind, int(size))
    weight_spec = dict(raw.get("weight", {"family": "constant"}))
    W = build_weight(weight_spec, g, base)
    measure = SpectralMeasure(W, _build_atoms(raw, W.q, base))
    if "S" not in raw or "s" not in raw:
        raise ConfigError("scenario needs both 'S' and 's'")
    windows = raw.get("windows", [16])
    return Scenario(
        name=str(raw.get("name", f"scenario-{index}")),
        group=g,
        measure=measure,
        S=parse_frequency_set(str(raw["S"])),
        s=_frequency(raw["s"]),
        k=int(raw.get("k", 1)),
        alpha=float(raw.get("alpha", 2.0)),
        primal_windows=[int(v) for v in raw.get("primal_windows", windows)],
        dual_windows=[int(v) for v in raw.get("dual_windows", windows)],
        reduction=str(raw.get("reduction", "auto")),
        tolerances=tolerances,
        weight_spec=weight_spec,
    )


def load_config(path, grid_override=None) -> list:
    """Parse a config file into a list of scenarios (in file order)."""
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return scenarios_from_dict(data, path.parent, grid_override)


def scenarios_from_dict(data: dict, base=Path("."), grid_override=None) -> list:
    tol = data.get("tolerances", {})
    tolerances = Tolerances(
        sandwich=float(tol.get("sandwich", 1e-9)),
        irls_tol=float(tol.get("irls_tol", 1e-9)),
        max_iter=int(tol.get("max_iter", 500)),
    )
    raw = data.get("scenario")
    if raw is None:
        raise ConfigError("config has no [scenario] table")
    raws = raw if isinstance(raw, list) else [raw]
    return [build_scenario(r, Path(base), tolerances, grid_override, i) for i, r in enumerate(raws)]
