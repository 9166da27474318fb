"""Symbolic frequency sets and a conservative AC-set rule base.

A set S of frequencies is an AC-set when every regular measure whose Fourier
coefficients vanish on S is absolutely continuous.  The classifier below only
reports ``proven-ac`` when one of the classical sufficient conditions applies
(cofinite sets, the F. and M. Riesz half-line, Bochner sectors, compact
groups, translates and negations), ``known-not-ac`` when the set misses a
whole rational line of Z^2, and ``unknown`` otherwise.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .groups import GroupSpec, InvalidInput
from .measures import SpectralMeasure, restrict

ANGLE_TOL = 1e-9


class FrequencySet:
    """Base class; instances are immutable expression nodes."""

    def __contains__(self, x):
        return contains(self, x)


@dataclass(frozen=True)
class Explicit(FrequencySet):
    members: tuple = ()

    def __post_init__(self):
        seen = []
        for x in self.members:
            x = tuple(int(v) for v in x) if isinstance(x, (tuple, list)) else int(x)
            if x not in seen:
                seen.append(x)
        object.__setattr__(self, "members", tuple(seen))


@dataclass(frozen=True)
class HalfLine(FrequencySet):
    """{x >= bound} (direction "ge") or {x <= bound} (direction "le") in Z."""

    direction: str
    bound: int

    def __post_init__(self):
        if self.direction not in ("ge", "le"):
            raise InvalidInput(f"half-line direction must be 'ge' or 'le', got {self.direction!r}")


@dataclass(frozen=True)
class Sector2(FrequencySet):
    """Closed sector of Z^2 with apex 0, swept counterclockwise from ``start`` to ``end`` (degrees)."""

    start: float
    end: float

    @property
    def opening(self) -> float:
        return (self.end - self.start) % 360.0


@dataclass(frozen=True)
class All(FrequencySet):
    pass


@dataclass(frozen=True)
class Complement(FrequencySet):
    inner: FrequencySet


@dataclass(frozen=True)
class Translate(FrequencySet):
    inner: FrequencySet
    by: object

    def __post_init__(self):
        by = tuple(int(v) for v in self.by) if isinstance(self.by, (tuple, list)) else int(self.by)
        object.__setattr__(self, "by", by)


@dataclass(frozen=True)
class Negate(FrequencySet):
    inner: FrequencySet


def _sub(x, y):
    if isinstance(x, tuple):
        return (x[0] - y[0], x[1] - y[1])
    return x - y


def _neg(x):
    return (-x[0], -x[1]) if isinstance(x, tuple) else -x


def _in_sector(sector: Sector2, x) -> bool:
    if not isinstance(x, tuple):
        raise InvalidInput("sectors are subsets of Z^2")
    if x == (0, 0):
        return True
    phi = math.degrees(math.atan2(x[1], x[0]))
    d = (phi - sector.start) % 360.0
    return d <= sector.opening + ANGLE_TOL or d >= 360.0 - ANGLE_TOL


def contains(s: FrequencySet, x, group: Optional[GroupSpec] = None) -> bool:
    """Membership of x in s.

    On Z_n, frequencies and explicit members are compared modulo n and
    half-lines act on the representative in 0..n-1.
    """
    if group is not None:
        x = group.check_frequency(x)
    elif isinstance(x, list):
        x = tuple(x)
    n = group.size if group is not None and group.kind == "cyclic" else None
    if isinstance(s, All):
        return True
    if isinstance(s, Explicit):
        if n is not None:
            return any(int(m) % n == x for m in s.members)
        return x in s.members
    if isinstance(s, HalfLine):
        if isinstance(x, tuple):
            raise InvalidInput("half-lines are subsets of Z")
        return x >= s.bound if s.direction == "ge" else x <= s.bound
    if isinstance(s, Sector2):
        return _in_sector(s, x)
    if isinstance(s, Complement):
        return not contains(s.inner, x, group)
    if isinstance(s, Translate):
        y = _sub(x, s.by)
        return contains(s.inner, y % n if n else y, group)
    if isinstance(s, Negate):
        y = _neg(x)
        return contains(s.inner, y % n if n else y, group)
    raise InvalidInput(f"not a frequency set: {s!r}")


def window(s: FrequencySet, g: GroupSpec, radius: int) -> list:
    """Members of s with |x| <= radius (componentwise on Z^2), ascending.

    On Z_n the residues 0..n-1 are scanned and kept when their symmetric
    representative satisfies the bound; radius >= n/2 yields every member.
    """
    if radius < 0:
        raise InvalidInput("window radius must be nonnegative")
    radius = int(radius)
    if g.kind == "cyclic":
        n = g.size
        cands = [r for r in range(n) if abs(r if r <= n // 2 else r - n) <= radius]
    elif g.kind == "integer":
        cands = list(range(-radius, radius + 1))
    else:
        cands = [(a, b) for a in range(-radius, radius + 1) for b in range(-radius, radius + 1)]
    return [x for x in cands if contains(s, x, g)]


# ---------------------------------------------------------------------------
# AC classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ACStatus:
    verdict: str  # "proven-ac" | "known-not-ac" | "unknown"
    reason: str = ""

    @property
    def proven(self) -> bool:
        return self.verdict == "proven-ac"


def simplify(s: FrequencySet) -> FrequencySet:
    if isinstance(s, Complement):
        inner = simplify(s.inner)
        if isinstance(inner, Complement):
            return inner.inner
        if isinstance(inner, HalfLine):
            if inner.direction == "ge":
                return HalfLine("le", inner.bound - 1)
            return HalfLine("ge", inner.bound + 1)
        if isinstance(inner, Explicit) and not inner.members:
            return All()
        return Complement(inner)
    if isinstance(s, Translate):
        return Translate(simplify(s.inner), s.by)
    if isinstance(s, Negate):
        return Negate(simplify(s.inner))
    return s


def _primitive_normal(angle_deg: float, exact: bool, limit: int = 64):
    """Small primitive integer vector at ``angle_deg`` (exactly, or within slack when not exact)."""
    best = None
    for a in range(-limit, limit + 1):
        for b in range(-limit, limit + 1):
            if (a, b) == (0, 0) or math.gcd(a, b) != 1:
                continue
            diff = abs((math.degrees(math.atan2(b, a)) - angle_deg + 180.0) % 360.0 - 180.0)
            if best is None or diff < best[0] or (diff == best[0] and abs(a) + abs(b) < sum(map(abs, best[1]))):
                best = (diff, (a, b))
    if best is None:
        return None
    if exact and best[0] > 1e-9:
        return None
    return best


def _half_plane_normal(sector: Sector2):
    """Primitive normal nu with <v, nu> >= 0 on the sector, if one is certain to exist."""
    opening = sector.opening
    if opening > 180.0 + ANGLE_TOL:
        return None
    bisector = sector.start + opening / 2.0
    if opening >= 180.0 - ANGLE_TOL:
        found = _primitive_normal(bisector, exact=True)
        return found[1] if found else None
    slack = 90.0 - opening / 2.0
    found = _primitive_normal(bisector, exact=False)
    if found and found[0] < slack - ANGLE_TOL:
        return found[1]
    return None


def _classify(s: FrequencySet, g: GroupSpec) -> ACStatus:
    if isinstance(s, All):
        return ACStatus("proven-ac", "complement of a compact (empty) set")
    if isinstance(s, Complement) and isinstance(s.inner, Explicit):
        return ACStatus("proven-ac", "complement of a compact (finite) set")
    if g.kind == "integer" and isinstance(s, HalfLine):
        if s.direction == "ge":
            return ACStatus("proven-ac", f"F. and M. Riesz half-line, translated by {s.bound - 1}")
        return ACStatus("proven-ac", f"F. and M. Riesz half-line, negated and translated by {-s.bound - 1}")
    if g.kind == "lattice2" and isinstance(s, Sector2):
        if s.opening > 180.0 + ANGLE_TOL:
            return ACStatus("proven-ac", f"Bochner sector with opening {s.opening:g} deg > 180")
        nu = _half_plane_normal(s)
        if nu is not None:
            a, b = nu
            return ACStatus(
                "known-not-ac",
                f"misses the line {a}*m + {b}*n = -1; witness: lambda (x) delta_0 along normal ({a},{b}), "
                "modulated to that line (for the half-plane m >= 1 this is lambda (x) delta_0 itself)",
            )
        return ACStatus("unknown", f"sector with opening {s.opening:g} deg and irrational boundary")
    if g.kind == "lattice2" and isinstance(s, Explicit):
        if not s.members:
            return ACStatus("known-not-ac", "empty set; every measure qualifies, e.g. lambda (x) delta_0")
        c = min(m[0] for m in s.members) - 1
        return ACStatus("known-not-ac", f"finite set misses the line m = {c}; witness: exp(-i*c*t1) lambda (x) delta_0 with c = {c}")
    if isinstance(s, (Translate, Negate)):
        inner = _classify(s.inner, g)
        if inner.verdict == "unknown":
            return inner
        how = f"translate by {s.by}" if isinstance(s, Translate) else "negation"
        return ACStatus(inner.verdict, f"{inner.reason}; {how}")
    return ACStatus("unknown", "no rule applies")


def classify_ac(s: FrequencySet, g: GroupSpec) -> ACStatus:
    """Decide, conservatively, whether ``s`` itself is an AC-set of the group of ``g``."""
    if g.kind == "cyclic":
        return ACStatus("proven-ac", "subset of a compact group")
    return _classify(simplify(s), g)


@dataclass(frozen=True)
class ReductionReport:
    status: ACStatus
    reduced: bool
    dropped_atoms: int = 0
    warning: str = ""
    notes: dict = field(default_factory=dict)


def reduce_measure(m: SpectralMeasure, S: FrequencySet, g: Optional[GroupSpec] = None):
    """Drop the singular part of m when the complement of S is a proven AC-set.

    Returns ``(measure, report)``; the absolutely continuous part is never touched.
    """
    g = g or m.group
    status = classify_ac(Complement(S), g)
    if not m.has_atoms:
        return m, ReductionReport(status, True, 0, "")
    if status.proven:
        return restrict(m, "ac"), ReductionReport(status, True, len(m.atoms))
    warning = ""
    if status.verdict == "known-not-ac":
        warning = "complement of S is not an AC-set; singular part kept"
    return m, ReductionReport(status, False, 0, warning)


# ---------------------------------------------------------------------------
# textual syntax
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>[+-]?\d+(?:\.\d*)?(?:deg)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<punct>[(),]))")


def _tokenize(text: str) -> list:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise InvalidInput(f"cannot parse frequency set near {text[pos:]!r}")
        out.append(m.group("num") or m.group("name") or m.group("punct"))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise InvalidInput(f"expected {expected or 'token'}, got {tok!r}")
        self.i += 1
        return tok

    def integer(self):
        tok = self.take()
        try:
            return int(tok)
        except ValueError:
            raise InvalidInput(f"expected an integer, got {tok!r}") from None

    def angle(self):
        tok = self.take()
        if tok.endswith("deg"):
            return float(tok[:-3])
        return math.degrees(float(tok))

    def point(self):
        if self.peek() == "(":
            self.take("(")
            a = self.integer()
            self.take(",")
            b = self.integer()
            self.take(")")
            return (a, b)
        return self.integer()

    def expr(self) -> FrequencySet:
        name = self.take().lower()
        if name in ("all", "empty") and self.peek() != "(":
            return All() if name == "all" else Explicit(())
        self.take("(")
        if name == "explicit":
            members = []
            while self.peek() != ")":
                members.append(self.point())
                if self.peek() == ",":
                    self.take(",")
            node = Explicit(tuple(members))
        elif name == "halfline":
            direction = self.take().lower()
            self.take(",")
            node = HalfLine(direction, self.integer())
        elif name == "sector2":
            a = self.angle()
            self.take(",")
            node = Sector2(a, self.angle())
        elif name in ("complement", "negate"):
            inner = self.expr()
            node = Complement(inner) if name == "complement" else Negate(inner)
        elif name == "translate":
            inner = self.expr()
            self.take(",")
            node = Translate(inner, self.point())
        elif name in ("all", "empty"):
            node = All() if name == "all" else Explicit(())
        else:
            raise InvalidInput(f"unknown frequency set constructor {name!r}")
        self.take(")")
        return node


def parse_frequency_set(text: str) -> FrequencySet:
    """Parse e.g. ``complement(halfline(ge,1))``, ``explicit(0,5,-3)``, ``sector2(30deg,240deg)``."""
    p = _Parser(text)
    node = p.expr()
    if p.peek() is not None:
        raise InvalidInput(f"trailing input in frequency set: {p.toks[p.i:]}")
    return node


def format_frequency_set(s: FrequencySet) -> str:
    if isinstance(s, All):
        return "all"
    if isinstance(s, Explicit):
        return "explicit(" + ",".join(
            f"({m[0]},{m[1]})" if isinstance(m, tuple) else str(m) for m in s.members
        ) + ")"
    if isinstance(s, HalfLine):
        return f"halfline({s.direction},{s.bound})"
    if isinstance(s, Sector2):
        return f"sector2({s.start:g}deg,{s.end:g}deg)"
    if isinstance(s, Complement):
        return f"complement({format_frequency_set(s.inner)})"
    if isinstance(s, Negate):
        return f"negate({format_frequency_set(s.inner)})"
    if isinstance(s, Translate):
        by = f"({s.by[0]},{s.by[1]})" if isinstance(s.by, tuple) else str(s.by)
        return f"translate({format_frequency_set(s.inner)},{by})"
    raise InvalidInput(f"not a frequency set: {s!r}")
