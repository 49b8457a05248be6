"""Hopping-pattern families for D2D discovery.

Five families are supported:

``QC``
    Baseline pattern ``i(t) = i(0) + c*t mod m``, ``j(t) = j(0) + i(0)*t mod n``.
    Only frame-independent (and invariant-bearing) when ``c == 0``.
``A1``
    ``(i, j) -> (u*i mod m, j - v*i + v*(u*i mod m) mod n)`` on channels 1..m-1,
    invariant ``(j - v*i) mod n``.
``A2``
    ``(i, j) -> (2*i mod m, j - i + (2*i mod m) mod n)`` on channels 1..m-1,
    invariant ``(j - i) mod n``.
``B1``
    ``(i, j) -> (i + e mod m, c*i + j + f mod n)``,
    invariant ``c*i^2 + (2f - c*e)*i - 2*e*j mod m``.
``B2``
    ``(i, j) -> (i + e mod m, c*i - j + f mod n)``,
    invariant ``c^2*i^2 + 4*j^2 - 4*c*i*j + c*(2f - c*e)*i + 2*(c*e - 2f)*j mod m``.

A1 and A2 leave channel 0 unused, so they carry ``(m-1)*n`` logical resources
instead of ``m*n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Mapping, Optional

from .grid import GridShape, InvariantValue, Resource, gcd, mod_inverse


class Family(str, Enum):
    QC = "QC"
    A1 = "A1"
    A2 = "A2"
    B1 = "B1"
    B2 = "B2"

    @classmethod
    def parse(cls, name: str) -> "Family":
        try:
            return cls(str(name).upper())
        except ValueError:
            raise PatternError(
                f"unknown family {name!r}; expected one of {[f.value for f in cls]}",
                rule="family",
            ) from None


PARAM_NAMES = {
    Family.QC: ("c",),
    Family.A1: ("u", "v"),
    Family.A2: (),
    Family.B1: ("c", "e", "f"),
    Family.B2: ("c", "e", "f"),
}


class PatternError(ValueError):
    """Invalid pattern parameters. ``rule`` names the violated constraint."""

    def __init__(self, message: str, rule: str = ""):
        super().__init__(message)
        self.rule = rule or message


class FrameDependentError(PatternError):
    pass


class NoInvariantError(PatternError):
    pass


class DomainError(PatternError):
    pass


@dataclass(frozen=True)
class PatternSpec:
    family: Family
    shape: GridShape
    params: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.family, Family):
            object.__setattr__(self, "family", Family.parse(self.family))
        object.__setattr__(self, "params", dict(self.params))

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "m": self.shape.m,
            "n": self.shape.n,
            "params": {k: self.params[k] for k in PARAM_NAMES[self.family] if k in self.params},
        }

    def __hash__(self):
        return hash((self.family, self.shape, tuple(sorted(self.params.items()))))


@dataclass(frozen=True)
class TrajectoryPoint:
    frame: int
    resource: Resource
    invariant: Optional[InvariantValue] = None


def _validate(spec: PatternSpec) -> None:
    fam, m, n = spec.family, spec.shape.m, spec.shape.n
    p = spec.params
    expected = PARAM_NAMES[fam]
    missing = [k for k in expected if k not in p]
    if missing:
        raise PatternError(f"missing parameter(s) for {fam.value}: {', '.join(missing)}", "missing-param")
    extra = sorted(set(p) - set(expected))
    if extra:
        raise PatternError(f"unexpected parameter(s) for {fam.value}: {', '.join(extra)}", "extra-param")
    for k in expected:
        if not isinstance(p[k], int) or isinstance(p[k], bool):
            raise PatternError(f"parameter {k} must be an integer, got {p[k]!r}", "param-type")

    if fam is Family.QC:
        if m > n:
            raise PatternError("m must be <= n", "m<=n")
        if not 0 <= p["c"] < m:
            raise PatternError("c must satisfy 0 <= c < m", "c-range")
        return

    if m % 2 == 0:
        raise PatternError("m must be odd", "m-odd")
    if m < 3:
        raise PatternError("m must be >= 3", "m>=3")

    if fam is Family.A2:
        if n < m:
            raise PatternError("n must be >= m", "n>=m")
        return

    if n % m:
        raise PatternError("m must divide n", "m|n")

    if fam is Family.A1:
        u, v = p["u"], p["v"]
        if gcd(u % m, m) != 1:
            raise PatternError("u not coprime to m", "gcd(u,m)")
        if gcd((u - 1) % m, m) != 1:
            raise PatternError("u-1 not coprime to m", "gcd(u-1,m)")
        if gcd(v % m, m) != 1:
            raise PatternError("v not coprime to m", "gcd(v,m)")
    else:
        if p["e"] % m == 0:
            raise PatternError("e must not be divisible by m", "m∤e")
        if gcd(p["c"] % m, m) != 1:
            raise PatternError("c not coprime to m", "gcd(c,m)")


class Pattern:
    """A validated hopping pattern. Build through :func:`make_pattern`."""

    def __init__(self, spec: PatternSpec):
        _validate(spec)
        self.spec = spec
        self.family = spec.family
        self.m = spec.shape.m
        self.n = spec.shape.n
        p = spec.params
        m, n = self.m, self.n
        # c, f enter the subframe coordinate (mod n); e only the channel (mod m).
        self.c = p.get("c", 0) % n
        self.e = p.get("e", 0) % m
        self.f = p.get("f", 0) % n
        self.u = p.get("u", 2 if self.family is Family.A2 else 0) % m
        self.v = (p.get("v", 1) % n) if self.family in (Family.A1, Family.A2) else 0
        self._u_inv = mod_inverse(self.u, m) if self.family in (Family.A1, Family.A2) else None
        self._min_i = 1 if self.family in (Family.A1, Family.A2) else 0
        self.frame_independent = not (self.family is Family.QC and self.c != 0)
        # every frame-independent family here carries an invariant
        self.has_invariant = self.frame_independent

    def __repr__(self):
        params = ", ".join(f"{k}={v}" for k, v in self.spec.params.items())
        sep = ", " if params else ""
        return f"Pattern({self.family.value}, m={self.m}, n={self.n}{sep}{params})"

    @property
    def label(self) -> str:
        if self.family is Family.QC:
            return "QC(c≡0)" if self.c == 0 else "QC(c≢0)"
        return f"type {self.family.value}"

    @property
    def invariant_modulus(self) -> int:
        self._require_invariant()
        return self.n if self.family in (Family.A1, Family.A2) else self.m

    # -- domain ---------------------------------------------------------

    def in_domain(self, r: Resource) -> bool:
        return self._min_i <= r.i < self.m and 0 <= r.j < self.n

    def check_domain(self, r: Resource) -> None:
        if not self.in_domain(r):
            lo = self._min_i
            raise DomainError(
                f"resource {r} outside domain {{{lo}..{self.m - 1}}}x{{0..{self.n - 1}}} of {self.family.value}",
                "domain",
            )

    def domain(self) -> List[Resource]:
        return [Resource(i, j) for i in range(self._min_i, self.m) for j in range(self.n)]

    def iter_domain(self) -> Iterator[Resource]:
        for i in range(self._min_i, self.m):
            for j in range(self.n):
                yield Resource(i, j)

    @property
    def domain_size(self) -> int:
        return (self.m - self._min_i) * self.n

    # -- hopping --------------------------------------------------------

    def _require_frame_independent(self):
        if not self.frame_independent:
            raise FrameDependentError(
                "QC with c != 0 depends on the frame number; use position_at or transition",
                "frame-dependent",
            )

    def _require_invariant(self):
        if not self.has_invariant:
            raise NoInvariantError("QC with c != 0 has no hopping invariant", "no-invariant")

    def _step(self, i: int, j: int):
        m, n, fam = self.m, self.n, self.family
        if fam is Family.A1 or fam is Family.A2:
            i2 = (self.u * i) % m
            if fam is Family.A1:
                return i2, (j - self.v * i + self.v * i2) % n
            return i2, (j - i + i2) % n
        if fam is Family.B1:
            return (i + self.e) % m, (self.c * i + j + self.f) % n
        if fam is Family.B2:
            return (i + self.e) % m, (self.c * i - j + self.f) % n
        return i, (j + i) % n  # QC, c == 0

    def step(self, r: Resource) -> Resource:
        """Position in the next discovery frame."""
        if not self.frame_independent:
            self._require_frame_independent()
        i, j = r
        if not (self._min_i <= i < self.m and 0 <= j < self.n):
            self.check_domain(r)
        return Resource._make(self._step(i, j))

    def step_back(self, r: Resource) -> Resource:
        """Position in the previous discovery frame (inverse of :meth:`step`)."""
        self._require_frame_independent()
        self.check_domain(r)
        m, n, fam = self.m, self.n, self.family
        i2, j2 = r.i, r.j
        if fam is Family.A1 or fam is Family.A2:
            i = (self._u_inv * i2) % m
            if fam is Family.A1:
                return Resource(i, (j2 + self.v * i - self.v * i2) % n)
            return Resource(i, (j2 + i - i2) % n)
        if fam is Family.B1:
            i = (i2 - self.e) % m
            return Resource(i, (j2 - self.c * i - self.f) % n)
        if fam is Family.B2:
            i = (i2 - self.e) % m
            return Resource(i, (self.c * i + self.f - j2) % n)
        return Resource(i2, (j2 - i2) % n)

    def transition(self, r: Resource, t: int) -> Resource:
        """Per-frame hopping map M_t: position in frame t -> position in frame t+1."""
        if self.frame_independent:
            return self.step(r)
        self.check_domain(r)
        i0 = (r.i - self.c * t) % self.m
        return Resource((r.i + self.c) % self.m, (r.j + i0) % self.n)

    def position_at(self, r0: Resource, t: int) -> Resource:
        """Position in frame ``t`` of the logical resource starting at ``r0``."""
        if t < 0:
            raise ValueError(f"frame must be >= 0, got {t}")
        self.check_domain(r0)
        if self.family is Family.QC:
            return Resource((r0.i + self.c * t) % self.m, (r0.j + r0.i * t) % self.n)
        # Orbits are cycles of a permutation, so t can be folded by the period.
        i, j = r0.i, r0.j
        for k in range(t):
            i, j = self._step(i, j)
            if (i, j) == (r0.i, r0.j):
                rest = t % (k + 1)
                for _ in range(rest):
                    i, j = self._step(i, j)
                break
        return Resource(i, j)

    def trajectory(self, r0: Resource, frames: int) -> List[TrajectoryPoint]:
        """Points for frames ``0..frames`` inclusive."""
        self.check_domain(r0)
        out = []
        r = r0
        for t in range(frames + 1):
            inv = self.invariant(r) if self.has_invariant else None
            out.append(TrajectoryPoint(t, r, inv))
            r = self.transition(r, t)
        return out

    def period(self, r: Resource) -> int:
        self._require_frame_independent()
        self.check_domain(r)
        i, j = self._step(r.i, r.j)
        k = 1
        while (i, j) != (r.i, r.j):
            i, j = self._step(i, j)
            k += 1
        return k

    # -- invariant ------------------------------------------------------

    def raw_invariant(self, r: Resource) -> int:
        """The invariant polynomial evaluated over the integers (not reduced)."""
        self._require_invariant()
        i, j = r.i, r.j
        fam, c, e, f = self.family, self.c, self.e, self.f
        if fam is Family.A1:
            return j - self.v * i
        if fam is Family.A2:
            return j - i
        if fam is Family.B1:
            return c * i * i + (2 * f - c * e) * i - 2 * e * j
        if fam is Family.B2:
            return (c * c * i * i + 4 * j * j - 4 * c * i * j
                    + c * (2 * f - c * e) * i + 2 * (c * e - 2 * f) * j)
        return i

    def invariant(self, r: Resource) -> InvariantValue:
        self.check_domain(r)
        q = self.invariant_modulus
        return InvariantValue(self.raw_invariant(r) % q, q)

    def invariant_partition(self) -> Dict[InvariantValue, List[Resource]]:
        """Domain split into invariant classes, keyed in ascending invariant order."""
        classes: Dict[InvariantValue, List[Resource]] = {}
        for r in self.iter_domain():
            classes.setdefault(self.invariant(r), []).append(r)
        return dict(sorted(classes.items()))


def make_pattern(spec: PatternSpec) -> Pattern:
    return Pattern(spec)


def pattern(family, m: int, n: int, **params) -> Pattern:
    """Shorthand: ``pattern("A1", 3, 6, u=2, v=1)``."""
    return Pattern(PatternSpec(Family.parse(family) if isinstance(family, str) else family,
                               GridShape(m, n), params))
