"""Discovery-frame grid types and modular arithmetic helpers.

A discovery frame is split into ``m`` frequency channels by ``n`` subframes.
A resource is the pair ``(i, j)``: ``i`` is the channel, ``j`` the subframe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

# Largest m or n accepted anywhere in the package.
MAX_DIM = 2**15


class InvalidModulusError(ValueError):
    pass


class NoInverseError(ValueError):
    pass


def mod_reduce(x: int, q: int) -> int:
    """Canonical residue of ``x`` in ``[0, q)``, also for negative ``x``."""
    if q < 1:
        raise InvalidModulusError(f"modulus must be >= 1, got {q}")
    return x % q


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def mod_inverse(a: int, q: int) -> int:
    if q < 1:
        raise InvalidModulusError(f"modulus must be >= 1, got {q}")
    try:
        return pow(a, -1, q)
    except ValueError:
        raise NoInverseError(f"{a} has no inverse mod {q} (gcd {math.gcd(a, q)})") from None


@dataclass(frozen=True)
class GridShape:
    m: int
    n: int

    def __post_init__(self):
        for name in ("m", "n"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeError(f"{name} must be an int, got {v!r}")
            if v < 1:
                raise ValueError(f"{name} must be >= 1, got {v}")
            if v > MAX_DIM:
                raise ValueError(f"{name} must be <= {MAX_DIM}, got {v}")

    @property
    def size(self) -> int:
        return self.m * self.n

    def contains(self, r: "Resource") -> bool:
        return 0 <= r.i < self.m and 0 <= r.j < self.n


class Resource(NamedTuple):
    i: int
    j: int

    def __str__(self):
        return f"({self.i},{self.j})"


@dataclass(frozen=True, order=True)
class InvariantValue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidModulusError(f"modulus must be >= 1, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"value {self.value} outside [0, {self.modulus})")

    def __str__(self):
        return f"{self.value} mod {self.modulus}"
