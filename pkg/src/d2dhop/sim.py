"""Slotted half-duplex discovery simulation.

Each UE owns one logical resource and transmits on its position every frame.
A UE hears every channel in the subframes where it is not transmitting
(wideband receiver), so UE A can receive UE B in frame t iff their
subframes differ. With filtering, A only attempts to decode resources
whose invariant belongs to the service types A is interested in.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .grid import Resource
from .patterns import NoInvariantError, Pattern, PatternSpec, make_pattern

IDEAL, ERASURE = "ideal", "erasure"
DEFAULT_HORIZON = 32


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class UEConfig:
    id: int
    start: Resource
    service_type: int = 0

    def __post_init__(self):
        object.__setattr__(self, "start", Resource(*self.start))


@dataclass(frozen=True)
class ChannelModel:
    kind: str = IDEAL
    p_rx: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (IDEAL, ERASURE):
            raise ScenarioError(f"channel.kind must be 'ideal' or 'erasure', got {self.kind!r}")
        if not 0.0 <= self.p_rx <= 1.0:
            raise ScenarioError(f"channel.p_rx must be in [0, 1], got {self.p_rx}")
        if not 0 <= self.seed < 2**64:
            raise ScenarioError(f"channel.seed must be a 64-bit unsigned integer, got {self.seed}")

    def delivered(self, frame: int, rx: int, tx: int) -> bool:
        if self.kind == IDEAL:
            return True
        return erasure_draw(self.seed, frame, rx, tx) < self.p_rx


def erasure_draw(seed: int, frame: int, rx: int, tx: int) -> float:
    """Uniform [0, 1) value keyed on (seed, frame, rx, tx); independent of call order."""
    digest = hashlib.blake2b(struct.pack("<4Q", seed, frame, rx, tx), digest_size=8).digest()
    return int.from_bytes(digest, "little") / 2**64


@dataclass(frozen=True)
class Filtering:
    """Service-type decode filtering.

    ``service_map`` maps a service type to the invariant values that carry it;
    ``None`` means the identity map (type k <-> invariant value k).
    ``interest`` maps a receiver id to the service types it decodes; receivers
    missing from it decode everything.
    """

    service_map: Optional[Mapping[int, FrozenSet[int]]] = None
    interest: Mapping[int, FrozenSet[int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.service_map is not None:
            object.__setattr__(self, "service_map",
                               {int(k): frozenset(v) for k, v in self.service_map.items()})
        object.__setattr__(self, "interest", {int(k): frozenset(v) for k, v in self.interest.items()})

    def values_for(self, service_type: int) -> FrozenSet[int]:
        if self.service_map is None:
            return frozenset((service_type,))
        return self.service_map.get(service_type, frozenset())

    def interest_values(self, ue_id: int) -> Optional[FrozenSet[int]]:
        if ue_id not in self.interest:
            return None
        out: FrozenSet[int] = frozenset()
        for s in self.interest[ue_id]:
            out |= self.values_for(s)
        return out


@dataclass(frozen=True)
class Scenario:
    pattern: PatternSpec
    ues: Sequence[UEConfig]
    channel: ChannelModel = ChannelModel()
    horizon: int = DEFAULT_HORIZON
    filtering: Optional[Filtering] = None

    def __post_init__(self):
        object.__setattr__(self, "ues", tuple(self.ues))


@dataclass(frozen=True)
class SimResult:
    ue_ids: Tuple[int, ...]
    horizon: int
    # (rx, tx) -> first frame rx decoded tx, None if never
    first_hear: Dict[Tuple[int, int], Optional[int]]
    # ue id -> per-frame decode attempts
    attempts_unfiltered: Dict[int, Tuple[int, ...]]
    attempts_filtered: Dict[int, Tuple[int, ...]]

    def mutual(self, a: int, b: int) -> Optional[int]:
        x, y = self.first_hear[(a, b)], self.first_hear[(b, a)]
        if x is None or y is None:
            return None
        return max(x, y)

    @property
    def undiscovered(self) -> int:
        return sum(v is None for v in self.first_hear.values())

    def cdf(self) -> List[float]:
        """Fraction of ordered pairs discovered by the end of each frame."""
        total = len(self.first_hear)
        counts = [0] * self.horizon
        for v in self.first_hear.values():
            if v is not None:
                counts[v] += 1
        out, acc = [], 0
        for c in counts:
            acc += c
            out.append(acc / total if total else 1.0)
        return out

    def summary(self) -> dict:
        found = [v for v in self.first_hear.values() if v is not None]
        mutual = [self.mutual(a, b) for a in self.ue_ids for b in self.ue_ids if a < b]
        mutual_found = [v for v in mutual if v is not None]
        return {
            "ordered_pairs": len(self.first_hear),
            "undiscovered_pairs": self.undiscovered,
            "mean_first_hear": sum(found) / len(found) if found else None,
            "max_first_hear": max(found) if found else None,
            "max_mutual": max(mutual_found) if mutual_found else None,
            "unmutual_pairs": len(mutual) - len(mutual_found),
        }


def _validate(scenario: Scenario, pattern: Pattern) -> None:
    if scenario.horizon < 1:
        raise ScenarioError(f"horizon must be >= 1, got {scenario.horizon}")
    ids, starts = set(), {}
    for ue in scenario.ues:
        if ue.id < 0:
            raise ScenarioError(f"ue id must be >= 0, got {ue.id}")
        if ue.id in ids:
            raise ScenarioError(f"duplicate ue id {ue.id}")
        ids.add(ue.id)
        if not pattern.in_domain(ue.start):
            raise ScenarioError(f"ue {ue.id}: start {ue.start} outside pattern domain")
        if ue.start in starts:
            raise ScenarioError(f"ue {ue.id}: start {ue.start} already used by ue {starts[ue.start]}")
        starts[ue.start] = ue.id
    flt = scenario.filtering
    if flt is None:
        return
    if not pattern.has_invariant:
        raise NoInvariantError("filtering needs a pattern with a hopping invariant", "no-invariant")
    for rx in flt.interest:
        if rx not in ids:
            raise ScenarioError(f"filtering.interest names unknown ue {rx}")
    for ue in scenario.ues:
        inv = pattern.invariant(ue.start).value
        if inv not in flt.values_for(ue.service_type):
            raise ScenarioError(
                f"ue {ue.id}: start invariant {inv} not mapped to service type {ue.service_type}")


def run(scenario: Scenario) -> SimResult:
    pattern = make_pattern(scenario.pattern)
    _validate(scenario, pattern)
    ues = sorted(scenario.ues, key=lambda u: u.id)
    ids = tuple(u.id for u in ues)
    flt = scenario.filtering
    interest = {u.id: (flt.interest_values(u.id) if flt else None) for u in ues}
    channel = scenario.channel

    first: Dict[Tuple[int, int], Optional[int]] = {(a, b): None for a in ids for b in ids if a != b}
    unf = {a: [0] * scenario.horizon for a in ids}
    fil = {a: [0] * scenario.horizon for a in ids}
    pos = {u.id: u.start for u in ues}

    for t in range(scenario.horizon):
        inv = {b: pattern.invariant(pos[b]).value for b in ids} if flt else None
        for a in ids:
            ja = pos[a].j
            want = interest[a]
            for b in ids:
                if b == a or pos[b].j == ja:
                    continue
                unf[a][t] += 1
                if want is not None and inv[b] not in want:
                    continue
                fil[a][t] += 1
                if first[(a, b)] is None and channel.delivered(t, a, b):
                    first[(a, b)] = t
        pos = {b: pattern.transition(pos[b], t) for b in ids}

    return SimResult(
        ue_ids=ids,
        horizon=scenario.horizon,
        first_hear=first,
        attempts_unfiltered={a: tuple(v) for a, v in unf.items()},
        attempts_filtered={a: tuple(v) for a, v in fil.items()},
    )


def pairwise_first_hear(pattern: Pattern, ra: Resource, rb: Resource, horizon: int) -> Optional[int]:
    """First frame below ``horizon`` in which the two resources sit in different subframes."""
    if ra == rb:
        raise ScenarioError("pair must be two distinct resources")
    pattern.check_domain(ra)
    pattern.check_domain(rb)
    for t in range(horizon):
        if pattern.position_at(ra, t).j != pattern.position_at(rb, t).j:
            return t
    return None


def decode_cost(scenario: Scenario, result: SimResult) -> Dict[int, dict]:
    out = {}
    for a in result.ue_ids:
        u = sum(result.attempts_unfiltered[a])
        f = sum(result.attempts_filtered[a])
        out[a] = {
            "attempts_unfiltered": u,
            "attempts_filtered": f,
            "ratio": f / u if u else None,
        }
    return out
