"""Exhaustive checks of hopping-pattern properties.

Every check walks the whole pattern domain (and, for frame-dependent maps,
every frame below ``frames``). Counterexamples are the first offending
resource in lexicographic order, so reports are deterministic.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence

from .grid import GridShape, Resource
from .patterns import Family, Pattern, PatternError, PatternSpec, make_pattern

PASS, FAIL, NA = "pass", "fail", "n/a"


@dataclass
class PropertyReport:
    name: str
    status: str
    checked: int = 0
    counterexample: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def applicable(self) -> bool:
        return self.status != NA


@dataclass(frozen=True)
class FeatureRow:
    label: str
    time_hopping: str
    frequency_hopping: str
    independent_of_t: str
    has_invariant: str

    @property
    def flags(self):
        return (self.time_hopping, self.frequency_hopping, self.independent_of_t, self.has_invariant)


def default_frames(pattern: Pattern) -> int:
    return 2 * math.lcm(pattern.m, pattern.n)


def _res(r: Resource) -> List[int]:
    return [r.i, r.j]


def hop_maps(pattern: Pattern, frames: Optional[int] = None) -> List[tuple]:
    """``[(t, [(r, M_t(r)) ...])]``; one map with ``t=None`` when frame-independent."""
    dom = pattern.domain()
    if pattern.frame_independent:
        return [(None, [(r, pattern.step(r)) for r in dom])]
    return [(t, [(r, pattern.transition(r, t)) for r in dom])
            for t in range(frames if frames is not None else default_frames(pattern))]


def _with_frame(cx: Dict[str, Any], t: Optional[int]) -> Dict[str, Any]:
    if t is not None:
        cx = {"frame": t, **cx}
    return cx


def check_bijection(pattern: Pattern, frames: Optional[int] = None, maps=None) -> PropertyReport:
    checked = 0
    for t, pairs in maps if maps is not None else hop_maps(pattern, frames):
        seen: Dict[Resource, Resource] = {}
        for r, img in pairs:
            checked += 1
            if not pattern.in_domain(img):
                return PropertyReport("bijection", FAIL, checked,
                                      _with_frame({"resource": _res(r), "image": _res(img),
                                                   "reason": "image outside domain"}, t))
            if img in seen:
                return PropertyReport("bijection", FAIL, checked,
                                      _with_frame({"resources": [_res(seen[img]), _res(r)],
                                                   "image": _res(img),
                                                   "reason": "duplicate image"}, t))
            seen[img] = r
    return PropertyReport("bijection", PASS, checked)


def check_half_duplex(pattern: Pattern, frames: Optional[int] = None, maps=None) -> PropertyReport:
    """Resources sharing a subframe must land in distinct subframes next frame."""
    checked = 0
    for t, pairs in maps if maps is not None else hop_maps(pattern, frames):
        # per current subframe j: next subframe -> resource that went there
        landed: Dict[int, Dict[int, Resource]] = {}
        for r, img in pairs:
            checked += 1
            row = landed.setdefault(r.j, {})
            if img.j in row:
                return PropertyReport("half_duplex", FAIL, checked,
                                      _with_frame({"resources": [_res(row[img.j]), _res(r)],
                                                   "next_subframe": img.j}, t))
            row[img.j] = r
    return PropertyReport("half_duplex", PASS, checked)


def check_frequency_hopping(pattern: Pattern, frames: Optional[int] = None, maps=None) -> PropertyReport:
    checked = 0
    for t, pairs in maps if maps is not None else hop_maps(pattern, frames):
        for r, img in pairs:
            checked += 1
            if img.i == r.i:
                return PropertyReport("frequency_hopping", FAIL, checked,
                                      _with_frame({"resource": _res(r), "image": _res(img)}, t))
    return PropertyReport("frequency_hopping", PASS, checked)


def check_time_hopping(pattern: Pattern, frames: Optional[int] = None, maps=None) -> PropertyReport:
    """Passes when at least one resource changes subframe."""
    checked = moved = 0
    first_static = None
    for t, pairs in maps if maps is not None else hop_maps(pattern, frames):
        for r, img in pairs:
            checked += 1
            if img.j != r.j:
                moved += 1
            elif first_static is None:
                first_static = _with_frame({"resource": _res(r), "image": _res(img)}, t)
    frac = Fraction(moved, checked) if checked else Fraction(0)
    details = {"moving_fraction": str(frac), "moving_fraction_float": float(frac)}
    if moved:
        return PropertyReport("time_hopping", PASS, checked, None, details)
    return PropertyReport("time_hopping", FAIL, checked, first_static, details)


def check_invariant(pattern: Pattern, modulus_override: Optional[int] = None, maps=None) -> PropertyReport:
    if not pattern.has_invariant:
        return PropertyReport("invariant", NA, 0, None, {"reason": "family has no hopping invariant"})
    q = modulus_override if modulus_override is not None else pattern.invariant_modulus
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    checked = 0
    pairs = maps[0][1] if maps is not None else hop_maps(pattern)[0][1]
    raw = pattern.raw_invariant
    values = {r: raw(r) % q for r, _ in pairs}
    for r, img in pairs:
        a = values[r]
        b = values[img] if img in values else raw(img) % q
        checked += 1
        if a != b:
            return PropertyReport("invariant", FAIL, checked,
                                  {"resource": _res(r), "image": _res(img), "values": [a, b], "modulus": q},
                                  {"modulus": q})
    return PropertyReport("invariant", PASS, checked, None, {"modulus": q})


def check_frame_independence(pattern: Pattern, frames_to_check: Optional[int] = None) -> PropertyReport:
    """Rebuild every per-frame map from ``position_at`` and require them all equal."""
    frames = frames_to_check if frames_to_check is not None else default_frames(pattern)
    if frames < 1:
        raise ValueError(f"frames_to_check must be >= 1, got {frames}")
    starts = pattern.domain()
    cur = [pattern.position_at(r0, 0) for r0 in starts]
    first: Optional[Dict[Resource, Resource]] = None
    checked = 0
    for t in range(frames):
        nxt = [pattern.position_at(r0, t + 1) for r0 in starts]
        m_t = dict(zip(cur, nxt))
        checked += len(m_t)
        if first is None:
            first = m_t
        else:
            for r in sorted(m_t):
                if m_t[r] != first.get(r):
                    return PropertyReport("frame_independence", FAIL, checked, {
                        "resource": _res(r),
                        "frame_a": 0, "image_a": _res(first[r]),
                        "frame_b": t, "image_b": _res(m_t[r]),
                    }, {"frames": frames})
        cur = nxt
    return PropertyReport("frame_independence", PASS, checked, None, {"frames": frames})


def verify_all(pattern: Pattern, frames_to_check: Optional[int] = None) -> List[PropertyReport]:
    maps = hop_maps(pattern, frames_to_check)
    return [
        check_bijection(pattern, maps=maps),
        check_half_duplex(pattern, maps=maps),
        check_frequency_hopping(pattern, maps=maps),
        check_time_hopping(pattern, maps=maps),
        check_invariant(pattern, maps=maps if pattern.frame_independent else None),
        check_frame_independence(pattern, frames_to_check),
    ]


def all_passed(reports: Iterable[PropertyReport]) -> bool:
    return all(r.passed for r in reports if r.applicable)


def check_conditions(pattern: Pattern) -> List[PropertyReport]:
    """Bijection plus the three hopping conditions (half duplex, frequency hop, invariant)."""
    maps = hop_maps(pattern)
    return [
        check_bijection(pattern, maps=maps),
        check_half_duplex(pattern, maps=maps),
        check_frequency_hopping(pattern, maps=maps),
        check_invariant(pattern, maps=maps),
    ]


def _sweep_one(spec: PatternSpec):
    reports = check_conditions(make_pattern(spec))
    return spec, reports


def sweep(specs: Sequence[PatternSpec], workers: Optional[int] = None) -> List[tuple]:
    """Run :func:`check_conditions` over many patterns, one pattern per worker task."""
    if workers == 1 or len(specs) < 64:
        return [_sweep_one(s) for s in specs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_sweep_one, specs, chunksize=32))


DEFAULT_TABLE_PARAMS = {
    "QC0": {"c": 0},
    "QC1": {"c": 1},
    Family.A1: {"u": 2, "v": 1},
    Family.A2: {},
    Family.B1: {"c": 1, "e": 1, "f": 0},
    Family.B2: {"c": 1, "e": 1, "f": 0},
}


def _yn(flag: bool) -> str:
    return "Y" if flag else "N"


def feature_row(pattern: Pattern, frames: Optional[int] = None) -> FeatureRow:
    inv = check_invariant(pattern)
    return FeatureRow(
        pattern.label,
        _yn(check_time_hopping(pattern, frames).passed),
        _yn(check_frequency_hopping(pattern, frames).passed),
        _yn(check_frame_independence(pattern, frames).passed),
        _yn(inv.passed),
    )


def feature_table(shape: GridShape, params: Optional[Dict] = None,
                  frames: Optional[int] = None) -> List[FeatureRow]:
    """The six-row comparison table (QC c≡0, QC c≢0, A1, A2, B1, B2)."""
    chosen = dict(DEFAULT_TABLE_PARAMS)
    if params:
        chosen.update(params)
    rows = []
    entries = [
        ("QC(c≡0)", Family.QC, chosen["QC0"]),
        ("QC(c≢0)", Family.QC, chosen["QC1"]),
        ("type A1", Family.A1, chosen[Family.A1]),
        ("type A2", Family.A2, chosen[Family.A2]),
        ("type B1", Family.B1, chosen[Family.B1]),
        ("type B2", Family.B2, chosen[Family.B2]),
    ]
    for label, fam, p in entries:
        try:
            pat = make_pattern(PatternSpec(fam, shape, p))
        except PatternError:
            rows.append(FeatureRow(label, NA, NA, NA, NA))
            continue
        row = feature_row(pat, frames)
        rows.append(FeatureRow(label, *row.flags))
    return rows


def report_to_dict(r: PropertyReport) -> Dict[str, Any]:
    d = {"property": r.name, "status": r.status, "checked": r.checked}
    if r.counterexample is not None:
        d["counterexample"] = r.counterexample
    if r.details:
        d["details"] = r.details
    return d


def valid_specs(family: Family, shape: GridShape) -> List[PatternSpec]:
    """Every valid parameter choice for a family on a shape.

    u, c, e, f range over residues mod m and v over residues mod n (v enters
    the subframe coordinate, so v and v + m give different maps).
    """
    m, n = shape.m, shape.n
    fam = Family(family)
    if fam is Family.QC:
        cands = [{"c": c} for c in range(m)]
    elif fam is Family.A2:
        cands = [{}]
    elif fam is Family.A1:
        cands = [{"u": u, "v": v} for u in range(m) for v in range(n)]
    else:
        cands = [{"c": c, "e": e, "f": f} for c in range(m) for e in range(1, m) for f in range(m)]
    out = []
    for p in cands:
        spec = PatternSpec(fam, shape, p)
        try:
            make_pattern(spec)
        except PatternError:
            continue
        out.append(spec)
    return out
