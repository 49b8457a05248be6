"""JSON/CSV encodings for scenarios, reports, traces, partitions and results.

Scenario files are JSON::

    {
      "shape": {"m": 5, "n": 10},
      "pattern": {"family": "A1", "u": 2, "v": 1},
      "ues": [{"id": 0, "start": [1, 0], "service_type": 0}, ...],
      "channel": {"kind": "erasure", "p_rx": 0.5, "seed": 7},
      "horizon": 32,
      "filtering": {"enabled": true, "service_map": {"0": [0]}, "interest": {"0": [3]}}
    }

Defaults: channel ideal (p_rx 1, seed 0), horizon 32, filtering disabled.
``"ues": "full"`` occupies every domain resource (ids in lexicographic
resource order, service type = invariant value, or 0 without an invariant).
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Dict, Iterable, List, Optional

from .grid import GridShape, Resource
from .patterns import PARAM_NAMES, Family, Pattern, PatternError, PatternSpec, make_pattern
from .sim import (DEFAULT_HORIZON, ERASURE, IDEAL, ChannelModel, Filtering, Scenario,
                  ScenarioError, SimResult, UEConfig, decode_cost)
from .verifier import FeatureRow, PropertyReport, all_passed, report_to_dict


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _int(value: Any, key: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value}")
    return value


def _obj(value: Any, key: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(key, f"expected an object, got {value!r}")
    return value


def _int_set(value: Any, key: str) -> frozenset:
    if not isinstance(value, list):
        raise ConfigError(key, f"expected a list of integers, got {value!r}")
    return frozenset(_int(v, f"{key}[{k}]", 0) for k, v in enumerate(value))


def _int_key(k: str, key: str) -> int:
    try:
        return int(k)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected an integer key, got {k!r}") from None


def _known(d: dict, allowed: Iterable[str], key: str):
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"{key}.{extra[0]}" if key else extra[0], "unknown key")


def pattern_spec_from_dict(shape_d: Any, pattern_d: Any) -> PatternSpec:
    shape_d = _obj(shape_d, "shape")
    _known(shape_d, ("m", "n"), "shape")
    m = _int(shape_d.get("m"), "shape.m", 1)
    n = _int(shape_d.get("n"), "shape.n", 1)
    pattern_d = _obj(pattern_d, "pattern")
    if "family" not in pattern_d:
        raise ConfigError("pattern.family", "missing")
    try:
        fam = Family.parse(pattern_d["family"])
    except PatternError as exc:
        raise ConfigError("pattern.family", str(exc)) from None
    _known(pattern_d, ("family",) + PARAM_NAMES[fam], "pattern")
    params = {k: _int(pattern_d[k], f"pattern.{k}") for k in PARAM_NAMES[fam] if k in pattern_d}
    try:
        return PatternSpec(fam, GridShape(m, n), params)
    except (TypeError, ValueError) as exc:
        raise ConfigError("shape", str(exc)) from None


def full_occupancy(pattern: Pattern) -> List[UEConfig]:
    return [UEConfig(k, r, pattern.invariant(r).value if pattern.has_invariant else 0)
            for k, r in enumerate(pattern.domain())]


def scenario_from_dict(d: Any) -> Scenario:
    d = _obj(d, "<root>")
    _known(d, ("shape", "pattern", "ues", "channel", "horizon", "filtering"), "")
    for k in ("shape", "pattern", "ues"):
        if k not in d:
            raise ConfigError(k, "missing")
    spec = pattern_spec_from_dict(d["shape"], d["pattern"])
    try:
        pattern = make_pattern(spec)
    except PatternError as exc:
        raise ConfigError("pattern", str(exc)) from None

    raw_ues = d["ues"]
    if raw_ues == "full":
        ues = full_occupancy(pattern)
    else:
        if not isinstance(raw_ues, list):
            raise ConfigError("ues", f"expected a list or \"full\", got {raw_ues!r}")
        ues = []
        for k, u in enumerate(raw_ues):
            key = f"ues[{k}]"
            u = _obj(u, key)
            _known(u, ("id", "start", "service_type"), key)
            start = u.get("start")
            if not (isinstance(start, list) and len(start) == 2):
                raise ConfigError(f"{key}.start", f"expected [i, j], got {start!r}")
            ues.append(UEConfig(
                _int(u.get("id"), f"{key}.id", 0),
                Resource(_int(start[0], f"{key}.start[0]"), _int(start[1], f"{key}.start[1]")),
                _int(u.get("service_type", 0), f"{key}.service_type", 0),
            ))

    ch = _obj(d.get("channel", {}), "channel")
    _known(ch, ("kind", "p_rx", "seed"), "channel")
    kind = ch.get("kind", IDEAL)
    if kind not in (IDEAL, ERASURE):
        raise ConfigError("channel.kind", f"expected 'ideal' or 'erasure', got {kind!r}")
    p_rx = ch.get("p_rx", 1.0)
    if isinstance(p_rx, bool) or not isinstance(p_rx, (int, float)) or not 0 <= p_rx <= 1:
        raise ConfigError("channel.p_rx", f"expected a number in [0, 1], got {p_rx!r}")
    seed = _int(ch.get("seed", 0), "channel.seed", 0)
    if seed >= 2**64:
        raise ConfigError("channel.seed", "must fit in 64 bits")
    channel = ChannelModel(kind, float(p_rx), seed)

    horizon = _int(d.get("horizon", DEFAULT_HORIZON), "horizon", 1)

    filtering = None
    if "filtering" in d:
        f = _obj(d["filtering"], "filtering")
        _known(f, ("enabled", "service_map", "interest"), "filtering")
        enabled = f.get("enabled", True)
        if not isinstance(enabled, bool):
            raise ConfigError("filtering.enabled", f"expected true/false, got {enabled!r}")
        if enabled:
            smap = None
            if f.get("service_map") is not None:
                sm = _obj(f["service_map"], "filtering.service_map")
                smap = {_int_key(k, f"filtering.service_map.{k}"): _int_set(v, f"filtering.service_map.{k}")
                        for k, v in sm.items()}
            it = _obj(f.get("interest", {}), "filtering.interest")
            interest = {_int_key(k, f"filtering.interest.{k}"): _int_set(v, f"filtering.interest.{k}")
                        for k, v in it.items()}
            filtering = Filtering(smap, interest)

    return Scenario(spec, ues, channel, horizon, filtering)


def scenario_to_dict(s: Scenario) -> dict:
    spec = s.pattern
    d = {
        "shape": {"m": spec.shape.m, "n": spec.shape.n},
        "pattern": {"family": spec.family.value, **spec.params},
        "ues": [{"id": u.id, "start": [u.start.i, u.start.j], "service_type": u.service_type}
                for u in s.ues],
        "channel": {"kind": s.channel.kind, "p_rx": s.channel.p_rx, "seed": s.channel.seed},
        "horizon": s.horizon,
    }
    if s.filtering is not None:
        f = s.filtering
        d["filtering"] = {
            "enabled": True,
            "service_map": None if f.service_map is None else
            {str(k): sorted(v) for k, v in sorted(f.service_map.items())},
            "interest": {str(k): sorted(v) for k, v in sorted(f.interest.items())},
        }
    return d


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return scenario_from_dict(data)


def result_to_dict(scenario: Scenario, result: SimResult) -> dict:
    ids = result.ue_ids
    costs = decode_cost(scenario, result)
    return {
        "pattern": scenario.pattern.to_dict(),
        "horizon": result.horizon,
        "ues": list(ids),
        "summary": result.summary(),
        "cdf": result.cdf(),
        "pairs": [{"rx": a, "tx": b, "first_hear": result.first_hear[(a, b)]}
                  for a in ids for b in ids if a != b],
        "mutual": [{"a": a, "b": b, "frame": result.mutual(a, b)}
                   for a in ids for b in ids if a < b],
        "decode": [{"ue": a,
                    "per_frame_unfiltered": list(result.attempts_unfiltered[a]),
                    "per_frame_filtered": list(result.attempts_filtered[a]),
                    **costs[a]} for a in ids],
    }


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def cdf_csv(result: SimResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["frame", "discovered_fraction"])
    for t, v in enumerate(result.cdf()):
        w.writerow([t, repr(v)])
    return buf.getvalue()


def trace_rows(pattern: Pattern, start: Resource, frames: int) -> List[Dict[str, Any]]:
    return [{"frame": p.frame, "i": p.resource.i, "j": p.resource.j,
             "invariant": p.invariant.value if p.invariant is not None else None}
            for p in pattern.trajectory(start, frames)]


def trace_csv(rows: List[Dict[str, Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["frame", "i", "j", "invariant"])
    for r in rows:
        w.writerow([r["frame"], r["i"], r["j"], "" if r["invariant"] is None else r["invariant"]])
    return buf.getvalue()


def partition_rows(pattern: Pattern) -> List[Dict[str, Any]]:
    return [{"value": k.value, "modulus": k.modulus, "size": len(v),
             "members": [[r.i, r.j] for r in v]}
            for k, v in pattern.invariant_partition().items()]


def table_rows(rows: List[FeatureRow]) -> List[Dict[str, str]]:
    return [{"pattern": r.label, "time_hopping": r.time_hopping,
             "frequency_hopping": r.frequency_hopping,
             "independent_of_t": r.independent_of_t, "has_invariant": r.has_invariant}
            for r in rows]


def reports_doc(pattern: Pattern, reports: List[PropertyReport]) -> dict:
    return {"pattern": pattern.spec.to_dict(), "all_passed": all_passed(reports),
            "reports": [report_to_dict(r) for r in reports]}
