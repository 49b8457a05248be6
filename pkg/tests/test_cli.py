import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dhop.cli import main
from d2dhop.grid import GridShape, Resource
from d2dhop.patterns import Family, PatternSpec, make_pattern
from d2dhop.serialize import ConfigError, scenario_from_dict, scenario_to_dict
from d2dhop.sim import ChannelModel, Filtering, Scenario, UEConfig

from oracles import qc_position


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_exit_codes(capsys):
    assert run_cli(capsys, "verify", "--family", "a1", "--m", "15", "--n", "30", "--u", "2", "--v", "7")[0] == 0
    code, out, _ = run_cli(capsys, "verify", "--family", "qc", "--m", "3", "--n", "6", "--c", "1")
    assert code == 1 and "frame_independence   fail" in out
    code, _, err = run_cli(capsys, "verify", "--family", "a1", "--m", "9", "--n", "12", "--u", "2", "--v", "1")
    assert code == 2 and "m must divide n" in err


def test_verify_json(capsys):
    code, out, _ = run_cli(capsys, "verify", "--family", "b2", "--m", "3", "--n", "6",
                           "--c", "1", "--e", "2", "--f", "0", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["all_passed"]
    assert [r["property"] for r in doc["reports"]] == [
        "bijection", "half_duplex", "frequency_hopping", "time_hopping", "invariant", "frame_independence"]


def test_verify_rejects_foreign_parameter(capsys):
    code, _, err = run_cli(capsys, "verify", "--family", "a2", "--m", "5", "--n", "5", "--c", "1")
    assert code == 2 and "--c" in err


@pytest.mark.parametrize("argv", [
    ["verify", "--family", "zz", "--m", "3", "--n", "3"],
    ["verify", "--family", "a1", "--m", "x", "--n", "3"],
    ["verify", "--family", "b1", "--m", "0", "--n", "3", "--c", "1", "--e", "1", "--f", "0"],
    ["verify", "--family", "b1", "--m", "3", "--n", "6", "--c", "1", "--e", "1"],
    ["nonsense"],
    [],
])
def test_malformed_input_exits_2(capsys, argv):
    assert main(argv) == 2


def test_table(capsys):
    code, out, _ = run_cli(capsys, "table", "--m", "5", "--n", "10", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["matches_reference"]
    assert [r["pattern"] for r in doc["rows"]] == [
        "QC(c≡0)", "QC(c≢0)", "type A1", "type A2", "type B1", "type B2"]
    code2, out2, _ = run_cli(capsys, "table", "--format", "json")
    assert code2 == 0 and out2 == out
    assert run_cli(capsys, "table", "--m", "4", "--n", "8")[0] == 2


def test_trace(capsys):
    code, out, _ = run_cli(capsys, "trace", "--family", "a1", "--m", "3", "--n", "6", "--u", "2", "--v", "1",
                           "--start", "1,0", "--frames", "3")
    assert code == 0
    assert out.splitlines() == ["frame,i,j,invariant", "0,1,0,5", "1,2,1,5", "2,1,0,5", "3,2,1,5"]
    code, out, _ = run_cli(capsys, "trace", "--family", "b1", "--m", "3", "--n", "6", "--c", "1", "--e", "1",
                           "--f", "0", "--start", "0,0", "--frames", "1", "--format", "json")
    assert json.loads(out) == [{"frame": 0, "i": 0, "j": 0, "invariant": 0},
                               {"frame": 1, "i": 1, "j": 0, "invariant": 0}]
    assert run_cli(capsys, "trace", "--family", "a1", "--m", "3", "--n", "6", "--u", "2", "--v", "1",
                   "--start", "0,0")[0] == 2
    assert run_cli(capsys, "trace", "--family", "a1", "--m", "3", "--n", "6", "--u", "2", "--v", "1",
                   "--start", "nope")[0] == 2


def test_trace_frame_dependent_has_empty_invariant(capsys):
    code, out, _ = run_cli(capsys, "trace", "--family", "qc", "--m", "3", "--n", "6", "--c", "1",
                           "--start", "1,0", "--frames", "3")
    expected = ["%d,%d,%d," % (t, *qc_position(3, 6, 1, 1, 0, t)) for t in range(4)]
    assert code == 0 and out.splitlines()[1:] == expected


def test_partition(capsys):
    code, out, _ = run_cli(capsys, "partition", "--family", "a1", "--m", "3", "--n", "6", "--u", "2", "--v", "1",
                           "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 6 and all(r["size"] == 2 and r["modulus"] == 6 for r in rows)
    rows = json.loads(run_cli(capsys, "partition", "--family", "qc", "--m", "3", "--n", "6", "--c", "0",
                              "--format", "json")[1])
    assert [r["size"] for r in rows] == [6, 6, 6]
    rows = json.loads(run_cli(capsys, "partition", "--family", "b1", "--m", "3", "--n", "6", "--c", "1",
                              "--e", "1", "--f", "0", "--format", "json")[1])
    assert len(rows) == 3 and sum(r["size"] for r in rows) == 18
    code, _, err = run_cli(capsys, "partition", "--family", "qc", "--m", "3", "--n", "6", "--c", "1")
    assert code == 2 and "no hopping invariant" in err


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


FULL_A1 = {"shape": {"m": 5, "n": 10}, "pattern": {"family": "A1", "u": 2, "v": 1}, "ues": "full",
           "horizon": 6}


def test_simulate_full_a1(tmp_path, capsys):
    cfg = _write(tmp_path, "s.json", FULL_A1)
    out = tmp_path / "r.json"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["summary"]["max_mutual"] == 1
    assert doc["summary"]["undiscovered_pairs"] == 0
    assert len(doc["pairs"]) == 40 * 39


def test_simulate_erasure_p1_matches_ideal(tmp_path, capsys):
    ideal = _write(tmp_path, "a.json", FULL_A1)
    er = _write(tmp_path, "b.json", {**FULL_A1, "channel": {"kind": "erasure", "p_rx": 1, "seed": 3}})
    main(["simulate", "--config", ideal, "--out", str(tmp_path / "a.out")])
    main(["simulate", "--config", er, "--out", str(tmp_path / "b.out")])
    a = json.loads((tmp_path / "a.out").read_text())
    b = json.loads((tmp_path / "b.out").read_text())
    assert a["pairs"] == b["pairs"] and a["summary"] == b["summary"]


def test_simulate_empty_interest(tmp_path, capsys):
    cfg = _write(tmp_path, "s.json", {**FULL_A1, "filtering": {"enabled": True, "interest": {"0": []}}})
    code, out, _ = run_cli(capsys, "simulate", "--config", cfg)
    doc = json.loads(out)
    assert code == 0
    assert doc["decode"][0]["attempts_filtered"] == 0


def test_simulate_csv(tmp_path, capsys):
    cfg = _write(tmp_path, "s.json", FULL_A1)
    code, out, _ = run_cli(capsys, "simulate", "--config", cfg, "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "frame,discovered_fraction" and len(lines) == 7


@pytest.mark.parametrize("doc, key", [
    ({**FULL_A1, "horizon": "ten"}, "horizon"),
    ({**FULL_A1, "shape": {"m": 5}}, "shape.n"),
    ({**FULL_A1, "pattern": {"u": 2, "v": 1}}, "pattern.family"),
    ({**FULL_A1, "pattern": {"family": "A1", "u": 2, "v": 1, "c": 3}}, "pattern.c"),
    ({**FULL_A1, "ues": [{"id": 0, "start": [1]}]}, "ues[0].start"),
    ({**FULL_A1, "ues": [{"id": -1, "start": [1, 0]}]}, "ues[0].id"),
    ({**FULL_A1, "channel": {"kind": "erasure", "p_rx": 2}}, "channel.p_rx"),
    ({**FULL_A1, "channel": {"kind": "foggy"}}, "channel.kind"),
    ({**FULL_A1, "filtering": {"interest": {"x": [1]}}}, "filtering.interest.x"),
    ({**FULL_A1, "colour": 1}, "colour"),
])
def test_config_errors_name_key(doc, key):
    with pytest.raises(ConfigError) as exc:
        scenario_from_dict(doc)
    assert exc.value.key == key


def test_simulate_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2
    dup = _write(tmp_path, "dup.json", {**FULL_A1, "ues": [{"id": 0, "start": [1, 0]}, {"id": 1, "start": [1, 0]}]})
    code, _, err = run_cli(capsys, "simulate", "--config", dup)
    assert code == 2 and "already used" in err
    qc = _write(tmp_path, "qc.json", {"shape": {"m": 3, "n": 6}, "pattern": {"family": "QC", "c": 1},
                                     "ues": "full", "filtering": {"enabled": True}})
    assert main(["simulate", "--config", qc]) == 2


def test_defaults():
    s = scenario_from_dict({"shape": {"m": 3, "n": 6}, "pattern": {"family": "B1", "c": 1, "e": 1, "f": 0},
                            "ues": [{"id": 0, "start": [0, 0]}]})
    assert s.channel == ChannelModel("ideal", 1.0, 0)
    assert s.horizon == 32 and s.filtering is None
    s = scenario_from_dict({**FULL_A1, "filtering": {"enabled": False, "interest": {"0": [1]}}})
    assert s.filtering is None


@st.composite
def scenarios(draw):
    fam = draw(st.sampled_from(["A1", "B1", "B2", "QC"]))
    m = draw(st.sampled_from([3, 5]))
    n = m * draw(st.integers(1, 2))
    params = {"A1": {"u": 2, "v": 1}, "B1": {"c": 1, "e": 1, "f": 2}, "B2": {"c": 2, "e": 1, "f": 0},
              "QC": {"c": draw(st.integers(0, m - 1))}}[fam]
    spec = PatternSpec(Family(fam), GridShape(m, n), params)
    p = make_pattern(spec)
    starts = draw(st.lists(st.sampled_from(p.domain()), min_size=1, max_size=6, unique=True))
    ues = [UEConfig(k * 3, r, p.invariant(r).value if p.has_invariant else 0) for k, r in enumerate(starts)]
    channel = draw(st.sampled_from([ChannelModel(), ChannelModel("erasure", 0.25, 99)]))
    filtering = None
    if p.has_invariant and draw(st.booleans()):
        smap = draw(st.one_of(st.none(), st.just({k: frozenset({k}) for k in range(p.invariant_modulus)})))
        filtering = Filtering(smap, {ues[0].id: frozenset(draw(st.sets(st.integers(0, 4))))})
    return Scenario(spec, ues, channel, draw(st.integers(1, 40)), filtering)


@settings(max_examples=60, deadline=None)
@given(scenarios())
def test_scenario_round_trip(s):
    doc = scenario_to_dict(s)
    assert scenario_from_dict(json.loads(json.dumps(doc))) == s
