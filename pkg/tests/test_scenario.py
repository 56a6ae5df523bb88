import pytest
import yaml

from xchainsim.errors import ConfigError
from xchainsim.scenario import (RunReport, SchemaError, build_run_report, bundled_scenarios,
                                load_scenario, parse_scenario, run_scenario)
from xchainsim.sim import dump_events, load_events

MINIMAL = """
name: minimal-oft
seed: 4
chains:
  - {label: ethereum, block_interval: 12, is_ethereum: true}
  - {label: arbitrum}
families:
  - {name: O, standard: oft, decimals: 18, shared_decimals: 6}
steps:
  - {op: transfer, family: O, src: ethereum, dst: arbitrum, from: alice, to: bob, amount: 123456789}
  - {op: settle}
"""


def parse(text):
    return parse_scenario(yaml.safe_load(text), "test")


def test_minimal_config_parses_and_runs():
    config = parse(MINIMAL)
    assert config.seed == 4 and config.world.families[0].shared_decimals == 6
    report, _ = run_scenario(config)
    assert report.passed
    (rec,) = report.records
    assert rec["status"] == "delivered"


def test_guardian_threshold_above_set_size():
    data = yaml.safe_load(MINIMAL)
    data.update(guardians=13, guardian_threshold=14)
    with pytest.raises(ConfigError, match="threshold"):
        parse_scenario(data, "test")


def test_superchain_non_member_destination():
    data = yaml.safe_load(MINIMAL)
    data["chains"].append({"label": "base", "block_interval": 2, "superchain": True})
    data["families"] = [{"name": "S", "standard": "superchain", "chains": ["base", "ethereum"]}]
    data["steps"] = []
    with pytest.raises(ConfigError, match="ethereum"):
        parse_scenario(data, "test")


def test_type_errors_are_located():
    data = yaml.safe_load(MINIMAL)
    data["steps"][0]["amount"] = "lots"
    with pytest.raises(SchemaError, match=r"steps\[0\]\.amount: expected"):
        parse_scenario(data, "test")


def test_unknown_keys_and_ops_are_rejected():
    data = yaml.safe_load(MINIMAL)
    data["steps"].append({"op": "teleport"})
    with pytest.raises(SchemaError, match="teleport"):
        parse_scenario(data, "test")
    data = yaml.safe_load(MINIMAL)
    data["families"][0]["colour"] = "red"
    with pytest.raises(SchemaError, match="colour"):
        parse_scenario(data, "test")


def test_unknown_family_reference():
    data = yaml.safe_load(MINIMAL)
    data["steps"][0]["family"] = "Q"
    with pytest.raises(ConfigError, match="Q"):
        parse_scenario(data, "test")


def test_expected_error_is_recorded():
    data = yaml.safe_load(MINIMAL)
    data["steps"].insert(0, {"op": "transfer", "family": "O", "src": "ethereum", "dst": "arbitrum",
                             "from": "alice", "to": "bob", "amount": 10**24,
                             "expect_error": "InsufficientBalance"})
    report, _ = run_scenario(parse_scenario(data, "test"))
    assert report.steps[0]["status"] == "expected_error"
    assert report.passed


def test_bundled_scenarios_listed():
    names = bundled_scenarios()
    for n in ("five-standards-smoke", "guardian-breach-13", "guardian-hold-12", "pause-semantics",
              "connext-fast-path", "campaign-5chain"):
        assert n in names


@pytest.mark.parametrize("name,passes", [
    ("five-standards-smoke", True), ("guardian-hold-12", True), ("pause-semantics", True),
    ("connext-fast-path", True), ("guardian-breach-13", False)])
def test_bundled_outcomes(name, passes):
    report, _ = run_scenario(load_scenario(name))
    assert report.passed is passes


def test_breach_is_an_illegitimate_mint():
    report, _ = run_scenario(load_scenario("guardian-breach-13"))
    fail = report.invariant_report.failures()
    assert list(fail) == ["conservation"]
    assert "illegitimate mint" in fail["conservation"]["detail"]
    assert report.transfers["illegitimate_credits"] == 1


def test_pause_semantics_statuses():
    report, _ = run_scenario(load_scenario("pause-semantics"))
    status = {r["standard"]: r["status"] for r in report.records}
    assert status == {"xerc20": "stranded", "oft": "stranded", "ntt": "stranded",
                      "cct": "delivered", "superchain": "delivered"}
    for fam in ("X", "O", "N"):
        assert report.invariants["families"][fam]["stranded"] == 1000


def test_connext_fee():
    report, _ = run_scenario(load_scenario("connext-fast-path"))
    assert report.fees["xerc20"]["liquidity"]["token"] == "500"


def test_report_round_trip_and_replay():
    report, events = run_scenario(load_scenario("five-standards-smoke"))
    assert RunReport.from_json(report.to_json()).to_json() == report.to_json()
    replayed = build_run_report(load_events(dump_events(events)))
    assert replayed.to_json() == report.to_json()


def test_runs_are_deterministic():
    config = load_scenario("five-standards-smoke")
    a_report, a_events = run_scenario(config, 9)
    b_report, b_events = run_scenario(load_scenario("five-standards-smoke"), 9)
    assert dump_events(a_events) == dump_events(b_events)
    assert a_report.to_json() == b_report.to_json()


def test_load_from_path(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text(MINIMAL)
    assert load_scenario(str(path)).world.name == "minimal-oft"
    with pytest.raises(ConfigError):
        load_scenario(str(tmp_path / "missing.yaml"))


def test_superchain_runs_carry_pre_production_note():
    report, _ = run_scenario(load_scenario("pause-semantics"))
    assert any("pre-production" in n for n in report.notes)
    report, _ = run_scenario(load_scenario("guardian-hold-12"))
    assert report.notes == []
