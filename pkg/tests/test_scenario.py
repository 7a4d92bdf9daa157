import json

import pytest

from conftest import load, load_corpus
from fsol import corpus
from fsol.diagnostics import DiagnosticError
from fsol.scenario import (
    EXIT_EXPECTATION, EXIT_OK, Scenario, load_scenario, run_scenario, scenario_from_json,
    scenario_to_json, setup_state, validate_entry_constraints,
)
from fsol.vm import Machine, Reverted, Success, UIntV, reason_name

E0 = "0x00000000000000000000000000000000000000e0"
A0 = "0x000000000000000000000000000000000000000a"
B0 = "0x000000000000000000000000000000000000000b"


def _codes(exc):
    return [d.code for d in exc.value.diagnostics]


def test_shipped_counterexample_scenario(counterexample):
    _, t = counterexample
    sc = load_scenario(corpus.path("counterexample.scenario.json"), t)
    assert len(sc.deployments) == 2 and len(sc.eoas) == 1 and len(sc.transactions) == 2
    assert [tx.function for tx in sc.transactions] == ["callUnsafeContract", "testUnsafeCast"]


def test_counterexample_run(counterexample):
    program, t = counterexample
    sc = load_scenario(corpus.path("counterexample.scenario.json"), t)
    report = run_scenario(program, t, sc, "baseline")
    assert [reason_name(r.outcome.reason) for r in report.results] == ["NoFallback", "NoFallback"]
    assert report.final_state == setup_state(Machine(t, "baseline"), sc)
    assert report.exit_status == EXIT_OK


def test_fixed_run():
    program, t = load_corpus("fixed.fsol")
    sc = load_scenario(corpus.path("fixed.scenario.json"), t)
    assert validate_entry_constraints(sc, program, t, "refined") == []
    report = run_scenario(program, t, sc, "refined")
    (r,) = report.results
    assert isinstance(r.outcome, Success)
    assert report.final_state.balance(0x0A) == 90
    assert report.final_state.balance(0x0B) == 10


def test_empty_scenario(counterexample):
    program, t = counterexample
    sc = scenario_from_json({"deployments": [], "eoas": [], "transactions": []})
    assert sc == Scenario()
    report = run_scenario(program, t, sc, "baseline")
    assert report.results == [] and report.exit_status == EXIT_OK


def _doc(**over):
    doc = {
        "eoas": [{"address": E0, "balance": "10"}],
        "deployments": [{"contract": "Test", "address": A0}],
        "transactions": [{"from": E0, "to": A0, "function": "foo"}],
    }
    doc.update(over)
    return doc


def test_malformed_address():
    with pytest.raises(DiagnosticError) as info:
        scenario_from_json(_doc(eoas=[{"address": "0x123"}]))
    assert "SCN-FORMAT" in _codes(info)
    assert "malformed address" in str(info.value)


def test_duplicate_address():
    with pytest.raises(DiagnosticError) as info:
        scenario_from_json(_doc(eoas=[{"address": A0}]))
    assert "SCN-DUP-ADDRESS" in _codes(info)


def test_unknown_contract(counterexample):
    _, t = counterexample
    with pytest.raises(DiagnosticError) as info:
        scenario_from_json(_doc(deployments=[{"contract": "Nope", "address": A0}]), table=t)
    assert _codes(info) == ["SCN-UNKNOWN-CONTRACT"]


@pytest.mark.parametrize("doc", [
    [],
    {"eoas": []},
    _doc(transactions=[{"from": E0, "to": A0, "function": "foo", "value": "-1"}]),
    _doc(transactions=[{"from": E0, "to": A0, "function": "foo", "expect": {"outcome": "maybe"}}]),
    _doc(transactions=[{"from": E0, "to": A0, "function": "foo",
                        "expect": {"outcome": "revert", "reason": "Oops"}}]),
    _doc(transactions=[{"from": E0, "to": A0, "function": "foo", "bogus": 1}]),
])
def test_format_errors(doc):
    with pytest.raises(DiagnosticError):
        scenario_from_json(doc)


def test_sender_must_be_eoa():
    with pytest.raises(DiagnosticError) as info:
        scenario_from_json(_doc(transactions=[{"from": A0, "to": A0, "function": "foo"}]))
    assert _codes(info) == ["SCN-SENDER"]


def test_json_round_trip():
    sc = load_scenario(corpus.path("counterexample.scenario.json"))
    assert scenario_from_json(scenario_to_json(sc)) == sc


# -------------------------------------------------------- entry constraints


def _payback_scenario(t):
    return scenario_from_json(_doc(), table=t)


def test_payback_from_eoa_ok():
    program, t = load_corpus("counterexample_payback.fsol")
    assert validate_entry_constraints(_payback_scenario(t), program, t, "refined") == []


def test_bounded_entry_rejected():
    program, t = load_corpus("boo.fsol")
    sc = scenario_from_json(_doc(transactions=[{"from": E0, "to": A0, "function": "boo"}]), table=t)
    diags = validate_entry_constraints(sc, program, t, "refined")
    assert [d.code for d in diags] == ["SCN-CALLER-BOUND"]
    assert validate_entry_constraints(sc, program, t, "baseline") == []


def test_entry_argument_types():
    program, t = load_corpus("fixed.fsol")
    doc = json.loads(corpus.read("fixed.scenario.json"))
    doc["transactions"] = [{"from": E0, "to": B0, "function": "callTest", "args": [{"uint": "1"}]},
                           {"from": E0, "to": B0, "function": "nothing"},
                           {"from": E0, "to": E0, "function": "foo"}]
    sc = scenario_from_json(doc, table=t)
    codes = [d.code for d in validate_entry_constraints(sc, program, t, "refined")]
    assert codes == ["SCN-ARITY", "SCN-TARGET", "SCN-TARGET"]


def test_constructor_argument_must_conform():
    program, t = load_corpus("fixed.fsol")
    doc = json.loads(corpus.read("fixed.scenario.json"))
    doc["deployments"][1]["args"] = [{"address": E0}]
    sc = scenario_from_json(doc, table=t)
    assert [d.code for d in validate_entry_constraints(sc, program, t, "refined")] == ["SCN-ARG-TYPE"]


# -------------------------------------------------------- reports


def test_expectation_mismatch():
    program, t = load_corpus("counterexample.fsol")
    doc = json.loads(corpus.read("counterexample.scenario.json"))
    doc["transactions"][0]["expect"] = {"outcome": "success"}
    report = run_scenario(program, t, scenario_from_json(doc, table=t), "baseline")
    assert [r.passed for r in report.results] == [False, True]
    assert report.exit_status == EXIT_EXPECTATION
    assert "FAIL tx #0" in report.render_text()


def test_deploy_failure_reported():
    program, t = load_corpus("fixed.fsol")
    doc = json.loads(corpus.read("fixed.scenario.json"))
    doc["deployments"][1]["args"] = [{"address": E0}]
    report = run_scenario(program, t, scenario_from_json(doc, table=t), "refined")
    assert report.deploy_error is not None and report.exit_status == EXIT_EXPECTATION


def test_report_is_deterministic(counterexample):
    program, t = counterexample
    sc = load_scenario(corpus.path("counterexample.scenario.json"), t)
    a = run_scenario(program, t, sc, "baseline")
    b = run_scenario(program, t, sc, "baseline")
    assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)
    assert a.trace_jsonl() == b.trace_jsonl()
    for line in a.trace_jsonl().splitlines():
        json.loads(line)


def test_literal_warning():
    src = ("contract N { } contract C { function f() external { "
           "0x000000000000000000000000000000000000000a.transfer(1); } }")
    program, t = load(src)
    sc = scenario_from_json({"eoas": [], "transactions": [],
                             "deployments": [{"contract": "N", "address": A0}]}, table=t)
    report = run_scenario(program, t, sc, "refined")
    assert [w.code for w in report.warnings] == ["SCN-LITERAL-NOFALLBACK"]
