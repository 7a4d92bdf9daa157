"""The eight acceptance criteria, one test each.

Every test prints a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line; the lines are repeated in the terminal summary.
"""

import contextlib
import itertools
import json
import os
import random
import time

import pytest

from conftest import ACCEPTANCE, load, load_corpus
from fsol import corpus
from fsol.checker import check_baseline, check_refined
from fsol.cli import main
from fsol.fuzz import GenConfig, generate_program, generate_scenario, run_campaign
from fsol.scenario import load_scenario, run_scenario, scenario_from_json, setup_state
from fsol.syntax import ast as A
from fsol.syntax import parse, pretty_print, subtype
from fsol.vm import ChainState, DeployError, ExternalAccount, Machine, Reverted, Success, Transaction, UIntV
from fsol.vm import reason_name

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "baseline_holes_seed1_count1000.json")
WORD = 1 << 256


@contextlib.contextmanager
def criterion(n, title, capsys):
    ok = False
    try:
        yield
        ok = True
    finally:
        line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}"
        ACCEPTANCE.append(line)
        with capsys.disabled():
            print(f"\n{line}")


def _reasons(report):
    return [reason_name(r.outcome.reason) if isinstance(r.outcome, Reverted) else "Success"
            for r in report.results]


def _function_span(src, name):
    for c in parse(src).contracts:
        for f in c.functions:
            if f.name == name:
                return f.span
    raise KeyError(name)


def _within(span, outer):
    return outer.start <= span.start and span.end <= outer.end


def test_criterion_1_counterexample_reproduction(capsys):
    with criterion(1, "baseline accepts the counterexample; both entry points revert with NoFallback", capsys):
        start = time.perf_counter()
        assert main(["check", "--typing", "baseline", corpus.path("counterexample.fsol")]) == 0
        program, table = load_corpus("counterexample.fsol")
        assert check_baseline(program, table) == []
        sc = load_scenario(corpus.path("counterexample.scenario.json"), table)
        runs = [run_scenario(program, table, sc, "baseline") for _ in range(2)]
        elapsed = time.perf_counter() - start
        report = runs[0]
        assert [r.tx.function for r in report.results] == ["callUnsafeContract", "testUnsafeCast"]
        assert _reasons(report) == ["NoFallback", "NoFallback"]
        assert report.final_state == setup_state(Machine(table, "baseline"), sc)
        assert runs[0].to_json() == runs[1].to_json()
        assert elapsed < 1.0


def test_criterion_2_refined_rejects_counterexample(capsys):
    with criterion(2, "refined rejects the counterexample at foo and at the laundered transfer", capsys):
        src = corpus.read("counterexample.fsol")
        diags = check_refined(*load(src))
        foo = _function_span(src, "foo")
        cast = _function_span(src, "testUnsafeCast")
        assert any(d.code == "REF-TRANSFER-NOFALLBACK" and _within(d.span, foo) for d in diags)
        assert any(d.code in ("REF-ADDR-LAUNDER", "REF-TRANSFER-NOFALLBACK") and _within(d.span, cast)
                   for d in diags)


def test_criterion_3_payback_caller_constraint(capsys):
    with criterion(3, "payback variant has exactly one REF-CALLER-CONSTRAINT at test.foo()", capsys):
        src = corpus.read("counterexample_payback.fsol")
        diags = check_refined(*load(src))
        assert [d.code for d in diags] == ["REF-CALLER-CONSTRAINT"]
        (d,) = diags
        assert src[d.span.start:d.span.end] == "test.foo()"
        assert "WithoutFallback" in d.message and "Top_fb" in d.message
        assert "is not a subtype of" in d.message


def test_criterion_4_fixed_program_runs(capsys):
    with criterion(4, "caller with a fallback type checks and receives exactly 10 wei", capsys):
        program, table = load_corpus("fixed.fsol")
        assert check_refined(program, table) == []
        sc = load_scenario(corpus.path("fixed.scenario.json"), table)
        before = setup_state(Machine(table, "refined"), sc)
        report = run_scenario(program, table, sc, "refined")
        assert _reasons(report) == ["Success"] and report.exit_status == 0
        test_at, caller_at = (d.address for d in sc.deployments)
        after = report.final_state
        assert after.balance(test_at) == before.balance(test_at) - 10
        assert after.balance(caller_at) == before.balance(caller_at) + 10
        assert after.total_wei() == before.total_wei()


def test_criterion_5_soundness_campaign(capsys):
    with criterion(5, "refined-sound campaign, 1000 seeds from 1, has no violations", capsys):
        start = time.perf_counter()
        report = run_campaign(GenConfig(1, "refined-sound"), 1000)
        elapsed = time.perf_counter() - start
        assert report.programs == report.accepted == 1000
        assert report.violations == [] and report.exit_status == 0
        for name in ("MessageNotUnderstood", "NoFallback", "TypeConfusion"):
            assert report.histogram[name] == 0
        assert report.transactions > 0
        assert elapsed < 60


def test_criterion_6_unsoundness_witnesses(capsys):
    with criterion(6, "baseline-holes campaign finds witnesses and matches the golden histogram", capsys):
        report = run_campaign(GenConfig(1, "baseline-holes"), 1000)
        assert report.histogram["MessageNotUnderstood"] + report.histogram["NoFallback"] >= 1
        with open(GOLDEN) as fh:
            assert report.to_json() == json.load(fh)


def _order_laws(table):
    types = table.all_types()
    le = {(a, b): subtype(table, a, b) for a in types for b in types}
    for a in types:
        assert le[a, a]
    for a, b, c in itertools.product(types, repeat=3):
        if le[a, b] and le[b, c]:
            assert le[a, c]
    for n in table.by_name:
        assert subtype(table, A.contract_type(n), A.contract_type(A.TOP))
        assert subtype(table, A.contract_type(n), A.contract_type(A.TOP_FB)) == table.has_fallback(n)


def _rollback_and_conservation(min_txs):
    txs = 0
    for seed in itertools.count():
        for mode in ("refined-sound", "baseline-holes"):
            cfg = GenConfig(10_000 + seed, mode, max_txs=24)
            program, table = load(pretty_print(generate_program(cfg)))
            sc = generate_scenario(cfg, program, table)
            machine = Machine(table, cfg.typing)
            try:
                state = setup_state(machine, sc)
            except DeployError:
                continue
            for t in sc.transactions:
                snapshot, total = state.copy(), state.total_wei()
                state, outcome = machine.exec_transaction(state, t.transaction())
                assert state.total_wei() == total
                if isinstance(outcome, Reverted):
                    assert state == snapshot
                txs += 1
        if txs >= min_txs:
            return txs


def _arithmetic():
    _, table = load("contract C { function add(uint a, uint b) external returns (uint) { return a + b; } "
                    "function sub(uint a, uint b) external returns (uint) { return a - b; } }")
    machine = Machine(table)
    state = machine.deploy(ChainState({0xE0: ExternalAccount(0)}), "C", [], 0x10)

    def op(fname, a, b):
        _, o = machine.exec_transaction(state, Transaction(0xE0, 0x10, fname, (UIntV(a), UIntV(b))))
        assert isinstance(o, Success)
        return o.return_value.value

    assert op("sub", 0, 1) == WORD - 1
    rng = random.Random(7)
    edge = [0, 1, 2, WORD - 2, WORD - 1, 1 << 255]
    pairs = list(itertools.product(edge, repeat=2))
    pairs += [(rng.randrange(WORD), rng.randrange(WORD)) for _ in range(500)]
    for a, b in pairs:
        assert op("add", a, b) == (a + b) % WORD
        assert op("sub", a, b) == (a - b) % WORD


def test_criterion_7_property_suites(capsys):
    with criterion(7, "order laws, round-trip, rollback and conservation over 10^4 transactions, wraparound", capsys):
        for name in corpus.programs():
            program, table = load_corpus(name)
            _order_laws(table)
            text = pretty_print(program)
            assert parse(text) == program
            assert pretty_print(parse(text)) == text
        assert _rollback_and_conservation(10_000) >= 10_000
        _arithmetic()


def test_criterion_8_visibility_uniformity(capsys):
    with criterion(8, "public instead of external gives the same acceptance and revert reasons", capsys):
        src = corpus.read("counterexample.fsol")
        public = src.replace("external", "public")
        assert "external" not in public
        sc_doc = json.loads(corpus.read("counterexample.scenario.json"))
        outcomes = []
        for text in (src, public):
            program, table = load(text)
            assert check_baseline(program, table) == []
            report = run_scenario(program, table, scenario_from_json(sc_doc, table=table), "baseline")
            outcomes.append(_reasons(report))
        assert outcomes[0] == outcomes[1] == ["NoFallback", "NoFallback"]
