import json
import os
import re

import pytest

from conftest import load
from fsol.checker import check_baseline, check_refined
from fsol.fuzz import GenConfig, generate_program, generate_scenario, run_campaign, run_seed, shrink
from fsol.fuzz.campaign import WITNESS_REASONS
from fsol.fuzz.shrink import admissible, replay
from fsol.scenario import validate_entry_constraints
from fsol.syntax import ast as A
from fsol.syntax import pretty_print
from fsol.vm import Reverted, reason_name

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "baseline_holes_seed1_count1000.json")


def build(cfg):
    program, table = load(pretty_print(generate_program(cfg)), f"seed-{cfg.seed}.fsol")
    return program, table, generate_scenario(cfg, program, table)


def test_budget_zero_is_empty():
    assert generate_program(GenConfig(7, size_budget=0)) == A.Program()


def test_unknown_mode():
    with pytest.raises(ValueError):
        GenConfig(1, "sometimes-sound")


@pytest.mark.parametrize("mode", ["refined-sound", "baseline-holes"])
def test_generation_is_reproducible(mode):
    cfg = GenConfig(11, mode)
    assert pretty_print(generate_program(cfg)) == pretty_print(generate_program(cfg))
    assert build(cfg)[2] == build(cfg)[2]


def test_seed_42_accepted():
    program, table, _ = build(GenConfig(42))
    assert program.contracts
    assert check_refined(program, table) == []


def test_refined_programs_accepted_and_entries_valid():
    for seed in range(300):
        program, table, sc = build(GenConfig(seed))
        assert check_refined(program, table) == [], seed
        assert validate_entry_constraints(sc, program, table, "refined") == [], seed


def test_baseline_programs_accepted():
    for seed in range(300):
        program, table, _ = build(GenConfig(seed, "baseline-holes"))
        assert check_baseline(program, table) == [], seed


def _legacy(source, table):
    """Spell refined annotations the legacy way: address<C> becomes
    ``address payable`` when C has a fallback and ``address`` otherwise."""
    source = source.replace(" payback", "")
    source = re.sub(r" <\w+>(?= (external|public|private))", "", source)

    def erase(m):
        return "address payable" if table.has_fallback(m.group(1)) else "address"

    return re.sub(r"address<(\w+)>", erase, source)


def test_conservativity_over_generator_corpus():
    for seed in range(300):
        src = pretty_print(generate_program(GenConfig(seed)))
        program, table = load(src)
        assert check_refined(program, table) == []
        legacy = _legacy(src, table)
        assert "address<" not in legacy and "payback" not in legacy
        assert check_baseline(*load(legacy)) == [], (seed, legacy)


def test_campaign_reproducible_and_job_independent():
    cfg = GenConfig(100, "baseline-holes")
    a = run_campaign(cfg, 40)
    b = run_campaign(cfg, 40)
    c = run_campaign(cfg, 40, jobs=2)
    assert a.to_json() == b.to_json() == c.to_json()


def test_refined_campaign_clean():
    report = run_campaign(GenConfig(5000), 200)
    assert report.accepted == report.programs == 200
    assert report.violations == []
    for name in ("MessageNotUnderstood", "NoFallback", "TypeConfusion"):
        assert report.histogram[name] == 0
    assert report.transactions > 0


def test_baseline_holes_find_witnesses():
    report = run_campaign(GenConfig(5000, "baseline-holes"), 200)
    assert report.witnesses > 0 and report.witness_seeds
    assert report.violations == []


def test_golden_histogram():
    with open(GOLDEN) as fh:
        golden = json.load(fh)
    report = run_campaign(GenConfig(1, "baseline-holes"), 1000)
    assert report.to_json() == golden


def test_seed_result_fields():
    r = run_seed(GenConfig(3, "baseline-holes"))
    assert r.seed == 3 and r.accepted
    assert len(r.outcomes) <= 6


# -------------------------------------------------------- shrinking


def _witness(reason):
    def holds(err, outcomes):
        return any(isinstance(o, Reverted) and reason_name(o.reason) == reason for o in outcomes)
    return holds


def _size(program, sc):
    return len(pretty_print(program)) + len(sc.transactions) + len(sc.deployments)


def test_shrinker_keeps_witnesses_valid():
    report = run_campaign(GenConfig(1, "baseline-holes"), 60)
    assert report.witness_seeds
    for seed in report.witness_seeds[:5]:
        cfg = GenConfig(seed, "baseline-holes")
        program, table, sc = build(cfg)
        _, outcomes = replay(program, table, sc, "baseline")
        reason = next(reason_name(o.reason) for o in outcomes
                      if isinstance(o, Reverted) and reason_name(o.reason) in WITNESS_REASONS)
        small_p, small_s = shrink(program, sc, "baseline", _witness(reason))
        assert _size(small_p, small_s) <= _size(program, sc)
        ok = admissible(small_p, small_s, "baseline")
        assert ok is not None
        reparsed, t = ok
        assert check_baseline(reparsed, t) == []
        _, outcomes = replay(reparsed, t, small_s, "baseline")
        assert _witness(reason)(None, outcomes)


def test_shrinker_reduces_the_counterexample():
    from fsol import corpus
    from fsol.scenario import load_scenario

    program, table = load(corpus.read("counterexample.fsol"))
    sc = load_scenario(corpus.path("counterexample.scenario.json"), table)
    small_p, small_s = shrink(program, sc, "baseline", _witness("NoFallback"))
    assert len(small_s.transactions) == 1
    assert _size(small_p, small_s) < _size(program, sc)
