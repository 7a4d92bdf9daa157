"""Fuzz campaigns: generate, check, run and judge one program per seed."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from ..checker import CHECKERS
from ..diagnostics import errors_only
from ..scenario import (
    EXIT_OK, EXIT_UNSOUND, Scenario, scenario_to_json, setup_state, validate_entry_constraints,
)
from ..syntax.hierarchy import build_table
from ..syntax.parser import parse_program
from ..syntax.printer import pretty_print
from ..vm import FORBIDDEN_REASONS, REVERT_REASONS, DeployError, Machine, Reverted, reason_name
from .generate import GenConfig, generate_program, generate_scenario
from .shrink import shrink

WITNESS_REASONS = ("MessageNotUnderstood", "NoFallback")


@dataclass
class Violation:
    seed: int
    kind: str  # forbidden-revert | checker-rejected | entry-rejected | invariant
    detail: str
    reason: Optional[str] = None
    program: str = ""
    scenario: Optional[dict] = None


@dataclass
class SeedResult:
    seed: int
    accepted: bool
    outcomes: List[str] = field(default_factory=list)  # "Success" or a revert reason name
    deploy_failure: Optional[str] = None
    violations: List[Violation] = field(default_factory=list)


def _forbidden_predicate(reason: str):
    def holds(err, outcomes) -> bool:
        if err is not None and err.reason is not None and reason_name(err.reason) == reason:
            return True
        return any(isinstance(o, Reverted) and reason_name(o.reason) == reason for o in outcomes)
    return holds


def _reproducer(seed, kind, detail, reason, program, sc: Scenario, typing) -> Violation:
    if reason is not None:
        program, sc = shrink(program, sc, typing, _forbidden_predicate(reason))
    return Violation(seed, kind, detail, reason, pretty_print(program), scenario_to_json(sc))


def run_seed(cfg: GenConfig) -> SeedResult:
    typing = cfg.typing
    sound = cfg.mode == "refined-sound"
    source = pretty_print(generate_program(cfg))
    program, diags = parse_program(source, f"seed-{cfg.seed}.fsol")
    table, rdiags = build_table(program)
    errors = errors_only(diags + rdiags) or errors_only(CHECKERS[typing](program, table))
    result = SeedResult(cfg.seed, accepted=not errors)
    if errors:
        result.violations.append(Violation(cfg.seed, "checker-rejected", errors[0].render(), program=source))
        return result
    sc = generate_scenario(cfg, program, table)
    if sound:
        entry = validate_entry_constraints(sc, program, table, typing)
        if entry:
            result.violations.append(Violation(cfg.seed, "entry-rejected", entry[0].render(),
                                               program=source, scenario=scenario_to_json(sc)))
            return result
    machine = Machine(table, typing)
    try:
        state = setup_state(machine, sc)
    except DeployError as exc:
        name = reason_name(exc.reason) if exc.reason is not None else "DeployError"
        result.deploy_failure = name
        if sound and name in FORBIDDEN_REASONS:
            result.violations.append(_reproducer(cfg.seed, "forbidden-revert", str(exc), name,
                                                 program, sc, typing))
        return result
    for i, t in enumerate(sc.transactions):
        before = state.copy()
        total = state.total_wei()
        state, outcome = machine.exec_transaction(state, t.transaction())
        if isinstance(outcome, Reverted):
            name = reason_name(outcome.reason)
            if state != before:
                result.violations.append(Violation(cfg.seed, "invariant", f"tx #{i}: revert did not restore the state",
                                                   name, source, scenario_to_json(sc)))
            if sound and name in FORBIDDEN_REASONS:
                result.violations.append(_reproducer(
                    cfg.seed, "forbidden-revert", f"tx #{i} {t.function}: {outcome.reason.explain()}",
                    name, program, sc, typing))
        else:
            name = "Success"
        if state.total_wei() != total:
            result.violations.append(Violation(cfg.seed, "invariant", f"tx #{i}: total wei changed",
                                               name, source, scenario_to_json(sc)))
        result.outcomes.append(name)
    return result


@dataclass
class CampaignReport:
    mode: str
    seed: int
    count: int
    programs: int = 0
    accepted: int = 0
    transactions: int = 0
    histogram: Dict[str, int] = field(default_factory=dict)
    deploy_failures: Dict[str, int] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)
    witness_seeds: List[int] = field(default_factory=list)

    @property
    def exit_status(self) -> int:
        return EXIT_UNSOUND if self.violations else EXIT_OK

    @property
    def witnesses(self) -> int:
        return sum(self.histogram.get(r, 0) for r in WITNESS_REASONS)

    def to_json(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k != "violations"}
        out["violations"] = [asdict(v) for v in self.violations]
        out["exit_status"] = self.exit_status
        return out

    def render_text(self) -> str:
        rows = [
            ("mode", self.mode),
            ("seeds", f"{self.seed}..{self.seed + self.count - 1}" if self.count else "none"),
            ("programs generated", self.programs),
            ("accepted by checker", self.accepted),
            ("transactions executed", self.transactions),
        ]
        lines = [f"{k:<24}{v}" for k, v in rows]
        lines.append("outcomes:")
        for name, n in self.histogram.items():
            lines.append(f"  {name:<22}{n}")
        if self.deploy_failures:
            lines.append("deployment failures:")
            for name, n in self.deploy_failures.items():
                lines.append(f"  {name:<22}{n}")
        if self.mode == "baseline-holes":
            lines.append(f"{'unsoundness witnesses':<24}{self.witnesses} revert(s) in {len(self.witness_seeds)} program(s)")
        lines.append(f"{'violations':<24}{len(self.violations)}")
        for v in self.violations:
            lines.append(f"  seed {v.seed}: {v.kind}: {v.detail}")
        return "\n".join(lines) + "\n"


def merge(cfg: GenConfig, count: int, results: List[SeedResult]) -> CampaignReport:
    report = CampaignReport(cfg.mode, cfg.seed, count)
    report.histogram = {name: 0 for name in ("Success",) + REVERT_REASONS}
    for r in sorted(results, key=lambda r: r.seed):
        report.programs += 1
        report.accepted += r.accepted
        report.transactions += len(r.outcomes)
        for name in r.outcomes:
            report.histogram[name] += 1
        if r.deploy_failure is not None:
            report.deploy_failures[r.deploy_failure] = report.deploy_failures.get(r.deploy_failure, 0) + 1
        if any(name in WITNESS_REASONS for name in r.outcomes):
            report.witness_seeds.append(r.seed)
        report.violations.extend(r.violations)
    report.deploy_failures = dict(sorted(report.deploy_failures.items()))
    return report


def write_reproducers(report: CampaignReport, out_dir: str) -> List[str]:
    written = []
    if not report.violations:
        return written
    os.makedirs(out_dir, exist_ok=True)
    for v in report.violations:
        base = os.path.join(out_dir, f"seed-{v.seed}")
        with open(base + ".fsol", "w", encoding="utf-8") as fh:
            fh.write(v.program)
        written.append(base + ".fsol")
        if v.scenario is not None:
            with open(base + ".scenario.json", "w", encoding="utf-8") as fh:
                json.dump(v.scenario, fh, indent=2)
                fh.write("\n")
            written.append(base + ".scenario.json")
    return written


def run_campaign(cfg: GenConfig, count: int, jobs: int = 1,
                 out_dir: Optional[str] = None) -> CampaignReport:
    """Seeds ``cfg.seed .. cfg.seed + count - 1``; the report does not depend on ``jobs``."""
    cfgs = [cfg.with_seed(cfg.seed + i) for i in range(count)]
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_seed, cfgs, chunksize=max(1, count // (jobs * 4))))
    else:
        results = [run_seed(c) for c in cfgs]
    report = merge(cfg, count, results)
    if out_dir is not None:
        write_reproducers(report, out_dir)
    return report
