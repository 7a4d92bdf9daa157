"""Greedy structural shrinking of (program, scenario) pairs.

A candidate is kept when it still parses back from its printed form, still
passes the mode's checker (and entry validation in refined mode), and the
caller's predicate still holds on a fresh run. No minimality is claimed.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Iterator, List, Optional, Tuple

from ..checker import CHECKERS
from ..diagnostics import errors_only
from ..scenario import Scenario, setup_state, validate_entry_constraints
from ..syntax import ast as A
from ..syntax.hierarchy import ContractTable, build_table
from ..syntax.parser import parse_program
from ..syntax.printer import pretty_print
from ..vm import DeployError, Machine

Outcomes = List[object]
Predicate = Callable[[Optional[Exception], Outcomes], bool]


def replay(program: A.Program, table: ContractTable, sc: Scenario, typing: str):
    """(deploy error or None, per-transaction outcomes)."""
    machine = Machine(table, typing)
    try:
        state = setup_state(machine, sc)
    except DeployError as exc:
        return exc, []
    outcomes = []
    for t in sc.transactions:
        state, outcome = machine.exec_transaction(state, t.transaction())
        outcomes.append(outcome)
    return None, outcomes


def admissible(program: A.Program, sc: Scenario, typing: str) -> Optional[Tuple[A.Program, ContractTable]]:
    """The reparsed program and its table, or None if the pair is not well formed."""
    source = pretty_print(program)
    reparsed, diags = parse_program(source, "<shrink>")
    if diags:
        return None
    table, diags = build_table(reparsed)
    if diags or errors_only(CHECKERS[typing](reparsed, table)):
        return None
    names = {c.name for c in reparsed.contracts}
    if any(d.contract not in names for d in sc.deployments):
        return None
    eoas = {e.address for e in sc.eoas}
    if any(t.sender not in eoas for t in sc.transactions):
        return None
    if validate_entry_constraints(sc, reparsed, table, typing):
        return None
    return reparsed, table


def _without(seq, i):
    return tuple(seq[:i]) + tuple(seq[i + 1:])


def _block_variants(block) -> Iterator[tuple]:
    block = tuple(block)
    for i, s in enumerate(block):
        yield _without(block, i)
        if isinstance(s, A.If):
            yield block[:i] + s.then + block[i + 1:]
            for then in _block_variants(s.then):
                yield block[:i] + (replace(s, then=then),) + block[i + 1:]
            if s.orelse is not None:
                yield block[:i] + (replace(s, orelse=None),) + block[i + 1:]
                for orelse in _block_variants(s.orelse):
                    yield block[:i] + (replace(s, orelse=orelse),) + block[i + 1:]


def _contract_variants(c: A.ContractDecl) -> Iterator[A.ContractDecl]:
    for i in range(len(c.functions)):
        yield replace(c, functions=_without(c.functions, i))
    if c.fallback is not None:
        yield replace(c, fallback=None)
        for body in _block_variants(c.fallback.body):
            yield replace(c, fallback=replace(c.fallback, body=body))
    for i, f in enumerate(c.functions):
        for body in _block_variants(f.body):
            yield replace(c, functions=c.functions[:i] + (replace(f, body=body),) + c.functions[i + 1:])
    if c.ctor is not None:
        for body in _block_variants(c.ctor.body):
            yield replace(c, ctor=replace(c.ctor, body=body))
    for i in range(len(c.state_vars)):
        yield replace(c, state_vars=_without(c.state_vars, i))


def _candidates(program: A.Program, sc: Scenario) -> Iterator[Tuple[A.Program, Scenario]]:
    for i in range(len(sc.transactions)):
        yield program, replace(sc, transactions=_without(sc.transactions, i))
    for i in range(len(sc.deployments)):
        yield program, replace(sc, deployments=_without(sc.deployments, i))
    for i in range(len(program.contracts)):
        yield A.Program(_without(program.contracts, i)), sc
    for i, c in enumerate(program.contracts):
        for v in _contract_variants(c):
            yield A.Program(program.contracts[:i] + (v,) + program.contracts[i + 1:]), sc


def shrink(program: A.Program, sc: Scenario, typing: str, predicate: Predicate,
           max_steps: int = 2000) -> Tuple[A.Program, Scenario]:
    """Greedily delete pieces of ``(program, sc)`` while ``predicate`` keeps holding."""
    steps = 0
    progress = True
    while progress and steps < max_steps:
        progress = False
        for cand_p, cand_s in _candidates(program, sc):
            steps += 1
            if steps >= max_steps:
                break
            ok = admissible(cand_p, cand_s, typing)
            if ok is None:
                continue
            reparsed, table = ok
            try:
                err, outcomes = replay(reparsed, table, cand_s, typing)
            except Exception:  # a malformed candidate is simply not interesting
                continue
            if predicate(err, outcomes):
                program, sc = reparsed, cand_s
                progress = True
                break
    return program, sc
