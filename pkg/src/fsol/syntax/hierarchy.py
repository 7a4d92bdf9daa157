"""Contract hierarchy resolution and the nominal subtype relation.

Two synthetic contracts sit at the top of every hierarchy: ``Top`` has no
members at all, and ``Top_fb`` (a child of ``Top``) has nothing but an empty
payable fallback. ``Contract(C) <= Contract(Top_fb)`` therefore holds exactly
for the contracts that can receive a plain transfer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..diagnostics import Diagnostic, DiagnosticError, error
from . import ast as A
from .ast import TOP, TOP_FB, TypeKind, TypeRepr


@dataclass(frozen=True)
class FunctionInfo:
    decl: A.FunctionDecl
    owner: str

    @property
    def name(self) -> str:
        return self.decl.name


@dataclass
class ContractInfo:
    name: str
    parent: Optional[str]
    chain: Tuple[str, ...]  # self first, ending at Top
    decl: A.ContractDecl
    state_vars: List[Tuple[A.StateVar, str]] = field(default_factory=list)
    functions: Dict[str, FunctionInfo] = field(default_factory=dict)
    fallback: Optional[Tuple[A.Fallback, str]] = None

    @property
    def has_fallback(self) -> bool:
        return self.fallback is not None

    @property
    def synthetic(self) -> bool:
        return self.name in A.RESERVED_CONTRACTS

    def state_var(self, name: str) -> Optional[A.StateVar]:
        for v, _ in self.state_vars:
            if v.name == name:
                return v
        return None


_TOP_DECL = A.ContractDecl(TOP, None)
_TOP_FB_DECL = A.ContractDecl(TOP_FB, TOP, fallback=A.Fallback(()))


class ContractTable:
    def __init__(self, infos: Dict[str, ContractInfo]) -> None:
        self.by_name = infos

    def __contains__(self, name: str) -> bool:
        return name in self.by_name

    def __getitem__(self, name: str) -> ContractInfo:
        return self.by_name[name]

    def names(self) -> List[str]:
        return list(self.by_name)

    def user_contracts(self) -> List[ContractInfo]:
        return [c for c in self.by_name.values() if not c.synthetic]

    def has_fallback(self, name: str) -> bool:
        return self.by_name[name].has_fallback

    def lookup_function(self, contract: str, fname: str) -> Optional[FunctionInfo]:
        info = self.by_name.get(contract)
        return info.functions.get(fname) if info else None

    def contract_le(self, c: str, d: str) -> bool:
        """``Contract(c) <= Contract(d)``."""
        if c == d or d == TOP:
            return True
        if c not in self.by_name:
            return False
        if d == TOP_FB and self.by_name[c].has_fallback:
            return True
        return d in self.by_name[c].chain

    def subtype(self, a: TypeRepr, b: TypeRepr) -> bool:
        return subtype(self, a, b)

    def all_types(self) -> List[TypeRepr]:
        """Every type expressible over this table."""
        out = [A.UINT, A.UINT160, A.BOOL, A.BARE_ADDRESS, A.PAYABLE_ADDRESS]
        for n in self.by_name:
            out.append(A.ref_address(n))
            out.append(A.contract_type(n))
        return out


def subtype(t: ContractTable, a: TypeRepr, b: TypeRepr) -> bool:
    if a == b:
        return True
    if a.kind is b.kind and a.kind in (TypeKind.CONTRACT, TypeKind.REF_ADDRESS):
        return t.contract_le(a.contract, b.contract)
    return a.kind is TypeKind.PAYABLE_ADDRESS and b.kind is TypeKind.BARE_ADDRESS


# ---------------------------------------------------------------- resolution


def _type_names(ty: Optional[TypeRepr]) -> List[str]:
    if ty is not None and ty.contract is not None:
        return [ty.contract]
    return []


def _referenced_types(c: A.ContractDecl):
    """(type, span) pairs for every type written in ``c``."""
    for v in c.state_vars:
        yield v.type, v.span
    bodies = []
    if c.ctor is not None:
        for p in c.ctor.params:
            yield p.type, p.span
        bodies.append(c.ctor.body)
    for f in c.functions:
        for p in f.params:
            yield p.type, p.span
        if f.returns is not None:
            yield f.returns, f.span
        bodies.append(f.body)
    if c.fallback is not None:
        bodies.append(c.fallback.body)
    for body in bodies:
        for s in A.iter_stmts(body):
            if isinstance(s, A.LocalDecl):
                yield s.type, s.span
            for root in A.stmt_exprs(s):
                for e in A.iter_exprs(root):
                    if isinstance(e, A.Cast):
                        yield e.target, e.span


def build_table(p: A.Program) -> Tuple[ContractTable, List[Diagnostic]]:
    """Resolve ``p`` into a table, returning it together with any diagnostics.

    The table is always usable: offending declarations are dropped or
    reattached under ``Top`` so later passes can keep going.
    """
    diags: List[Diagnostic] = []
    decls: Dict[str, A.ContractDecl] = {TOP: _TOP_DECL, TOP_FB: _TOP_FB_DECL}
    for c in p.contracts:
        if c.name in A.RESERVED_CONTRACTS:
            diags.append(error("RES-RESERVED", f"reserved contract name '{c.name}'", c.span))
        elif c.name in decls:
            diags.append(error("RES-DUP-CONTRACT", f"duplicate contract name '{c.name}'", c.span))
        else:
            decls[c.name] = c

    parents: Dict[str, Optional[str]] = {TOP: None, TOP_FB: TOP}
    for name, c in decls.items():
        if name in parents:
            continue
        parent = c.parent or TOP
        if parent not in decls:
            diags.append(error("RES-UNKNOWN-PARENT", f"contract '{name}' inherits from unknown contract '{parent}'", c.span))
            parent = TOP
        parents[name] = parent

    # Break cycles: every member of a cycle is reported and reparented to Top.
    for name in list(parents):
        seen = []
        cur: Optional[str] = name
        while cur is not None and cur not in seen:
            seen.append(cur)
            cur = parents[cur]
        if cur is not None and cur == name:
            diags.append(error("RES-CYCLE", f"inheritance cycle through '{name}': {' -> '.join(seen + [name])}", decls[name].span))
    for name, c in decls.items():
        cur, seen = name, set()
        while cur is not None and cur not in seen:
            seen.add(cur)
            cur = parents[cur]
        if cur is not None:
            parents[name] = TOP

    infos: Dict[str, ContractInfo] = {}

    def build(name: str) -> ContractInfo:
        if name in infos:
            return infos[name]
        c = decls[name]
        parent = parents[name]
        if parent is None:
            info = ContractInfo(name, None, (name,), c)
        else:
            base = build(parent)
            info = ContractInfo(
                name, parent, (name,) + base.chain, c,
                list(base.state_vars), dict(base.functions), base.fallback,
            )
        inherited = {v.name for v, _ in info.state_vars} | set(info.functions)
        own: set = set()
        for v in c.state_vars:
            if v.name in own or v.name in inherited:
                diags.append(error("RES-DUP-MEMBER", f"duplicate member '{v.name}' in contract '{name}'", v.span))
                continue
            own.add(v.name)
            info.state_vars.append((v, name))
        for f in c.functions:
            if f.name in own or f.name in inherited:
                diags.append(error("RES-DUP-MEMBER", f"duplicate member '{f.name}' in contract '{name}'", f.span))
                continue
            own.add(f.name)
            info.functions[f.name] = FunctionInfo(f, name)
            pnames = [p.name for p in f.params]
            for i, pn in enumerate(pnames):
                if pn in pnames[:i]:
                    diags.append(error("RES-DUP-PARAM", f"duplicate parameter '{pn}' in function '{f.name}'", f.params[i].span))
        if c.ctor is not None:
            pnames = [p.name for p in c.ctor.params]
            for i, pn in enumerate(pnames):
                if pn in pnames[:i]:
                    diags.append(error("RES-DUP-PARAM", f"duplicate parameter '{pn}' in constructor of '{name}'", c.ctor.params[i].span))
        if c.fallback is not None:
            if info.fallback is not None and not info.synthetic:
                diags.append(error("RES-DUP-MEMBER", f"contract '{name}' redeclares the fallback function inherited from '{info.fallback[1]}'", c.fallback.span))
            else:
                info.fallback = (c.fallback, name)
        infos[name] = info
        return info

    for name in decls:
        build(name)

    for c in p.contracts:
        if decls.get(c.name) is not c:
            continue
        for ty, span in _referenced_types(c):
            for n in _type_names(ty):
                if n not in decls:
                    diags.append(error("RES-UNKNOWN-TYPE", f"unknown contract type '{n}'", span))
        for f in c.functions:
            if f.caller.kind is A.CallerKind.NAMED and f.caller.name not in decls:
                diags.append(error("RES-UNKNOWN-TYPE", f"caller annotation names unknown contract '{f.caller.name}'", f.caller.span or f.span))

    diags.sort(key=lambda d: d.span.start if d.span else -1)
    return ContractTable(infos), diags


def resolve_hierarchy(p: A.Program) -> ContractTable:
    table, diags = build_table(p)
    if diags:
        raise DiagnosticError(diags)
    return table
