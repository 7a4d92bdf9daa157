"""Random programs and scenarios, synthesised from typing derivations.

Expressions are only ever built at types the target checker can derive, so
refined-sound programs are accepted by construction. A few extra restrictions
keep the VM oracle meaningful:

* function names come from a ranked pool and a body may only call names of
  higher rank, so every call chain is shorter than the pool even when a
  baseline program dispatches to an unexpected contract;
* fallbacks and constructors never call or transfer;
* in refined mode, address literals name external accounts only (the refined
  rules type a literal as ``address<Top_fb>`` whatever it points at), and
  ``address(c)`` is never produced where the baseline reading would be
  ``address payable``, keeping refined programs inside the baseline fragment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Tuple

from ..checker.baseline import BaselineChecker
from ..checker.refined import RefinedChecker, needs_init
from ..syntax import ast as A
from ..syntax.ast import TypeKind, TypeRepr
from ..syntax.hierarchy import ContractTable, build_table
from ..scenario import Deployment, Eoa, Scenario, TxSpec
from ..vm.state import AddrV, BoolV, UIntV

MODES = ("refined-sound", "baseline-holes")
FUNC_POOL = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")
EOA_ADDRS = (0xE0, 0xE1)
FRESH_ADDR = 0xFF  # never deployed, never funded


def deploy_address(k: int) -> int:
    return 0x100 + k


@dataclass(frozen=True)
class GenConfig:
    seed: int
    mode: str = "refined-sound"
    size_budget: int = 160
    max_contracts: int = 4
    max_functions: int = 3
    max_txs: int = 6

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown fuzz mode {self.mode!r}")

    @property
    def typing(self) -> str:
        return "refined" if self.mode == "refined-sound" else "baseline"

    def with_seed(self, seed: int) -> "GenConfig":
        return replace(self, seed=seed)


def _rng(cfg: GenConfig, salt: str) -> random.Random:
    return random.Random(f"{cfg.mode}:{cfg.seed}:{salt}")


# ---------------------------------------------------------------- plans


@dataclass
class _FnPlan:
    name: str
    params: List[A.Param]
    returns: Optional[TypeRepr]
    visibility: str
    payable: bool
    caller: A.CallerAnnotation

    @property
    def rank(self) -> int:
        return FUNC_POOL.index(self.name)

    def decl(self, body=()) -> A.FunctionDecl:
        return A.FunctionDecl(self.name, tuple(self.params), self.caller, self.visibility,
                              self.payable, self.returns, tuple(body))


@dataclass
class _ContractPlan:
    index: int
    name: str
    parent: Optional[str]
    fallback: bool
    fields: List[A.StateVar]
    fns: List[_FnPlan]

    def skeleton(self) -> A.ContractDecl:
        return A.ContractDecl(
            self.name, self.parent, tuple(self.fields), None,
            tuple(f.decl() for f in self.fns),
            A.Fallback(()) if self.fallback else None,
        )


class _Env:
    """Typing context of the body being generated, in the checker's view."""

    def __init__(self, contract: str, sender: TypeRepr, rank: int, interact: bool,
                 payable: bool) -> None:
        self.contract = contract
        self.sender = sender
        self.rank = rank  # calls may target names of strictly higher rank
        self.interact = interact
        self.payable = payable
        self.scopes: List[Dict[str, TypeRepr]] = [{}]
        self.fields: Dict[str, TypeRepr] = {}
        self.counter = 0

    def visible(self) -> List[Tuple[str, TypeRepr]]:
        out = dict(self.fields)
        for scope in self.scopes:
            out.update(scope)
        return list(out.items())

    def fresh_local(self) -> str:
        self.counter += 1
        return f"t{self.counter}"


# ---------------------------------------------------------------- programs


class _ProgramGen:
    def __init__(self, cfg: GenConfig) -> None:
        self.cfg = cfg
        self.rng = _rng(cfg, "program")
        self.refined = cfg.mode == "refined-sound"
        self.budget = cfg.size_budget
        self.plans: List[_ContractPlan] = []
        self.table: Optional[ContractTable] = None
        self.checker = None
        n_deploy = cfg.max_contracts + 2
        if self.refined:
            self.literals = list(EOA_ADDRS)
        else:
            self.literals = list(EOA_ADDRS) + [deploy_address(k) for k in range(n_deploy)]

    def spend(self, n: int = 1) -> None:
        self.budget -= n

    # -- types

    def source_types(self, below: int, contracts_any: bool) -> List[TypeRepr]:
        """Types that may be written in source; contract types limited to indices < below."""
        names = [p.name for p in self.plans] if contracts_any else [p.name for p in self.plans[:below]]
        out = [A.UINT, A.UINT, A.BOOL, A.BARE_ADDRESS, A.PAYABLE_ADDRESS]
        for n in names:
            out.append(A.contract_type(n))
            if self.refined:
                out.append(A.ref_address(n))
        return out

    def view(self, ty: TypeRepr) -> TypeRepr:
        return self.checker.convert(ty)

    def le(self, a: TypeRepr, b: TypeRepr) -> bool:
        return self.table.subtype(a, b)

    def top_address(self) -> TypeRepr:
        return A.ref_address(A.TOP) if self.refined else A.BARE_ADDRESS

    def payable_address(self) -> TypeRepr:
        return A.ref_address(A.TOP_FB) if self.refined else A.PAYABLE_ADDRESS

    # -- planning

    def plan(self) -> None:
        cfg, rng = self.cfg, self.rng
        if self.budget <= 0 or cfg.max_contracts <= 0:
            return
        n = rng.randint(1, cfg.max_contracts)
        fb_rate = 0.5 if self.refined else 0.3
        for i in range(n):
            if self.budget <= 0:
                break
            self.spend(4)
            parent = None
            if i > 0 and rng.random() < 0.35:
                parent = self.plans[rng.randrange(i)].name
            fallback = rng.random() < fb_rate
            self.plans.append(_ContractPlan(i, f"C{i}", parent, fallback, [], []))
            if parent is not None and any(a.fallback for a in self.ancestors(self.plans[-1])):
                self.plans[-1].fallback = False  # inherited; redeclaring is an error
        for p in self.plans:
            self.plan_members(p)

    def ancestors(self, p: _ContractPlan) -> List[_ContractPlan]:
        out = []
        by_name = {q.name: q for q in self.plans}
        cur = p.parent
        while cur is not None:
            out.append(by_name[cur])
            cur = by_name[cur].parent
        return out

    def plan_members(self, p: _ContractPlan) -> None:
        rng = self.rng
        for k in range(rng.randint(0, 3)):
            self.spend()
            # refined: reference fields only to contracts deployed before this one
            ty = rng.choice(self.source_types(p.index, contracts_any=not self.refined))
            p.fields.append(A.StateVar(ty, f"s{p.index}_{k}"))
        taken = {f.name for a in self.ancestors(p) for f in a.fns}
        free = [n for n in FUNC_POOL if n not in taken]
        rng.shuffle(free)
        for name in sorted(free[: rng.randint(1, self.cfg.max_functions)], key=FUNC_POOL.index):
            self.spend(2)
            params = [A.Param(rng.choice(self.source_types(0, True)), f"a{j}")
                      for j in range(rng.choice((0, 0, 1, 1, 2)))]
            returns = rng.choice(self.return_types(p)) if rng.random() < 0.3 else None
            vis = rng.choice(("external", "external", "public", "public", "private"))
            caller = A.DEFAULT_CALLER
            if self.refined:
                r = rng.random()
                if r < 0.3:
                    caller = A.CallerAnnotation(A.CallerKind.PAYBACK)
                elif r < 0.45:
                    caller = A.CallerAnnotation(A.CallerKind.NAMED, rng.choice(self.plans).name)
            if self.refined and vis == "external" and any(self.erases_payable(q.type) for q in params):
                # baseline reads these parameters as plain address inside the body
                vis = "public"
            p.fns.append(_FnPlan(name, params, returns, vis, rng.random() < 0.3, caller))

    def has_fallback(self, name: str) -> bool:
        p = next(q for q in self.plans if q.name == name)
        return any(q.fallback for q in [p] + self.ancestors(p))

    def erases_payable(self, ty: TypeRepr) -> bool:
        if ty.kind is TypeKind.PAYABLE_ADDRESS:
            return True
        return ty.kind is TypeKind.REF_ADDRESS and self.has_fallback(ty.contract)

    def return_types(self, p: _ContractPlan) -> List[TypeRepr]:
        """Types a body can always produce, so every function can return."""
        own = [A.contract_type(q.name) for q in [p] + self.ancestors(p)]
        return [A.UINT, A.UINT, A.BOOL, A.BARE_ADDRESS, A.PAYABLE_ADDRESS] + own

    # -- expressions

    def expr(self, env: _Env, want: TypeRepr, depth: int = 2) -> Optional[A.Expr]:
        """An expression whose checker type is a subtype of ``want``, or None."""
        rng = self.rng
        options: List[Callable[[], Optional[A.Expr]]] = []
        leaf = depth <= 0 or self.budget <= 0
        for name, ty in env.visible():
            if self.le(ty, want):
                options.append(lambda name=name: A.Var(name))
        k = want.kind
        if k is TypeKind.UINT:
            options += [lambda: A.IntLit(rng.choice((0, 1, 2, 5, 10, 100)))] * 2
            if env.payable:
                options.append(lambda: A.MsgValue())
            if not leaf:
                options.append(lambda: self.arith(env, depth))
                options.append(lambda: self.balance(env, depth))
        elif k is TypeKind.BOOL:
            options.append(lambda: A.BoolLit(rng.random() < 0.7))
            if not leaf:
                options.append(lambda: self.compare(env, depth))
                options.append(lambda: self.logic(env, depth))
        elif k is TypeKind.UINT160:
            if not leaf:
                options.append(lambda: self.cast_u160(env, depth))
        elif want.is_address:
            if self.le(env.sender, want):
                options += [lambda: A.MsgSender()] * 2
            if self.le(self.checker.addr_lit_type(), want):
                options.append(lambda: A.AddrLit(rng.choice(self.literals)))
            if not leaf:
                laundered = self.top_address() if self.refined else A.PAYABLE_ADDRESS
                if self.le(laundered, want):
                    options.append(lambda: self.launder(env, depth))
                options.append(lambda: self.addr_of_contract(env, want, depth))
        elif want.is_contract:
            this_ty = A.contract_type(env.contract)
            if self.le(this_ty, want):
                options.append(lambda: A.This())
            if not leaf:
                options.append(lambda: self.contract_cast(env, want, depth))
        rng.shuffle(options)
        for make in options:
            e = make()
            if e is not None:
                self.spend()
                return e
        return None

    def arith(self, env, depth):
        left = self.expr(env, A.UINT, depth - 1)
        right = self.expr(env, A.UINT, depth - 1)
        if left is None or right is None:
            return None
        return A.BinOp(self.rng.choice(A.ARITH_OPS), left, right)

    def balance(self, env, depth):
        recv = self.expr(env, self.top_address(), depth - 1)
        return A.BalanceOf(recv) if recv is not None else None

    def compare(self, env, depth):
        left = self.expr(env, A.UINT, depth - 1)
        right = self.expr(env, A.UINT, depth - 1)
        if left is None or right is None:
            return None
        return A.BinOp(self.rng.choice(A.ORDER_OPS + A.EQ_OPS), left, right)

    def logic(self, env, depth):
        if self.rng.random() < 0.3:
            inner = self.expr(env, A.BOOL, depth - 1)
            return A.Not(inner) if inner is not None else None
        left = self.expr(env, A.BOOL, depth - 1)
        right = self.expr(env, A.BOOL, depth - 1)
        if left is None or right is None:
            return None
        return A.BinOp(self.rng.choice(A.LOGIC_OPS), left, right)

    def cast_u160(self, env, depth):
        src = self.top_address() if self.rng.random() < 0.7 else A.UINT
        inner = self.expr(env, src, depth - 1)
        return A.Cast(A.UINT160, inner) if inner is not None else None

    def launder(self, env, depth):
        inner = self.cast_u160(env, depth - 1) if depth > 1 else None
        if inner is None:
            inner = self.expr(env, A.UINT160, 0)
        return A.Cast(A.BARE_ADDRESS, inner) if inner is not None else None

    def addr_of_contract(self, env, want, depth):
        if self.refined:
            c = want.contract
            # the baseline reading of address(c) is plain address
            if self.table.contract_le(c, A.TOP_FB):
                return None
            target = c if c in self.plan_names() else self.rng.choice(self.plan_names())
        else:
            if want.kind is not TypeKind.BARE_ADDRESS:
                return None
            target = self.rng.choice(self.plan_names())
        inner = self.expr(env, A.contract_type(target), depth - 1)
        return A.Cast(A.BARE_ADDRESS, inner) if inner is not None else None

    def contract_cast(self, env, want, depth):
        name = want.contract
        if name not in self.plan_names():
            return None
        if self.refined:
            inner = self.expr(env, A.ref_address(name), depth - 1)
        else:
            # unchecked: any address or any contract will do
            src = self.top_address() if self.rng.random() < 0.8 else A.contract_type(
                self.rng.choice(self.plan_names()))
            inner = self.expr(env, src, depth - 1)
        return A.Cast(want, inner) if inner is not None else None

    def plan_names(self) -> List[str]:
        return [p.name for p in self.plans]

    # -- statements

    def callable_from(self, env: _Env):
        """(function plan, owner plan) pairs a body in ``env`` may call."""
        out = []
        for owner in self.plans:
            for f in owner.fns:
                if f.rank <= env.rank:
                    continue
                if f.visibility == "private" and owner.name != env.contract:
                    continue
                if self.refined and not self.table.contract_le(env.contract, f.caller.bound):
                    continue
                out.append((f, owner))
        return out

    def call_stmt(self, env: _Env) -> Optional[A.Stmt]:
        targets = self.callable_from(env)
        if not targets:
            return None
        f, owner = self.rng.choice(targets)
        if f.visibility == "private":
            recv = A.This()
        else:
            recv = self.expr(env, A.contract_type(owner.name), 2)
            if recv is None:
                return None
        info = self.table[owner.name].functions[f.name]
        args = []
        for p in f.params:
            a = self.expr(env, self.checker.param_type(info, p), 1)
            if a is None:
                return None
            args.append(a)
        call = A.Call(recv, f.name, tuple(args))
        if f.returns is not None and self.rng.random() < 0.6:
            name = env.fresh_local()
            env.scopes[-1][name] = self.view(f.returns)
            return A.LocalDecl(f.returns, name, call)
        return A.ExprStmt(call)

    def transfer_stmt(self, env: _Env) -> Optional[A.Stmt]:
        recv = self.expr(env, self.payable_address(), 2)
        if recv is None:
            return None
        r = self.rng.random()
        if r < 0.2 and env.payable:
            amount = A.MsgValue()
        else:
            amount = A.IntLit(self.rng.choice((0, 1, 5, 10, 50)))
        return A.ExprStmt(A.Transfer(recv, amount))

    def local_stmt(self, env: _Env) -> Optional[A.Stmt]:
        ty = self.rng.choice(self.source_types(0, True))
        init = self.expr(env, self.view(ty), 2)
        if init is None:
            return None
        name = env.fresh_local()
        env.scopes[-1][name] = self.view(ty)
        return A.LocalDecl(ty, name, init)

    def assign_stmt(self, env: _Env) -> Optional[A.Stmt]:
        targets = env.visible()
        if not targets:
            return None
        name, ty = self.rng.choice(targets)
        value = self.expr(env, ty, 2)
        return A.Assign(name, value) if value is not None else None

    def require_stmt(self, env: _Env) -> Optional[A.Stmt]:
        cond = self.expr(env, A.BOOL, 2)
        return A.Require(cond) if cond is not None else None

    def if_stmt(self, env: _Env, depth: int) -> Optional[A.Stmt]:
        cond = self.expr(env, A.BOOL, 1)
        if cond is None:
            return None
        then = self.block(env, self.rng.randint(1, 2), depth - 1)
        orelse = self.block(env, self.rng.randint(1, 2), depth - 1) if self.rng.random() < 0.5 else None
        return A.If(cond, tuple(then), tuple(orelse) if orelse is not None else None)

    def block(self, env: _Env, n: int, depth: int = 1) -> List[A.Stmt]:
        env.scopes.append({})
        out = []
        for _ in range(n):
            if self.budget <= 0:
                break
            s = self.stmt(env, depth)
            if s is not None:
                self.spend()
                out.append(s)
        env.scopes.pop()
        return out

    def stmt(self, env: _Env, depth: int) -> Optional[A.Stmt]:
        kinds = ["local", "assign", "assign", "require"]
        if env.interact:
            kinds += ["call", "call", "call", "transfer", "transfer"]
            if not self.refined:
                kinds += ["sender-transfer", "sender-transfer", "call"]
        if depth > 0:
            kinds.append("if")
        self.rng.shuffle(kinds)
        for kind in kinds:
            if kind == "local":
                s = self.local_stmt(env)
            elif kind == "assign":
                s = self.assign_stmt(env)
            elif kind == "require":
                s = self.require_stmt(env)
            elif kind == "call":
                s = self.call_stmt(env)
            elif kind == "transfer":
                s = self.transfer_stmt(env)
            elif kind == "sender-transfer":
                s = A.ExprStmt(A.Transfer(A.MsgSender(), A.IntLit(self.rng.choice((1, 10)))))
            else:
                s = self.if_stmt(env, depth)
            if s is not None:
                return s
        return None

    # -- bodies

    def field_env(self, p: _ContractPlan, env: _Env) -> None:
        info = self.table[p.name]
        env.fields = {v.name: self.view(v.type) for v, _ in info.state_vars}

    def function_body(self, p: _ContractPlan, f: _FnPlan) -> List[A.Stmt]:
        env = _Env(p.name, self.checker.sender_type(f.caller.bound), f.rank, True, f.payable)
        self.field_env(p, env)
        info = self.table[p.name].functions[f.name]
        for prm in f.params:
            env.scopes[0][prm.name] = self.checker.param_type(info, prm)
        body = self.block(env, self.rng.randint(1, 4))
        if f.returns is not None:
            env.scopes.append({})
            value = self.expr(env, self.view(f.returns), 2)
            if value is None:
                value = self.fallback_value(f.returns)
            body.append(A.Return(value))
        return body

    def fallback_value(self, ty: TypeRepr) -> A.Expr:
        """Last resort for a return, valid for every type ``return_types`` offers."""
        if ty.kind is TypeKind.UINT:
            return A.IntLit(0)
        if ty.kind is TypeKind.BOOL:
            return A.BoolLit(False)
        if ty.is_contract:
            return A.This()
        return A.AddrLit(EOA_ADDRS[0])

    def constructor(self, p: _ContractPlan) -> Optional[A.Constructor]:
        """Initialise every reference field first; nothing here calls or transfers."""
        info = self.table[p.name]
        params: List[A.Param] = []
        body: List[A.Stmt] = []
        for v, _ in info.state_vars:
            ty = v.type
            if self.refined:
                if not needs_init(ty):
                    continue
                target = ty.contract
                if self.table.contract_le(p.name, target) and (
                    ty.is_contract or not self.table.contract_le(target, A.TOP_FB)
                ) and self.rng.random() < 0.5:
                    value = A.This() if ty.is_contract else A.Cast(A.BARE_ADDRESS, A.This())
                else:
                    pname = f"_a{len(params)}"
                    if ty.is_contract and self.rng.random() < 0.5:
                        params.append(A.Param(A.ref_address(target), pname))
                        value = A.Cast(ty, A.Var(pname))
                    else:
                        params.append(A.Param(ty, pname))
                        value = A.Var(pname)
                body.append(A.Assign(v.name, value))
            elif ty.is_contract and self.rng.random() < 0.85:
                pname = f"_a{len(params)}"
                params.append(A.Param(A.BARE_ADDRESS, pname))
                body.append(A.Assign(v.name, A.Cast(ty, A.Var(pname))))
        if self.rng.random() < 0.4:
            params.append(A.Param(A.UINT, f"_a{len(params)}"))
        env = _Env(p.name, self.checker.sender_type(A.TOP_FB), len(FUNC_POOL), False, False)
        self.field_env(p, env)
        for prm in params:
            env.scopes[0][prm.name] = self.view(prm.type)
        for _ in range(self.rng.randint(0, 2)):
            if self.budget <= 0:
                break
            s = self.assign_stmt(env)
            if s is not None:
                self.spend()
                body.append(s)
        if not params and not body and self.rng.random() < 0.5:
            return None
        self.spend()
        return A.Constructor(tuple(params), False, tuple(body))

    def fallback(self, p: _ContractPlan) -> Optional[A.Fallback]:
        if not p.fallback:
            return None
        counters = [v.name for v, _ in self.table[p.name].state_vars if v.type == A.UINT]
        if counters and self.rng.random() < 0.6:
            n = self.rng.choice(counters)
            return A.Fallback((A.Assign(n, A.BinOp("+", A.Var(n), A.MsgValue())),))
        return A.Fallback(())

    def generate(self) -> A.Program:
        self.plan()
        if not self.plans:
            return A.Program()
        skeleton = A.Program(tuple(p.skeleton() for p in self.plans))
        self.table, diags = build_table(skeleton)
        assert not diags, diags
        self.checker = (RefinedChecker if self.refined else BaselineChecker)(skeleton, self.table)
        out = []
        for p in self.plans:
            ctor = self.constructor(p)
            fns = tuple(f.decl(self.function_body(p, f)) for f in p.fns)
            out.append(A.ContractDecl(p.name, p.parent, tuple(p.fields), ctor, fns, self.fallback(p)))
        return A.Program(tuple(out))


def generate_program(cfg: GenConfig) -> A.Program:
    """A program accepted by the checker ``cfg.mode`` targets."""
    return _ProgramGen(cfg).generate()


# ---------------------------------------------------------------- scenarios


def _entry_callable(table: ContractTable, contract: str, refined: bool):
    info = table[contract]
    out = []
    for name in sorted(info.functions, key=lambda n: FUNC_POOL.index(n) if n in FUNC_POOL else len(FUNC_POOL)):
        fn = info.functions[name]
        if fn.decl.visibility == "private":
            continue
        if refined and not table.contract_le(A.TOP_FB, fn.decl.caller.bound):
            continue
        out.append(fn)
    return out


def generate_scenario(cfg: GenConfig, program: A.Program, table: ContractTable) -> Scenario:
    """Deploy every contract (in declaration order), then a few entry calls."""
    rng = _rng(cfg, "scenario")
    refined = cfg.mode == "refined-sound"
    eoas = [Eoa(EOA_ADDRS[0], rng.choice((100, 1000))), Eoa(EOA_ADDRS[1], rng.choice((10, 100)))]
    deployed: List[Tuple[int, str]] = []

    def address_for(ty: TypeRepr) -> int:
        if not refined:
            pool = [a for a, _ in deployed] + list(EOA_ADDRS) + [FRESH_ADDR]
            return rng.choice(pool)
        target = ty.contract if ty.contract is not None else (A.TOP_FB if ty.kind is TypeKind.PAYABLE_ADDRESS else A.TOP)
        pool = [a for a, c in deployed if table.contract_le(c, target)]
        if table.contract_le(A.TOP_FB, target):
            pool += list(EOA_ADDRS) + [FRESH_ADDR]
        assert pool, f"nothing deployed fits {ty}"
        return rng.choice(pool)

    def arg_for(ty: TypeRepr):
        if ty.kind is TypeKind.UINT:
            return UIntV(rng.choice((0, 1, 7, 50, (1 << 256) - 1)))
        if ty.kind is TypeKind.UINT160:
            return UIntV(rng.choice((0, 1, EOA_ADDRS[0])))
        if ty.kind is TypeKind.BOOL:
            return BoolV(rng.random() < 0.5)
        return AddrV(address_for(ty))

    deployments = []
    order = [c.name for c in program.contracts]
    extra = [rng.choice(order) for _ in range(rng.randint(0, 2))] if order else []
    for k, name in enumerate(order + extra):
        ctor = table[name].decl.ctor
        args = tuple(arg_for(p.type) for p in (ctor.params if ctor else ()))
        addr = deploy_address(k)
        deployments.append(Deployment(name, addr, args, rng.choice((0, 10, 100, 1000, 1000))))
        deployed.append((addr, name))

    txs = []
    for _ in range(rng.randint(0, cfg.max_txs) if deployed else 0):
        addr, name = rng.choice(deployed)
        fns = _entry_callable(table, name, refined)
        if not fns:
            continue
        fn = rng.choice(fns)
        args = tuple(arg_for(p.type) for p in fn.decl.params)
        # mostly honour payability; the rest exercises NonPayable
        value = 0
        if rng.random() < (0.6 if fn.decl.payable else 0.1):
            value = rng.choice((1, 5, 20))
        sender = rng.choice(EOA_ADDRS)
        txs.append(TxSpec(sender, addr, fn.name, args, value))
    return Scenario(tuple(deployments), tuple(eoas), tuple(txs))
