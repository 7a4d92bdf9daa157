import pytest

from conftest import codes, expr, load, load_corpus
from fsol import corpus
from fsol.checker import (
    check_baseline, check_call_constraint, check_refined, elaborate_legacy, refined_signature,
    refined_type_of,
)
from fsol.checker.baseline import baseline_env, baseline_type_of
from fsol.checker.refined import RefinedChecker, refined_env
from fsol.diagnostics import render_text
from fsol.syntax import ast as A
from fsol.syntax import parse, subtype


def check(src):
    return check_refined(*load(src))


def _inside(src, name, span):
    """True when ``span`` falls inside the body of function ``name``."""
    for c in parse(src).contracts:
        for f in c.functions:
            if f.name == name:
                return f.span.start <= span.start and span.end <= f.span.end
    raise KeyError(name)


# -------------------------------------------------------- corpus


def test_counterexample_rejected():
    src = corpus.read("counterexample.fsol")
    diags = check_refined(*load_corpus("counterexample.fsol"))
    nofb = [d for d in diags if d.code == "REF-TRANSFER-NOFALLBACK"]
    assert any(_inside(src, "foo", d.span) for d in nofb)
    laundered = [d for d in diags if d.code in ("REF-ADDR-LAUNDER", "REF-TRANSFER-NOFALLBACK")
                 and _inside(src, "testUnsafeCast", d.span)]
    assert laundered
    # the unchecked cast in the constructor is a downcast from address<Top>
    assert "REF-BAD-CAST" in codes(diags)


def test_payback_variant_has_one_caller_error():
    src = corpus.read("counterexample_payback.fsol")
    diags = check_refined(*load_corpus("counterexample_payback.fsol"))
    assert codes(diags) == ["REF-CALLER-CONSTRAINT"]
    (d,) = diags
    assert src[d.span.start:d.span.end] == "test.foo()"
    assert "WithoutFallback" in d.message and "Top_fb" in d.message
    assert "is not a subtype of" in d.message


def test_fixed_accepted():
    assert check_refined(*load_corpus("fixed.fsol")) == []


def test_boo_body_accepted():
    src = corpus.read("boo.fsol")
    diags = check_refined(*load_corpus("boo.fsol"))
    assert not any(_inside(src, "boo", d.span) for d in diags)


def test_boo_callable_only_by_its_bound():
    base = corpus.read("boo.fsol")
    caller = "contract Other { function go(Test t) external { t.boo(); } }\n"
    assert codes(check(base + caller)) == ["REF-ADDR-LAUNDER", "REF-CALLER-CONSTRAINT"]


def test_payback_sugar_is_byte_identical():
    a = corpus.read("counterexample_payback.fsol")
    b = a.replace("payback", "<Top_fb>")  # same length, so spans line up
    da = check_refined(*load(a, "x.fsol"))
    db = check_refined(*load(b, "x.fsol"))
    assert render_text(da) == render_text(db)
    assert da == db


# -------------------------------------------------------- expression rules


@pytest.mark.parametrize("bound", ["Top", "Top_fb", "WithoutFallback", "Test"])
def test_msg_sender_follows_bound(counterexample, bound):
    _, t = counterexample
    ty, diags = refined_type_of(refined_env(t, "Test", bound), t, A.MsgSender())
    assert ty == A.ref_address(bound) and diags == []


def test_constructor_and_fallback_bounds():
    src = """
    contract F {
        constructor() payable { msg.sender.transfer(1); }
        function() external payable { msg.sender.transfer(1); }
    }
    """
    diags = check(src)
    assert codes(diags) == ["REF-TRANSFER-NOFALLBACK"]
    assert diags[0].span.line == 4


def test_payback_transfer_ok():
    assert check("contract T { function f() payback external { msg.sender.transfer(10); } }") == []


def test_default_transfer_rejected():
    diags = check("contract T { function f() external { msg.sender.transfer(10); } }")
    assert codes(diags) == ["REF-TRANSFER-NOFALLBACK"]


@pytest.mark.parametrize("text, want", [
    ("0x00000000000000000000000000000000000000e0", A.ref_address("Top_fb")),
    ("address(this)", A.ref_address("Test")),
    ("address(uint160(msg.sender))", A.ref_address("Top")),
    ("uint160(msg.sender)", A.UINT160),
    ("Test(this)", A.contract_type("Test")),
    ("Test(address(this))", A.contract_type("Test")),
    ("this.balance", A.UINT),
])
def test_expression_types(counterexample, text, want):
    _, t = counterexample
    ty, diags = refined_type_of(refined_env(t, "Test", "Top_fb"), t, expr(text))
    assert diags == [] and ty == want


def test_laundered_transfer_rejected_but_baseline_accepts(counterexample):
    _, t = counterexample
    e = expr("address(uint160(msg.sender)).transfer(1)")
    ty, diags = refined_type_of(refined_env(t, "Test", "Top_fb"), t, e)
    assert codes(diags) == ["REF-TRANSFER-NOFALLBACK"]
    ty, diags = baseline_type_of(baseline_env(t, "Test"), t, e)
    assert diags == []


def test_laundered_assignment():
    src = "contract C { function f(address a) public { address payable p = address(uint160(a)); } }"
    assert codes(check(src)) == ["REF-ADDR-LAUNDER"]


def test_downcast_rejected():
    src = """
    contract A { }
    contract B is A { function g() external { } }
    contract C { function f(A a, address<A> x) external { B(a).g(); B(x).g(); } }
    """
    assert codes(check(src)) == ["REF-BAD-CAST", "REF-BAD-CAST"]


def test_upcasts_only():
    src = """
    contract A { }
    contract B is A { function() external payable { } }
    contract C is B {
        function f(C c, address<C> x) external {
            A a = A(c);
            B b = B(x);
            A a2 = A(address(this));
            C c2 = C(this);
            address payable p = address(b);
        }
    }
    """
    program, table = load(src)
    checker = RefinedChecker(program, table)
    assert checker.run() == []
    assert len(checker.cast_log) == 4
    for operand, target in checker.cast_log:
        assert subtype(table, A.contract_type(operand.contract), target)


def test_cast_log_over_corpus():
    for name in corpus.programs():
        program, table = load_corpus(name)
        checker = RefinedChecker(program, table)
        checker.run()
        for operand, target in checker.cast_log:
            assert table.contract_le(operand.contract, target.contract)


# -------------------------------------------------------- elaboration


@pytest.mark.parametrize("ty, want", [
    (A.BARE_ADDRESS, A.ref_address("Top")),
    (A.PAYABLE_ADDRESS, A.ref_address("Top_fb")),
    (A.UINT, A.UINT),
    (A.BOOL, A.BOOL),
    (A.UINT160, A.UINT160),
    (A.contract_type("Test"), A.contract_type("Test")),
    (A.ref_address("Test"), A.ref_address("Test")),
])
def test_elaborate_legacy(ty, want):
    assert elaborate_legacy(ty) == want
    assert elaborate_legacy(elaborate_legacy(ty)) == elaborate_legacy(ty)


def test_elaborated_signature():
    _, t = load("contract C { function f(address a, address payable b) payback public returns (address) "
                "{ return a; } }")
    sig = refined_signature(t["C"].functions["f"])
    assert sig.params == (A.ref_address("Top"), A.ref_address("Top_fb"))
    assert sig.returns == A.ref_address("Top")
    assert sig.caller_bound == "Top_fb"
    assert (sig.visibility, sig.payable) == ("public", False)


# -------------------------------------------------------- call constraint


def _sig(t, contract, fname):
    return refined_signature(t[contract].functions[fname])


def test_call_constraint_examples():
    _, t = load_corpus("counterexample_payback.fsol")
    foo = _sig(t, "Test", "foo")
    d = check_call_constraint(t, "WithoutFallback", foo)
    assert d is not None and d.code == "REF-CALLER-CONSTRAINT"
    assert "WithoutFallback" in d.message and "Top_fb" in d.message

    _, t = load_corpus("counterexample.fsol")
    for c in list(t.by_name):
        assert check_call_constraint(t, c, _sig(t, "Test", "foo")) is None

    _, t = load_corpus("boo.fsol")
    assert check_call_constraint(t, "WithoutFallback", _sig(t, "Test", "boo")) is None
    assert check_call_constraint(t, "Test", _sig(t, "Test", "boo")) is not None


# -------------------------------------------------------- extra rules


def test_uninitialised_reference_field():
    src = "contract T { } contract C { T t; function f() external { } }"
    assert codes(check(src)) == ["REF-UNINIT-FIELD"]
    ok = "contract T { } contract C { T t; constructor(T x) { t = x; } }"
    assert check(ok) == []


def test_field_read_before_init():
    src = "contract T { } contract C { T t; T u; constructor(T x) { u = t; t = x; } }"
    assert "REF-UNINIT-FIELD" in codes(check(src))


def test_missing_return():
    src = "contract C { function f(bool b) external returns (uint) { if (b) { return 1; } } }"
    assert codes(check(src)) == ["REF-MISSING-RETURN"]
    ok = "contract C { function f(bool b) external returns (uint) { if (b) { return 1; } else { return 2; } } }"
    assert check(ok) == []


# -------------------------------------------------------- conservativity


def _legacy(src):
    return src.replace("payback", "")


@pytest.mark.parametrize("name", ["fixed.fsol"])
def test_accepted_corpus_also_passes_baseline(name):
    program, table = load_corpus(name)
    assert check_refined(program, table) == []
    assert check_baseline(*load(_legacy(corpus.read(name)))) == []


def test_deterministic():
    src = corpus.read("counterexample.fsol")
    assert check(src) == check(src)
