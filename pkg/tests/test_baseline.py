import pytest

from conftest import codes, expr, load, load_corpus
from fsol import corpus
from fsol.checker import baseline_type_of, check_baseline
from fsol.checker.baseline import baseline_env
from fsol.syntax import ast as A
from fsol.syntax import parse


def check(src):
    return check_baseline(*load(src))


def test_counterexample_compiles(counterexample):
    assert check_baseline(*counterexample) == []


def test_transfer_on_bare_address():
    diags = check("contract C { function f(address a) public { a.transfer(1); } }")
    assert codes(diags) == ["BAS-TRANSFER-NONPAYABLE"]
    assert diags[0].span.line == 1


def test_empty_contract():
    assert check("contract C { }") == []


@pytest.mark.parametrize("text, want", [
    ("msg.sender", A.PAYABLE_ADDRESS),
    ("address(uint160(a))", A.PAYABLE_ADDRESS),
    ("Test(a)", A.contract_type("Test")),
    ("Test(msg.sender)", A.contract_type("Test")),
    ("uint160(a)", A.UINT160),
    ("address(test)", A.BARE_ADDRESS),
    ("0x00000000000000000000000000000000000000e0", A.PAYABLE_ADDRESS),
    ("a.balance", A.UINT),
    ("test.balance + 1", A.UINT),
])
def test_expression_types(counterexample, text, want):
    _, t = counterexample
    env = baseline_env(t, "WithoutFallback", a=A.BARE_ADDRESS)
    ty, diags = baseline_type_of(env, t, expr(text))
    assert diags == []
    assert ty == want


def test_contract_cast_ignores_hierarchy(counterexample):
    _, t = counterexample
    env = baseline_env(t, "Test")
    ty, diags = baseline_type_of(env, t, expr("WithoutFallback(this)"))
    assert ty == A.contract_type("WithoutFallback") and diags == []


# -------------------------------------------------------- visibility


def _respelled(vis):
    return corpus.read("counterexample.fsol").replace("external", vis)


def test_public_everywhere():
    assert check(_respelled("public")) == []


def test_private_where_not_called_from_outside():
    src = corpus.read("counterexample.fsol")
    src = src.replace("function testUnsafeCast() external", "function testUnsafeCast() private")
    src = src.replace("function callUnsafeContract() external", "function callUnsafeContract() private")
    assert check(src) == []


def test_private_call_on_other_contract_rejected():
    assert codes(check(_respelled("private"))) == ["BAS-VISIBILITY"]


def test_private_call_on_this():
    assert check("contract C { function g() private { } function f() public { this.g(); } }") == []


# -------------------------------------------------------- negative corpus

NEGATIVE = [
    # no direct road from address to address payable
    ("contract C { function f(address a) public { address payable p = a; } }", "BAS-TYPE-MISMATCH"),
    ("contract C { address payable p; function f(address a) public { p = a; } }", "BAS-TYPE-MISMATCH"),
    ("contract C { function g(address payable p) public { } function f(address a) public { this.g(a); } }",
     "BAS-TYPE-MISMATCH"),
    ("contract C { function f(address a) public returns (address payable) { return a; } }", "BAS-TYPE-MISMATCH"),
    ("contract C { function f(C c) public { address payable p = address(c); } }", "BAS-TYPE-MISMATCH"),
    ("contract C { function f(address a) public { address(a).transfer(1); } }", "BAS-TRANSFER-NONPAYABLE"),
    ("contract C { function f() public { address(this).transfer(1); } }", "BAS-TRANSFER-NONPAYABLE"),
    # ordinary type errors
    ("contract C { function f() public { this.g(); } }", "BAS-UNKNOWN-MEMBER"),
    ("contract C { function g(uint x) public { } function f() public { this.g(); } }", "BAS-ARITY"),
    ("contract C { function f() public { x = 1; } }", "BAS-UNDECLARED"),
    ("contract C { function f() public { uint y = x; } }", "BAS-UNDECLARED"),
    ("contract C { function f() public { uint x = 1; bool x = true; } }", "BAS-DUP-LOCAL"),
    ("contract C { function f() public { if (1) { } } }", "BAS-TYPE-MISMATCH"),
    ("contract C { function f() public { require(1); } }", "BAS-TYPE-MISMATCH"),
    ("contract C { function f() public { uint x = true + 1; } }", "BAS-TYPE-MISMATCH"),
    ("contract C { function f() public { uint x = msg.sender; } }", "BAS-TYPE-MISMATCH"),
    ("contract C { function f() public { msg.sender.transfer(true); } }", "BAS-TYPE-MISMATCH"),
    ("contract C { function f() public returns (uint) { return; } }", "BAS-RETURN"),
    ("contract C { function f() public { return 1; } }", "BAS-RETURN"),
    ("contract C { function f(uint x) public { x.g(); } }", "BAS-NOT-CONTRACT"),
    ("contract C { function f() public { bool b = uint160(true) == uint160(true); } }", "BAS-BAD-CAST"),
]


@pytest.mark.parametrize("src, code", NEGATIVE)
def test_negative_corpus(src, code):
    assert code in codes(check(src))


def test_external_payable_param_is_erased():
    # Inside the body the parameter is a plain address.
    src = "contract C { function f(address payable p) external { p.transfer(1); } }"
    assert codes(check(src)) == ["BAS-TRANSFER-NONPAYABLE"]
    src = "contract C { function f(address payable p) public { p.transfer(1); } }"
    assert check(src) == []


def test_external_payable_param_accepts_bare_argument():
    src = ("contract C { function g(address payable p) external { } "
           "function f(address a) public { this.g(a); } }")
    assert check(src) == []


def test_uint160_route_is_accepted():
    src = "contract C { function f(address a) public { address payable p = address(uint160(a)); p.transfer(1); } }"
    assert check(src) == []


def test_refined_annotations_erase():
    src = ("contract F { function() external payable { } } contract N { } "
           "contract C { function f(address<F> a, address<N> b) public { a.transfer(1); } "
           "function g() payback public { msg.sender.transfer(1); } }")
    assert check(src) == []
    bad = "contract N { } contract C { function f(address<N> b) public { b.transfer(1); } }"
    assert codes(check(bad)) == ["BAS-TRANSFER-NONPAYABLE"]


# -------------------------------------------------------- determinism


def test_source_order_and_determinism():
    src = """
    contract C {
        function f() public { y = 1; }
        function g(address a) public { a.transfer(1); }
        function h() public { this.nope(); }
    }
    """
    first = check(src)
    assert codes(first) == ["BAS-UNDECLARED", "BAS-TRANSFER-NONPAYABLE", "BAS-UNKNOWN-MEMBER"]
    assert [d.span.start for d in first] == sorted(d.span.start for d in first)
    assert check(src) == first


def test_every_error_has_a_span_in_the_file():
    src = NEGATIVE[0][0]
    for d in check_baseline(*load(src, "neg.fsol")):
        assert d.span.file == "neg.fsol"
        assert 0 <= d.span.start <= d.span.end <= len(src)


@pytest.mark.parametrize("name", ["counterexample.fsol", "fixed.fsol", "counterexample_payback.fsol", "boo.fsol"])
def test_corpus_accepted(name):
    assert check_baseline(*load_corpus(name)) == []
