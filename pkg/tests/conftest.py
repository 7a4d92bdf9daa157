import pytest

from fsol import corpus
from fsol.syntax import parse, resolve_hierarchy


def load(source, file="<test>"):
    program = parse(source, file)
    return program, resolve_hierarchy(program)


def load_corpus(name):
    return load(corpus.read(name), name)


@pytest.fixture
def counterexample():
    return load_corpus("counterexample.fsol")


def expr(text):
    from fsol.syntax.parser import Parser

    p = Parser(text, "<expr>")
    e = p.parse_expr()
    assert not p.diags and p.tok.kind == "eof", p.diags
    return e


def codes(diags):
    return [d.code for d in diags if d.severity == "error"]


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
