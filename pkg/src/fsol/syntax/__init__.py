from . import ast
from .hierarchy import ContractTable, build_table, resolve_hierarchy, subtype
from .parser import parse, parse_program
from .printer import pretty_print

__all__ = [
    "ast", "ContractTable", "build_table", "parse", "parse_program",
    "pretty_print", "resolve_hierarchy", "subtype",
]
