from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, List, Optional

if TYPE_CHECKING:
    from .syntax.ast import Span


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    span: Optional[Span]

    def render(self) -> str:
        where = str(self.span) if self.span is not None else "<unknown>"
        return f"{where}: {self.severity}[{self.code}]: {self.message}"

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "message": self.message,
            "span": self.span.to_json() if self.span is not None else None,
        }


def error(code: str, message: str, span: Optional[Span]) -> Diagnostic:
    return Diagnostic("error", code, message, span)


def warning(code: str, message: str, span: Optional[Span]) -> Diagnostic:
    return Diagnostic("warning", code, message, span)


def sort_diagnostics(diags: Iterable[Diagnostic]) -> List[Diagnostic]:
    """Source order; stable for diagnostics sharing a position."""
    return sorted(diags, key=lambda d: d.span.start if d.span is not None else -1)


def errors_only(diags: Iterable[Diagnostic]) -> List[Diagnostic]:
    return [d for d in diags if d.severity == "error"]


def render_text(diags: Iterable[Diagnostic]) -> str:
    return "".join(d.render() + "\n" for d in diags)


def render_json(diags: Iterable[Diagnostic]) -> str:
    return json.dumps([d.to_json() for d in diags], indent=2) + "\n"


class DiagnosticError(Exception):
    """Raised by front-end helpers when input cannot be processed further."""

    def __init__(self, diagnostics: List[Diagnostic]) -> None:
        super().__init__("\n".join(d.render() for d in diagnostics))
        self.diagnostics = diagnostics
