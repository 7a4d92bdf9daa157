"""Shipped example programs and scenarios."""

from __future__ import annotations

from importlib import resources
from typing import List


def path(name: str) -> str:
    return str(resources.files(__name__) / name)


def read(name: str) -> str:
    return (resources.files(__name__) / name).read_text(encoding="utf-8")


def programs() -> List[str]:
    return sorted(p.name for p in resources.files(__name__).iterdir() if p.name.endswith(".fsol"))
