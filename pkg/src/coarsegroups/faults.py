"""Deliberate fault injection, used only by tests of the consistency checks.

A named fault, once enabled, perturbs one internal computation so that the
corresponding theorem-backed assertion must fire.
"""

from __future__ import annotations

import contextlib

KNOWN = (
    "morph.ce",
    "quasihom.symbolic",
    "cgcat.rational",
    "bigrank.kernel",
)

_active: set[str] = set()


def active(name: str) -> bool:
    return name in _active


def enable(name: str) -> None:
    if name not in KNOWN:
        raise ValueError(f"unknown fault {name!r}; known: {', '.join(KNOWN)}")
    _active.add(name)


def clear() -> None:
    _active.clear()


@contextlib.contextmanager
def injected(name: str):
    enable(name)
    try:
        yield
    finally:
        _active.discard(name)
