"""Two-level cardinal scale used throughout: finite naturals plus ``ALEPH0``.

Every group handled by this package is countable, so no larger cardinal can
arise. ``ALEPH0`` compares greater than every integer and absorbs addition.
``OMEGA`` is the same object, spelled the way threshold parameters are written
(``i(H) < OMEGA`` means "finite").
"""

from __future__ import annotations

import numbers


class _Aleph0:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ALEPH0"

    __str__ = __repr__

    def __reduce__(self):
        return (_Aleph0, ())

    def __hash__(self):
        return hash("ALEPH0")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self or isinstance(other, numbers.Real):
            return False
        return NotImplemented

    def __le__(self, other):
        if other is self:
            return True
        if isinstance(other, numbers.Real):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if isinstance(other, numbers.Real):
            return True
        return NotImplemented

    def __ge__(self, other):
        if other is self or isinstance(other, numbers.Real):
            return True
        return NotImplemented

    def __add__(self, other):
        if other is self or isinstance(other, numbers.Real):
            return self
        return NotImplemented

    __radd__ = __add__


ALEPH0 = _Aleph0()
OMEGA = ALEPH0
INFINITE = ALEPH0


def is_finite(value) -> bool:
    return value is not ALEPH0


def cardinal_max(values):
    """Maximum over a possibly empty iterable of cardinals (empty gives 0)."""
    best = 0
    for v in values:
        if v is ALEPH0:
            return ALEPH0
        best = max(best, v)
    return best


def to_json(value):
    return "ALEPH0" if value is ALEPH0 else value
