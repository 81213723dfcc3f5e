"""Helper functions for coopguards."""

import hashlib
from fractions import Fraction


def guard_bound(n: int, h: int) -> int:
    """Upper bound floor((n + 2h - 2) / 2) on the guards the solver places."""
    return (n + 2 * h - 2) // 2


def format_number(value) -> str:
    """Render an int or Fraction exactly: ``3``, ``-7/2``."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f'{value.numerator}/{value.denominator}'
    return str(value)


def parse_number(token: str):
    """Inverse of :func:`format_number`."""
    if '/' in token:
        value = Fraction(token)
        return value.numerator if value.denominator == 1 else value
    return int(token)


def polygon_digest(polygon) -> str:
    """Short stable hash of a polygon's normalized rings."""
    h = hashlib.sha1()
    for ring in (polygon.outer, *polygon.holes):
        h.update(b'ring')
        for p in ring:
            h.update(f'{p.x},{p.y};'.encode('ascii'))
    return h.hexdigest()[:12]
