"""Exact rational scalars and coordinate vectors.

Vectors are plain tuples whose entries are ints or fractions.Fraction;
all helpers keep results exact. Rational strings ("3/2", "-1", "0.25")
are the wire format used by every file the package reads or writes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

Scalar = Union[int, Fraction]
Vec = tuple  # tuple[Scalar, ...]


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        from .errors import InputError

        raise InputError(f"not a rational number: {text!r}") from exc


def format_rational(value: Scalar) -> str:
    return str(Fraction(value))


def parse_vector(items: Sequence[str]) -> Vec:
    return tuple(parse_rational(t) for t in items)


def format_vector(vec: Vec) -> list[str]:
    return [format_rational(x) for x in vec]


def vzero(dim: int) -> Vec:
    return (Fraction(0),) * dim


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c: Scalar, v: Vec) -> Vec:
    return tuple(c * a for a in v)


def vdot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def as_fractions(v: Sequence) -> Vec:
    return tuple(Fraction(a) for a in v)
