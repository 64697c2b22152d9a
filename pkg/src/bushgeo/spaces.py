"""Finite-dimensional normed spaces and norming functionals.

Three norm kinds are supported:

* ``wl1``  -- weighted l1, ||v|| = sum_i w_i |v_i| with positive rational
  weights (the discretized integral norm); exact on rational input.
* ``linf`` -- max_i |v_i|; exact on rational input.
* ``l2``   -- Euclidean; evaluated in floating point.

A ``Functional`` is a coordinate functional v -> sum_i f_i v_i.  Its
operator norm with respect to each norm kind has a closed dual formula
(wl1 -> max |f_i|/w_i, linf -> sum |f_i|, l2 -> l2), used to check that a
supplied norming functional really has norm one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DimensionMismatch, InputError
from .rationals import Scalar, Vec, vdot

NORM_KINDS = ("wl1", "linf", "l2")


@dataclass(frozen=True)
class NormedSpace:
    """A finite-dimensional space with one of the supported norms."""

    dimension: int
    kind: str
    weights: Optional[tuple] = None  # required for wl1, ignored otherwise

    def __post_init__(self):
        if self.dimension < 1:
            raise InputError(f"dimension must be >= 1, got {self.dimension}")
        if self.kind not in NORM_KINDS:
            raise InputError(f"unknown norm kind {self.kind!r}, expected one of {NORM_KINDS}")
        if self.kind == "wl1":
            if self.weights is None or len(self.weights) != self.dimension:
                raise InputError("wl1 norm needs one positive weight per coordinate")
            if any(w <= 0 for w in self.weights):
                raise InputError("wl1 weights must be positive")
            object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))

    def check_vector(self, v: Vec, what: str = "vector") -> None:
        if len(v) != self.dimension:
            raise DimensionMismatch(self.dimension, len(v), what)

    def norm(self, v: Vec) -> Scalar:
        """Norm of ``v``; exact Fraction for wl1/linf, float for l2."""
        self.check_vector(v)
        if self.kind == "wl1":
            return sum((w * abs(x) for w, x in zip(self.weights, v)), Fraction(0))
        if self.kind == "linf":
            return max((abs(Fraction(x)) for x in v), default=Fraction(0))
        return math.sqrt(float(sum(Fraction(x) * Fraction(x) for x in v)))

    def dist(self, u: Vec, v: Vec) -> Scalar:
        return self.norm(tuple(a - b for a, b in zip(u, v)))

    def dual_norm(self, coefficients: Vec) -> Scalar:
        """Operator norm of the coordinate functional with these coefficients."""
        self.check_vector(coefficients, "functional")
        if self.kind == "wl1":
            return max(abs(Fraction(f)) / w for f, w in zip(coefficients, self.weights))
        if self.kind == "linf":
            return sum((abs(Fraction(f)) for f in coefficients), Fraction(0))
        return math.sqrt(float(sum(Fraction(f) * Fraction(f) for f in coefficients)))


@dataclass(frozen=True)
class Functional:
    """Coordinate functional v -> sum_i coefficients_i * v_i."""

    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(Fraction(c) for c in self.coefficients))

    def __call__(self, v: Vec) -> Fraction:
        if len(v) != len(self.coefficients):
            raise DimensionMismatch(len(self.coefficients), len(v))
        return vdot(self.coefficients, v)

    def is_norming_for(self, space: NormedSpace, tol: float = 1e-9) -> bool:
        """True when the operator norm equals 1 within ``tol``."""
        return abs(Fraction(space.dual_norm(self.coefficients)) - 1) <= tol


def functional_eval(f: Functional, v: Vec) -> Fraction:
    return f(v)


def norm(space: NormedSpace, v: Vec) -> Scalar:
    return space.norm(v)
