"""Four-point fuzzy membership over durations.

A trapezoid maps a duration (in hours) to a compliance score in [0, 1]:
zero outside [a, d], one on the plateau [b, c], and linear on the two
slopes.  ``a`` may be -inf (no rising edge) and ``d`` may be +inf (no
falling edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class Trapezoid:
    """Membership specification; all four points are hours."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        validate_trapezoid(self)

    def membership(self, t: float) -> float:
        """Score of a duration ``t`` in hours.

        The plateau is closed: membership is 1 at exactly b and c.  The
        feet are open: membership is 0 at exactly a and d (unless they
        coincide with the plateau).
        """
        if self.b <= t <= self.c:
            return 1.0
        if t <= self.a or t >= self.d:
            return 0.0
        if t < self.b:
            # a == -inf means no rising edge: never too early
            return 1.0 if math.isinf(self.a) else (t - self.a) / (self.b - self.a)
        # d == +inf means no falling edge: never too late
        return 1.0 if math.isinf(self.d) else (self.d - t) / (self.d - self.c)

    def to_json(self) -> dict:
        def enc(v: float) -> float | str:
            if v == -math.inf:
                return "-inf"
            if v == math.inf:
                return "+inf"
            return v

        return {"a": enc(self.a), "b": enc(self.b), "c": enc(self.c), "d": enc(self.d)}

    @classmethod
    def from_json(cls, obj: dict) -> "Trapezoid":
        def dec(v) -> float:
            if v == "-inf":
                return -math.inf
            if v == "+inf":
                return math.inf
            return float(v)

        return cls(dec(obj["a"]), dec(obj["b"]), dec(obj["c"]), dec(obj["d"]))


def validate_trapezoid(t: Trapezoid) -> None:
    """Raise ValidationError naming the first violated ordering."""
    if math.isnan(t.a) or math.isnan(t.b) or math.isnan(t.c) or math.isnan(t.d):
        raise ValidationError("trapezoid points must not be NaN")
    if t.a > t.b:
        raise ValidationError(f"a <= b violated ({t.a} > {t.b})")
    if t.b > t.c:
        raise ValidationError(f"b <= c violated ({t.b} > {t.c})")
    if t.c > t.d:
        raise ValidationError(f"c <= d violated ({t.c} > {t.d})")
    if math.isinf(t.b) or math.isinf(t.c):
        raise ValidationError("b and c must be finite")


def trapezoid_membership(t: float, trap: Trapezoid) -> float:
    """Functional alias for :meth:`Trapezoid.membership`."""
    return trap.membership(t)
