"""Cyclic digit-rotation used to mask encryption keys.

A value k < p is expanded to exactly as many base-b digits as p itself
has (leading zeros allowed).  The top digit stays fixed; the lower block
of m digits rotates.  A positive shift moves each lower digit toward
higher significance, so the most significant lower digit wraps around to
the bottom:

    base 10, k = 21349:  shift 1 -> 23491, shift 2 -> 24913,
                         shift 3 -> 29134, shift 4 -> 21349

The rotation is invertible inside [0, p) whenever the top digit of k is
strictly below the top digit of p; otherwise the result can spill past p
and get reduced, losing information (235 under p = 239 is the classic
counterexample: shifting by 1 and back lands on 41).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import OutOfRange
from .modmath import ensure_modulus


@dataclass(frozen=True)
class RadixContext:
    """Base-b digit geometry of the modulus p.

    width is the digit count of p in base b; block = width - 1 is the
    size of the rotating lower block; top_digit is p's leading digit.
    """

    base: int
    p: int
    width: int = field(init=False)
    block: int = field(init=False)
    top_digit: int = field(init=False)

    def __post_init__(self) -> None:
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        ensure_modulus(self.p)
        width = 0
        v = self.p
        while v:
            width += 1
            v //= self.base
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "block", width - 1)
        object.__setattr__(self, "top_digit", self.p // self.base ** (width - 1))


def _check_range(k: int, ctx: RadixContext) -> None:
    if not 0 <= k < ctx.p:
        raise OutOfRange(f"value {k} not in [0, {ctx.p})")


def to_digits(k: int, ctx: RadixContext) -> tuple[int, ...]:
    """Little-endian digits of k, padded to exactly ctx.width entries.

    Index i holds the coefficient of base**i; the last entry is the top
    digit and may be zero.
    """
    _check_range(k, ctx)
    out = []
    for _ in range(ctx.width):
        out.append(k % ctx.base)
        k //= ctx.base
    return tuple(out)


def from_digits(digits: tuple[int, ...], ctx: RadixContext) -> int:
    value = 0
    for d in reversed(digits):
        value = value * ctx.base + d
    return value


def cyclic_shift(k: int, l: int, ctx: RadixContext) -> int:
    """Rotate the lower digit block of k by l positions, top digit fixed.

    l is taken mod the block size; negative l rotates the other way.
    The result is reduced mod p, which only matters when the top digit
    of k equals the top digit of p (exactly the non-invertible case).
    """
    _check_range(k, ctx)
    m = ctx.block
    if m == 0:
        return k
    digits = to_digits(k, ctx)
    l %= m
    rotated = tuple(digits[(j - l) % m] for j in range(m)) + digits[m:]
    return from_digits(rotated, ctx) % ctx.p


def shiftable(k: int, ctx: RadixContext) -> bool:
    """True when masking k is both invertible and non-trivial.

    Requires the top digit of k to be strictly below the top digit of p
    (rotation never spills past p) and the lower digits to not all be
    equal (some rotation actually changes the value).
    """
    _check_range(k, ctx)
    digits = to_digits(k, ctx)
    if digits[-1] >= ctx.top_digit:
        return False
    lower = digits[: ctx.block]
    if not lower:
        return False
    return any(d != lower[0] for d in lower)
