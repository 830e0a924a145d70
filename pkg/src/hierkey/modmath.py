"""Modular arithmetic and univariate polynomial algebra over Z_p.

Field elements are plain Python ints kept canonical in [0, p).  A
polynomial is a Poly: an ascending tuple of canonical coefficients
(index i holds the coefficient of x**i) together with its prime modulus.
The zero polynomial is the empty tuple; any other tuple has a nonzero
leading entry.  Published filters are monic with the leading 1 stored
explicitly in memory; wire formats may drop it (see the board module).

All operations are pure and return new values, so concurrent read-only
use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import (
    DegreeTooLow,
    DuplicateRoot,
    InvalidModulus,
    ModulusMismatch,
    NotInvertible,
    ScanBudgetExceeded,
)

# Largest modulus for which find_roots will run an exhaustive scan.  Also
# keeps every Horner product below 2**44, safely inside int64 for the
# vectorized scan.
SCAN_LIMIT = 1 << 22


class Degenerate:
    """Marker returned by find_roots for the zero polynomial.

    Every residue is a root, so returning a set would be misleading;
    callers must branch on this sentinel instead.
    """

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "DEGENERATE"


DEGENERATE = Degenerate()


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Deterministic trial division up to sqrt(n); desk-scale inputs only."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def ensure_modulus(p: int) -> None:
    """Validate that p is an odd prime >= 3, raising InvalidModulus otherwise."""
    if not isinstance(p, int) or p < 3 or not is_prime(p):
        raise InvalidModulus(f"modulus must be a prime >= 3, got {p!r}")


def mod_inv(a: int, p: int) -> int:
    """Multiplicative inverse of a modulo the prime p."""
    ensure_modulus(p)
    a %= p
    if a == 0:
        raise NotInvertible(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


@dataclass(frozen=True)
class Poly:
    """Polynomial over Z_p, coefficients ascending and canonical."""

    coeffs: tuple[int, ...]
    p: int

    def __post_init__(self) -> None:
        ensure_modulus(self.p)
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero (trim first)")
        for c in self.coeffs:
            if not 0 <= c < self.p:
                raise ValueError(f"coefficient {c} not canonical mod {self.p}")

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = [f"{c}*x^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(reversed(terms)) + f" (mod {self.p})"


def poly(coeffs: Iterable[int], p: int) -> Poly:
    """Build a Poly from arbitrary ints: canonicalize mod p and trim."""
    ensure_modulus(p)
    cs = [c % p for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return Poly(tuple(cs), p)


def zero_poly(p: int) -> Poly:
    return poly((), p)


def poly_from_roots(roots: Iterable[int], mask: int, p: int) -> Poly:
    """Monic product of (x - r) over the given roots, plus a constant mask.

    With no roots the result is just the constant mask (the zero
    polynomial when mask == 0), matching how an empty filter publishes.
    Roots must be pairwise distinct as residues mod p.
    """
    ensure_modulus(p)
    rs = [r % p for r in roots]
    if len(set(rs)) != len(rs):
        dup = sorted(r for r in set(rs) if rs.count(r) > 1)
        raise DuplicateRoot(f"repeated root(s) mod {p}: {dup}")
    if not rs:
        return poly([mask], p)
    out = poly([1], p)
    for r in rs:
        out = poly_mul_linear(out, r)
    return poly_add_const(out, mask)


def poly_eval(f: Poly, x: int) -> int:
    """Horner evaluation of f at x, reduced mod p."""
    p = f.p
    x %= p
    acc = 0
    for c in reversed(f.coeffs):
        acc = (acc * x + c) % p
    return acc


def poly_mul_linear(f: Poly, r: int) -> Poly:
    """Multiply f by the linear factor (x - r)."""
    if f.is_zero:
        return f
    p = f.p
    r %= p
    old = f.coeffs
    out = [0] * (len(old) + 1)
    for j, c in enumerate(old):
        out[j] = (out[j] - r * c) % p
        out[j + 1] = c
    return Poly(tuple(out), p)


def poly_div_linear(f: Poly, r: int) -> tuple[Poly, int]:
    """Synthetic division of f by (x - r): returns (quotient, remainder)."""
    if f.degree < 1:
        raise DegreeTooLow(f"cannot divide degree-{f.degree} polynomial by a linear factor")
    p = f.p
    r %= p
    out = [0] * f.degree
    carry = 0
    for j in range(f.degree, 0, -1):
        carry = (f.coeffs[j] + carry * r) % p
        out[j - 1] = carry
    remainder = (f.coeffs[0] + carry * r) % p
    return poly(out, p), remainder


def poly_sub(f: Poly, g: Poly) -> Poly:
    """Coefficient-wise difference f - g, trimmed."""
    if f.p != g.p:
        raise ModulusMismatch(f"moduli differ: {f.p} vs {g.p}")
    n = max(len(f.coeffs), len(g.coeffs))
    fc = f.coeffs + (0,) * (n - len(f.coeffs))
    gc = g.coeffs + (0,) * (n - len(g.coeffs))
    return poly((a - b for a, b in zip(fc, gc)), f.p)


def poly_add_const(f: Poly, c: int) -> Poly:
    """Add a constant to f (adjusts only the x^0 coefficient)."""
    if not f.coeffs:
        return poly([c], f.p)
    return poly((f.coeffs[0] + c,) + f.coeffs[1:], f.p)


def find_roots(f: Poly, limit: int = SCAN_LIMIT) -> set[int] | Degenerate:
    """All x in [0, p) with f(x) = 0, by exhaustive scan.

    Returns the DEGENERATE marker for the zero polynomial.  The scan is
    vectorized but still literal: every residue is evaluated.
    """
    if f.is_zero:
        return DEGENERATE
    if f.p > limit:
        raise ScanBudgetExceeded(f"modulus {f.p} exceeds scan budget {limit}")
    if f.degree == 0:
        return set()
    p = f.p
    xs = np.arange(p, dtype=np.int64)
    acc = np.full(p, f.coeffs[-1], dtype=np.int64)
    for c in reversed(f.coeffs[:-1]):
        acc = (acc * xs + c) % p
    return set(int(x) for x in xs[acc == 0])
