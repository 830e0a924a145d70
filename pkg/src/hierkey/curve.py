"""Toy short-Weierstrass elliptic curve group over GF(p).

Strictly desk-scale: parameters are validated by brute force and the
arithmetic is variable-time.  Affine points only; the point at infinity
is modeled as None.  The curve provides three things to the schemes
layer: key pairs n*G, an agreed point-to-scalar map for turning shared
points into filter roots, and an additive-mask transport that lets a
class ship (key, secret) to the central authority.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DegenerateEphemeral,
    InfinityPoint,
    InvalidCurve,
    OffCurve,
)
from .modmath import is_prime, mod_inv

# Curves larger than this are refused outright: validation here is
# brute-force and the whole package targets desk-scale parameters.
MAX_CURVE_P = 1 << 20

# Registry of point-to-scalar maps.  The x-coordinate map is the default;
# note it identifies P and -P, which is harmless for filter roots (both
# sides of a shared point agree on the scalar) but worth remembering.
SCALAR_MAPS = {
    "x": lambda pt: pt.x,
}


@dataclass(frozen=True)
class Point:
    x: int
    y: int


# The identity element. Functions accept Point | None throughout.
AT_INFINITY = None


@dataclass(frozen=True)
class CurveContext:
    """y^2 = x^3 + ax + b over F_p with base point G of prime order q."""

    p: int
    a: int
    b: int
    gx: int
    gy: int
    q: int
    scalar_map: str = "x"

    def __post_init__(self) -> None:
        if not is_prime(self.p) or self.p < 5:
            raise InvalidCurve(f"field size {self.p} is not a usable prime")
        if self.p > MAX_CURVE_P:
            raise InvalidCurve(f"field size {self.p} exceeds desk-scale bound {MAX_CURVE_P}")
        if (4 * self.a ** 3 + 27 * self.b ** 2) % self.p == 0:
            raise InvalidCurve("curve is singular: 4a^3 + 27b^2 = 0 mod p")
        if not is_prime(self.q):
            raise InvalidCurve(f"base point order {self.q} is not prime")
        if self.scalar_map not in SCALAR_MAPS:
            raise InvalidCurve(f"unknown point-to-scalar map {self.scalar_map!r}")
        g = Point(self.gx % self.p, self.gy % self.p)
        if not _on_curve(g, self):
            raise InvalidCurve("base point does not satisfy the curve equation")
        if scalar_mul(self.q, g, self) is not AT_INFINITY:
            raise InvalidCurve("base point order does not divide q")

    @property
    def g(self) -> Point:
        return Point(self.gx, self.gy)


def _on_curve(pt: Point | None, ctx: CurveContext) -> bool:
    if pt is AT_INFINITY:
        return True
    return (pt.y * pt.y - (pt.x ** 3 + ctx.a * pt.x + ctx.b)) % ctx.p == 0


def _require_on_curve(pt: Point | None, ctx: CurveContext) -> None:
    if not _on_curve(pt, ctx):
        raise OffCurve(f"point {pt} is not on the curve")


def point_neg(pt: Point | None, ctx: CurveContext) -> Point | None:
    if pt is AT_INFINITY:
        return AT_INFINITY
    return Point(pt.x, (-pt.y) % ctx.p)


def point_add(P: Point | None, Q: Point | None, ctx: CurveContext) -> Point | None:
    """Group law with None as the identity element."""
    _require_on_curve(P, ctx)
    _require_on_curve(Q, ctx)
    if P is AT_INFINITY:
        return Q
    if Q is AT_INFINITY:
        return P
    p = ctx.p
    if P.x == Q.x and (P.y + Q.y) % p == 0:
        return AT_INFINITY
    if P == Q:
        lam = (3 * P.x * P.x + ctx.a) * mod_inv(2 * P.y, p) % p
    else:
        lam = (Q.y - P.y) * mod_inv(Q.x - P.x, p) % p
    x = (lam * lam - P.x - Q.x) % p
    y = (lam * (P.x - x) - P.y) % p
    return Point(x, y)


def scalar_mul(n: int, P: Point | None, ctx: CurveContext) -> Point | None:
    """Double-and-add; 0*P is the identity, negative n negates first."""
    _require_on_curve(P, ctx)
    if P is AT_INFINITY:
        return AT_INFINITY
    if n < 0:
        return scalar_mul(-n, point_neg(P, ctx), ctx)
    acc: Point | None = AT_INFINITY
    addend = P
    while n:
        if n & 1:
            acc = point_add(acc, addend, ctx)
        addend = point_add(addend, addend, ctx)
        n >>= 1
    return acc


def point_to_scalar(pt: Point | None, ctx: CurveContext) -> int:
    """Agreed map from a shared point to a residue usable as a filter root."""
    if pt is AT_INFINITY:
        raise InfinityPoint("cannot map the point at infinity to a scalar")
    _require_on_curve(pt, ctx)
    return SCALAR_MAPS[ctx.scalar_map](pt) % ctx.p


@dataclass(frozen=True)
class TransportCiphertext:
    """Enrollment ciphertext: ephemeral point plus the masked (key, secret) pair."""

    c1: Point
    masked_key: int     # key + x(k*P_ca)  mod p
    masked_secret: int  # secret + y(k*P_ca)  mod q


def transport_encrypt(
    key: int, secret: int, ca_point: Point, k: int, ctx: CurveContext
) -> TransportCiphertext:
    """Mask (key, secret) against the authority's public point.

    key lives mod p and is masked by the shared x-coordinate; secret is
    a scalar mod q and is masked by the shared y-coordinate mod q, so the
    pair round-trips exactly for every 0 <= key < p, 0 <= secret < q.
    """
    _require_on_curve(ca_point, ctx)
    c1 = scalar_mul(k, ctx.g, ctx)
    shared = scalar_mul(k, ca_point, ctx)
    if c1 is AT_INFINITY or shared is AT_INFINITY:
        raise DegenerateEphemeral("ephemeral nonce annihilates; choose a different k")
    return TransportCiphertext(
        c1=c1,
        masked_key=(key + shared.x) % ctx.p,
        masked_secret=(secret + shared.y) % ctx.q,
    )


def transport_decrypt(
    ct: TransportCiphertext, ca_secret: int, ctx: CurveContext
) -> tuple[int, int]:
    """Authority side: recompute the shared point and strip both masks."""
    if ct.c1 is AT_INFINITY:
        raise DegenerateEphemeral("ciphertext carries the point at infinity")
    _require_on_curve(ct.c1, ctx)
    shared = scalar_mul(ca_secret, ct.c1, ctx)
    if shared is AT_INFINITY:
        raise DegenerateEphemeral("shared point degenerated to infinity")
    return (ct.masked_key - shared.x) % ctx.p, (ct.masked_secret - shared.y) % ctx.q


# Verified desk-scale curves (group order is prime, so any point generates).
TOY_CURVE_17 = CurveContext(p=17, a=2, b=2, gx=5, gy=1, q=19)
CURVE_10007 = CurveContext(p=10007, a=1, b=28, gx=2, gy=5425, q=9851)
CURVE_100003 = CurveContext(p=100003, a=1, b=5, gx=2, gy=86328, q=99707)
CURVE_999983 = CurveContext(p=999983, a=1, b=20, gx=1, gy=550861, q=1000579)

DEFAULT_CURVES = {
    17: TOY_CURVE_17,
    10007: CURVE_10007,
    100003: CURVE_100003,
    999983: CURVE_999983,
}
