from __future__ import annotations

from random import Random

import pytest

from hierkey.curve import (
    AT_INFINITY,
    CURVE_10007,
    CurveContext,
    Point,
    TOY_CURVE_17,
    TransportCiphertext,
    point_add,
    point_neg,
    point_to_scalar,
    scalar_mul,
    transport_decrypt,
    transport_encrypt,
)
from hierkey.errors import DegenerateEphemeral, InfinityPoint, InvalidCurve, OffCurve

# Multiples of G on the 17-element field curve, frozen from a standalone
# brute-force computation (chord-tangent by hand for the small ones).
G_MULTIPLES = {
    1: (5, 1), 2: (6, 3), 3: (10, 6), 4: (3, 1), 5: (9, 16), 6: (16, 13),
    7: (0, 6), 8: (13, 7), 9: (7, 6), 10: (7, 11), 11: (13, 10), 12: (0, 11),
    13: (16, 4), 14: (9, 1), 15: (3, 16), 16: (10, 11), 17: (6, 14), 18: (5, 16),
}


def all_group_elements(ctx: CurveContext) -> list:
    pts = [AT_INFINITY]
    for x in range(ctx.p):
        for y in range(ctx.p):
            if (y * y - (x**3 + ctx.a * x + ctx.b)) % ctx.p == 0:
                pts.append(Point(x, y))
    return pts


# ---------------------------------------------------------------------------
# group law
# ---------------------------------------------------------------------------

def test_identity_element():
    g = TOY_CURVE_17.g
    assert point_add(g, AT_INFINITY, TOY_CURVE_17) == g
    assert point_add(AT_INFINITY, g, TOY_CURVE_17) == g
    assert point_add(AT_INFINITY, AT_INFINITY, TOY_CURVE_17) is AT_INFINITY


def test_doubling_matches_frozen_oracle():
    g = TOY_CURVE_17.g
    assert point_add(g, g, TOY_CURVE_17) == Point(6, 3)


def test_inverse_pairs_cancel():
    ctx = TOY_CURVE_17
    for n in (1, 2, 7, 12):
        pt = Point(*G_MULTIPLES[n])
        assert point_add(pt, point_neg(pt, ctx), ctx) is AT_INFINITY


def test_all_small_multiples_match_frozen_table():
    ctx = TOY_CURVE_17
    for n, coords in G_MULTIPLES.items():
        assert scalar_mul(n, ctx.g, ctx) == Point(*coords)
    assert scalar_mul(19, ctx.g, ctx) is AT_INFINITY


def test_base_point_has_prime_order():
    ctx = TOY_CURVE_17
    acc = AT_INFINITY
    for n in range(1, ctx.q):
        acc = point_add(acc, ctx.g, ctx)
        assert acc is not AT_INFINITY
    assert point_add(acc, ctx.g, ctx) is AT_INFINITY


def test_scalar_mul_reduces_mod_order():
    ctx = TOY_CURVE_17
    rng = Random(5)
    for _ in range(50):
        n = rng.randrange(0, 10 * ctx.q)
        assert scalar_mul(n, ctx.g, ctx) == scalar_mul(n % ctx.q, ctx.g, ctx)
    assert scalar_mul(0, ctx.g, ctx) is AT_INFINITY
    assert scalar_mul(1, ctx.g, ctx) == ctx.g


def test_scalar_mul_negative_is_negation():
    ctx = TOY_CURVE_17
    for n in (1, 3, 7):
        assert scalar_mul(-n, ctx.g, ctx) == point_neg(scalar_mul(n, ctx.g, ctx), ctx)
    assert scalar_mul(-3, ctx.g, ctx) == scalar_mul(ctx.q - 3, ctx.g, ctx)


def test_group_closure_and_axioms_exhaustive():
    ctx = TOY_CURVE_17
    elements = all_group_elements(ctx)
    assert len(elements) == 19
    table = {}
    for P in elements:
        for Q in elements:
            R = point_add(P, Q, ctx)
            assert R in elements
            table[(P, Q)] = R
    # commutativity comes free with closure; spot-check associativity densely
    rng = Random(6)
    for _ in range(500):
        P, Q, R = (elements[rng.randrange(19)] for _ in range(3))
        assert point_add(table[(P, Q)], R, ctx) == point_add(P, table[(Q, R)], ctx)


def test_off_curve_points_rejected():
    with pytest.raises(OffCurve):
        point_add(Point(2, 2), TOY_CURVE_17.g, TOY_CURVE_17)
    with pytest.raises(OffCurve):
        scalar_mul(3, Point(1, 1), TOY_CURVE_17)


# ---------------------------------------------------------------------------
# point-to-scalar map
# ---------------------------------------------------------------------------

def test_default_map_returns_x():
    assert point_to_scalar(Point(5, 1), TOY_CURVE_17) == 5


def test_map_rejects_infinity():
    with pytest.raises(InfinityPoint):
        point_to_scalar(AT_INFINITY, TOY_CURVE_17)


def test_map_collides_on_negation():
    ctx = TOY_CURVE_17
    pt = Point(*G_MULTIPLES[3])
    assert point_to_scalar(pt, ctx) == point_to_scalar(point_neg(pt, ctx), ctx)


# ---------------------------------------------------------------------------
# context validation
# ---------------------------------------------------------------------------

def test_singular_curve_rejected():
    with pytest.raises(InvalidCurve):
        CurveContext(p=17, a=0, b=0, gx=5, gy=1, q=19)


def test_base_point_must_lie_on_curve():
    with pytest.raises(InvalidCurve):
        CurveContext(p=17, a=2, b=2, gx=5, gy=2, q=19)


def test_order_must_be_prime_and_annihilate():
    with pytest.raises(InvalidCurve):
        CurveContext(p=17, a=2, b=2, gx=5, gy=1, q=18)
    with pytest.raises(InvalidCurve):
        CurveContext(p=17, a=2, b=2, gx=5, gy=1, q=23)


def test_oversized_field_rejected():
    with pytest.raises(InvalidCurve):
        CurveContext(p=4194319, a=1, b=1, gx=0, gy=1, q=19)


def test_composite_field_and_unknown_map_rejected():
    with pytest.raises(InvalidCurve):
        CurveContext(p=15, a=2, b=2, gx=5, gy=1, q=19)
    with pytest.raises(InvalidCurve):
        CurveContext(p=17, a=2, b=2, gx=5, gy=1, q=19, scalar_map="y-then-x")


def test_transport_decrypt_rejects_off_curve_point():
    ct = TransportCiphertext(c1=Point(2, 2), masked_key=1, masked_secret=1)
    with pytest.raises(OffCurve):
        transport_decrypt(ct, 5, TOY_CURVE_17)


# ---------------------------------------------------------------------------
# key transport
# ---------------------------------------------------------------------------

def test_transport_toy_vector():
    # K=7, n=3, nonce 2, authority scalar 5: all values frozen from the
    # independent group table above.
    ctx = TOY_CURVE_17
    ca_point = Point(*G_MULTIPLES[5])
    ct = transport_encrypt(7, 3, ca_point, 2, ctx)
    assert ct.c1 == Point(6, 3)
    assert ct.masked_key == (7 + 7) % 17 == 14      # x(10G) = 7
    assert ct.masked_secret == (3 + 11) % 19 == 14  # y(10G) = 11
    assert transport_decrypt(ct, 5, ctx) == (7, 3)


def test_transport_round_trips():
    ctx = TOY_CURVE_17
    rng = Random(7)
    ca_secret = 5
    ca_point = scalar_mul(ca_secret, ctx.g, ctx)
    for _ in range(500):
        key = rng.randrange(0, ctx.p)
        secret = rng.randrange(0, ctx.q)
        k = rng.randrange(1, ctx.q)
        ct = transport_encrypt(key, secret, ca_point, k, ctx)
        assert transport_decrypt(ct, ca_secret, ctx) == (key, secret)


def test_transport_annihilating_nonce_rejected():
    ctx = TOY_CURVE_17
    ca_point = scalar_mul(5, ctx.g, ctx)
    with pytest.raises(DegenerateEphemeral):
        transport_encrypt(7, 3, ca_point, ctx.q, ctx)


def test_transport_infinity_ciphertext_rejected():
    ct = TransportCiphertext(c1=AT_INFINITY, masked_key=1, masked_secret=1)
    with pytest.raises(DegenerateEphemeral):
        transport_decrypt(ct, 5, TOY_CURVE_17)


def test_wrong_authority_scalar_garbles():
    ctx = TOY_CURVE_17
    ca_point = scalar_mul(5, ctx.g, ctx)
    rng = Random(8)
    mismatches = 0
    for _ in range(100):
        key = rng.randrange(0, ctx.p)
        secret = rng.randrange(0, ctx.q)
        ct = transport_encrypt(key, secret, ca_point, rng.randrange(1, ctx.q), ctx)
        if transport_decrypt(ct, 6, ctx) != (key, secret):
            mismatches += 1
    assert mismatches == 100


def test_larger_builtin_curve_round_trip():
    ctx = CURVE_10007
    rng = Random(9)
    ca_secret = rng.randrange(1, ctx.q)
    ca_point = scalar_mul(ca_secret, ctx.g, ctx)
    for _ in range(50):
        key = rng.randrange(0, ctx.p)
        secret = rng.randrange(0, ctx.q)
        ct = transport_encrypt(key, secret, ca_point, rng.randrange(1, ctx.q), ctx)
        assert transport_decrypt(ct, ca_secret, ctx) == (key, secret)
