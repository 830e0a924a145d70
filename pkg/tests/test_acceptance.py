"""Acceptance suite: one test per release criterion, at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v` to get one pass/fail line
per criterion; each test also prints its measured numbers.  Every trial
is seeded, so the whole suite is reproducible run to run.
"""

from __future__ import annotations

import time
from random import Random

import pytest

from hierkey import attacks, dynamics, schemes
from hierkey.curve import (
    AT_INFINITY,
    Point,
    TOY_CURVE_17,
    point_add,
    scalar_mul,
    transport_decrypt,
    transport_encrypt,
)
from hierkey.errors import NotPredecessor
from hierkey.hierarchy import Hierarchy
from hierkey.radixshift import RadixContext, cyclic_shift, shiftable

from helpers import non_predecessor_pairs, predecessor_pairs, random_dag

MODULI = [10007, 100003, 999983]


def reference_hierarchy() -> Hierarchy:
    return Hierarchy.build(
        ["u1", "u2", "u3", "u4", "u5"],
        [("u1", "u2"), ("u1", "u3"), ("u2", "u4"), ("u2", "u5"), ("u3", "u5")],
    )


# ---------------------------------------------------------------------------
# 1. Exact cyclic-shift values, decimal and binary, under 1 ms
# ---------------------------------------------------------------------------

def test_criterion_1_exact_shift_values():
    ctx10 = RadixContext(10, 99991)
    ctx2 = RadixContext(2, 31)
    start = time.perf_counter()
    decimal = [cyclic_shift(21349, l, ctx10) for l in (1, 2, 3, 4)]
    binary = [cyclic_shift(0b11110, l, ctx2) for l in (1, 2, 3, 4)]
    elapsed = time.perf_counter() - start
    assert decimal == [23491, 24913, 29134, 21349]
    assert binary == [0b11101, 0b11011, 0b10111, 0b11110]
    assert elapsed < 0.001
    print(f"\ncriterion 1: 8 shift values exact in {elapsed * 1e6:.0f} us")


# ---------------------------------------------------------------------------
# 2. The non-invertible counterexample, exact
# ---------------------------------------------------------------------------

def test_criterion_2_round_trip_counterexample():
    ctx = RadixContext(10, 239)
    back = cyclic_shift(cyclic_shift(235, 1, ctx), -1, ctx)
    assert back == 41
    assert back != 235
    print("\ncriterion 2: shifting 235 forward and back under p=239 lands on 41")


# ---------------------------------------------------------------------------
# 3. Round trip holds on 1000 random shiftable keys, under 1 s
# ---------------------------------------------------------------------------

def test_criterion_3_round_trip_thousand_trials():
    primes = {10: [239, 1009, 10007, 99991], 2: [11, 31, 101, 997, 10007]}
    rng = Random("acceptance:c3")
    start = time.perf_counter()
    done = 0
    while done < 1000:
        base = rng.choice([2, 10])
        ctx = RadixContext(base, rng.choice(primes[base]))
        k = rng.randrange(1, ctx.p)
        if not shiftable(k, ctx):
            continue
        l = rng.randrange(-2 * ctx.block, 2 * ctx.block + 1)
        assert cyclic_shift(cyclic_shift(k, l, ctx), -l, ctx) == k
        done += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"\ncriterion 3: 1000/1000 round trips exact in {elapsed:.3f} s")


# ---------------------------------------------------------------------------
# 4. Scheme correctness on 100 random DAGs per scheme, under 30 s
# ---------------------------------------------------------------------------

def test_criterion_4_scheme_correctness():
    start = time.perf_counter()
    derivations = 0
    nonpred_samples = 0
    for tag in schemes.SCHEME_TAGS:
        rng = Random(f"acceptance:c4:{tag}")
        for i in range(100):
            p = MODULI[i % 3]
            h = random_dag(rng, rng.randrange(2, 9))
            st = schemes.setup(tag, h, p, Random(rng.randrange(2**63)))
            for viewer, target in predecessor_pairs(h):
                assert schemes.derive_key(st, viewer, target) == st.records[target].key
                derivations += 1
            # sample non-predecessors where accidental collisions are
            # negligible (1/p per sample)
            if p >= 100003:
                pairs = non_predecessor_pairs(h)
                pick = Random(rng.randrange(2**63))
                for viewer, target in pick.sample(pairs, min(3, len(pairs))):
                    nonpred_samples += 1
                    try:
                        got = schemes.derive_key(st, viewer, target)
                    except NotPredecessor:
                        continue
                    assert got != st.records[target].key
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    print(
        f"\ncriterion 4: {derivations} predecessor derivations exact, "
        f"{nonpred_samples} non-predecessor samples all mismatched, {elapsed:.1f} s"
    )


# ---------------------------------------------------------------------------
# 5. Attack soundness on the legacy schemes, 100/100 each
# ---------------------------------------------------------------------------

def test_criterion_5_attack_soundness_on_legacy_schemes():
    h = Hierarchy.build(["a", "b", "t"], [("a", "t"), ("b", "t")])
    for tag in ("wu", "jw"):
        rng = Random(f"acceptance:c5:{tag}")
        lh_hits = tp_hits = tp_roots = 0
        for _ in range(100):
            st = schemes.setup(tag, h, 10007, rng)
            st2 = dynamics.insert_class_dynamic(st, "n", above=[], below=["t"], rng=rng)
            old, new = st.filters["t"].poly, st2.filters["t"].poly
            key = st2.records["t"].key
            lh = attacks.judge(attacks.linhsu_attack(old, new, scheme=tag), key)
            tp = attacks.judge(attacks.tripathy_paul_attack(old, new, scheme=tag), key)
            lh_hits += lh.success
            tp_hits += tp.success
            tp_roots += tp.candidate_roots == (schemes.root_value(st2, "t", "n"),)
        assert lh_hits == 100, f"{tag}: root-recovery only hit {lh_hits}/100"
        assert tp_hits == 100, f"{tag}: coefficient-subtraction only hit {tp_hits}/100"
        assert tp_roots == 100, f"{tag}: exact new root only in {tp_roots}/100"
        print(f"\ncriterion 5 [{tag}]: linhsu 100/100, tp key+exact-root 100/100")


# ---------------------------------------------------------------------------
# 6. Attack resistance on the masked schemes, 1000/1000 each
# ---------------------------------------------------------------------------

def _resistance_trial(tag: str, rng: Random, p: int) -> tuple[bool, bool]:
    h = random_dag(rng, rng.randrange(2, 6), edge_prob=0.5)
    targets = [c for c in sorted(h.nodes) if h.strict_predecessors(c)]
    if not targets:
        ids = sorted(h.nodes)
        h = h.add_class("extra", above=[ids[0]])
        targets = ["extra"]
    target = rng.choice(targets)
    st = schemes.setup(tag, h, p, rng)
    st2 = dynamics.insert_class_dynamic(st, "zz", above=[], below=[target], rng=rng)
    # the conditions the scheme's security argument rests on, enforced
    assert st2.records[target].decoy != st.records[target].decoy
    ctx = st.params.radix
    old_mask = cyclic_shift(st.records[target].key, st.records[target].shift_index, ctx)
    new_mask = cyclic_shift(st2.records[target].key, st2.records[target].shift_index, ctx)
    assert new_mask != old_mask
    fo, fn = st.filters[target], st2.filters[target]
    unmask_old = attacks.shift_unmask(fo.shift_index, ctx)
    unmask_new = attacks.shift_unmask(fn.shift_index, ctx)
    key = st2.records[target].key
    lh = attacks.judge(
        attacks.linhsu_attack(
            fo.poly, fn.poly, scheme=tag, unmask_old=unmask_old, unmask_new=unmask_new
        ),
        key,
    )
    tp = attacks.judge(
        attacks.tripathy_paul_attack(fo.poly, fn.poly, scheme=tag, unmask_new=unmask_new),
        key,
    )
    return bool(lh.success), bool(tp.success)


@pytest.mark.parametrize("tag", ["m1", "m2"])
def test_criterion_6_attack_resistance(tag):
    rng = Random(f"acceptance:c6:{tag}")
    lh_hits = tp_hits = 0
    start = time.perf_counter()
    for _ in range(1000):
        lh, tp = _resistance_trial(tag, rng, 100003)
        lh_hits += lh
        tp_hits += tp
    elapsed = time.perf_counter() - start
    assert lh_hits == 0, f"{tag}: root-recovery succeeded {lh_hits} times"
    assert tp_hits == 0, f"{tag}: coefficient-subtraction succeeded {tp_hits} times"
    print(f"\ncriterion 6 [{tag}]: both attacks failed 1000/1000 in {elapsed:.1f} s")


# ---------------------------------------------------------------------------
# 7. Incremental updates equal full rebuilds over 500 mutation sequences
# ---------------------------------------------------------------------------

def _random_mutation(state, rng: Random, counter: list[int]):
    nodes = sorted(state.hierarchy.nodes)
    if len(nodes) > 2 and rng.random() < 0.4:
        return dynamics.remove_class_dynamic(state, rng.choice(nodes), rng)
    counter[0] += 1
    new_id = f"w{counter[0]}"
    mode = rng.random()
    if mode < 0.3 or not nodes:
        above = [rng.choice(nodes)] if nodes else []
        below = []
    elif mode < 0.6:
        above, below = [], [rng.choice(nodes)]
    else:
        t = rng.choice(nodes)
        preds = sorted(state.hierarchy.strict_predecessors(t))
        above = [rng.choice(preds)] if preds else []
        below = [t]
    return dynamics.insert_class_dynamic(state, new_id, above=above, below=below, rng=rng)


def test_criterion_7_incremental_equals_rebuild():
    plan = [("m1", 150), ("m2", 150), ("jw", 75), ("wu", 75), ("linhsu", 25), ("akl", 25)]
    start = time.perf_counter()
    sequences = mutations = 0
    for tag, count in plan:
        rng = Random(f"acceptance:c7:{tag}")
        for _ in range(count):
            st = schemes.setup(tag, random_dag(rng, rng.randrange(2, 6)), 10007, rng)
            counter = [0]
            for _ in range(4):
                st = _random_mutation(st, rng, counter)
                mutations += 1
                if tag == "akl":
                    continue
                rebuilt = dynamics.rebuild_filters(st)
                assert set(rebuilt) == set(st.filters)
                for cid in rebuilt:
                    assert st.filters[cid].poly == rebuilt[cid].poly, (
                        f"{tag}: filter of {cid} diverged from the rebuild"
                    )
            sequences += 1
    elapsed = time.perf_counter() - start
    assert sequences == 500
    assert elapsed < 60.0
    print(
        f"\ncriterion 7: {sequences} sequences / {mutations} mutations, "
        f"coefficient-exact throughout, {elapsed:.1f} s"
    )


# ---------------------------------------------------------------------------
# 8. Structural replay of the worked dynamic examples
# ---------------------------------------------------------------------------

def test_criterion_8_structural_replay():
    h = reference_hierarchy()
    rng = Random("acceptance:c8")
    st = schemes.setup("m1", h, 10007, rng)

    degrees = [max(st.filters[c].degree, 0) for c in sorted(h.nodes)]
    assert degrees == [0, 2, 2, 3, 4]

    inserted = dynamics.insert_class_dynamic(st, "u6", above=["u1"], below=["u4"], rng=rng)
    changed = [c for c in sorted(st.filters) if st.filters[c].poly != inserted.filters[c].poly]
    assert changed == ["u4"]
    assert inserted.filters["u6"].degree == 2

    removed = dynamics.remove_class_dynamic(st, "u3", rng=rng)
    assert st.filters["u5"].degree == 4
    assert removed.filters["u5"].degree == 3
    print(
        "\ncriterion 8: degrees (0,2,2,3,4); insertion touched only u4; "
        "removal shrank u5 from 4 to 3"
    )


# ---------------------------------------------------------------------------
# 9. Curve sanity: exhaustive group law, order, transport round trips
# ---------------------------------------------------------------------------

def test_criterion_9_curve_sanity():
    ctx = TOY_CURVE_17
    elements = [AT_INFINITY]
    for x in range(ctx.p):
        for y in range(ctx.p):
            if (y * y - (x**3 + ctx.a * x + ctx.b)) % ctx.p == 0:
                elements.append(Point(x, y))
    assert len(elements) == ctx.q == 19

    table = {}
    for P in elements:
        for Q in elements:
            R = point_add(P, Q, ctx)
            assert R in elements
            table[(P, Q)] = R
    for P in elements:
        assert table[(P, AT_INFINITY)] == P
        assert any(table[(P, Q)] is AT_INFINITY for Q in elements)
    rng = Random("acceptance:c9")
    for _ in range(500):
        P, Q, R = (elements[rng.randrange(len(elements))] for _ in range(3))
        assert point_add(table[(P, Q)], R, ctx) == point_add(P, table[(Q, R)], ctx)

    assert scalar_mul(ctx.q, ctx.g, ctx) is AT_INFINITY
    walking = AT_INFINITY
    for _ in range(ctx.q - 1):
        walking = point_add(walking, ctx.g, ctx)
        assert walking is not AT_INFINITY

    ca_secret = rng.randrange(1, ctx.q)
    ca_point = scalar_mul(ca_secret, ctx.g, ctx)
    failures = 0
    for _ in range(500):
        key = rng.randrange(0, ctx.p)
        secret = rng.randrange(0, ctx.q)
        nonce = rng.randrange(1, ctx.q)
        ct = transport_encrypt(key, secret, ca_point, nonce, ctx)
        if transport_decrypt(ct, ca_secret, ctx) != (key, secret):
            failures += 1
    assert failures == 0
    print(
        "\ncriterion 9: 19-element group law exhaustively closed, q*G = O, "
        "500/500 transport round trips"
    )
