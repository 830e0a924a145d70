"""Dynamic access control: insert/remove classes with incremental filter updates.

A published filter changes by replaying linear-factor passes on its
coefficient vector: subtract the old mask, divide out departing roots
(exact synthetic division), multiply in arriving roots, add the new
mask.  For the masked schemes every touched filter is re-randomized on
the way through: a fresh decoy root and a fresh shift index, both forced
to differ from their predecessors, which is exactly what defeats the
two coefficient-comparison attacks.

rebuild_filters regenerates every filter from scratch through the same
construction path used at setup; the test suite holds incremental and
rebuilt coefficient vectors equal after arbitrary mutation sequences.
"""

from __future__ import annotations

from dataclasses import replace
from random import Random
from typing import Iterable

from .errors import NotARoot, RootCollision
from .modmath import poly_add_const, poly_div_linear, poly_eval, poly_mul_linear, zero_poly
from .radixshift import cyclic_shift
from .schemes import (
    CaState,
    ClassRecord,
    MASKED_SCHEMES,
    SecureFilter,
    akl_key,
    assign_decoys,
    build_all_filters,
    build_filter,
    enroll_record,
    filter_roots,
    fresh_decoy,
    fresh_shift_index,
    repair_root_collisions,
    root_value,
)


# ---------------------------------------------------------------------------
# Coefficient-level filter surgery
# ---------------------------------------------------------------------------

def _replay(
    filt: SecureFilter,
    *,
    old_mask: int,
    new_mask: int,
    divide_out: Iterable[int],
    multiply_in: Iterable[int],
    new_shift_index: int | None,
) -> SecureFilter:
    """Divide/multiply linear factors against (filter - old_mask), re-mask."""
    core = poly_add_const(filt.poly, -old_mask)
    for r in divide_out:
        core, rem = poly_div_linear(core, r)
        if rem != 0:
            raise NotARoot(f"{r} is not an exact root of the filter core")
    for r in multiply_in:
        if poly_eval(core, r) == 0:
            raise RootCollision(f"{r} is already a root of the filter core")
        core = poly_mul_linear(core, r)
    return replace(filt, poly=poly_add_const(core, new_mask), shift_index=new_shift_index)


def extend_filter(
    filt: SecureFilter,
    old_decoy: int | None,
    new_decoy: int | None,
    new_root: int,
    old_mask: int,
    new_mask: int,
    new_shift_index: int | None = None,
) -> SecureFilter:
    """Grow a filter by one root, swapping decoy and mask on the way.

    Decoys may be None for the legacy schemes, which neither hide an
    extra root nor change their mask.  Degree always rises by exactly 1.
    """
    divide = [old_decoy] if old_decoy is not None else []
    multiply = ([new_decoy] if new_decoy is not None else []) + [new_root]
    return _replay(
        filt,
        old_mask=old_mask,
        new_mask=new_mask,
        divide_out=divide,
        multiply_in=multiply,
        new_shift_index=new_shift_index,
    )


def shrink_filter(
    filt: SecureFilter,
    old_decoy: int | None,
    new_decoy: int | None,
    removed_root: int,
    old_mask: int,
    new_mask: int,
    new_shift_index: int | None = None,
) -> SecureFilter:
    """Drop one root from a filter, swapping decoy and mask on the way."""
    divide = [removed_root] + ([old_decoy] if old_decoy is not None else [])
    multiply = [new_decoy] if new_decoy is not None else []
    return _replay(
        filt,
        old_mask=old_mask,
        new_mask=new_mask,
        divide_out=divide,
        multiply_in=multiply,
        new_shift_index=new_shift_index,
    )


# ---------------------------------------------------------------------------
# State-level mutations
# ---------------------------------------------------------------------------

def _clone(state: CaState) -> CaState:
    return CaState(
        params=state.params,
        hierarchy=state.hierarchy,
        records=dict(state.records),
        filters=dict(state.filters),
        epoch=state.epoch,
        ca_secret=state.ca_secret,
        ca_point=state.ca_point,
        akl=state.akl,
    )


def _current_mask(state: CaState, rec: ClassRecord) -> int:
    if state.scheme in MASKED_SCHEMES:
        assert rec.shift_index is not None
        return cyclic_shift(rec.key, rec.shift_index, state.params.radix)
    return rec.key


def _rerandomize(state: CaState, class_id: str, rng: Random, root_pool: set[int]) -> None:
    """Fresh decoy and shift index for a touched masked filter.

    The new decoy avoids the filter's (new) roots and the old decoy; the
    new shift index is forced to produce a different masked key.
    """
    rec = state.records[class_id]
    assert rec.decoy is not None and rec.shift_index is not None
    params = state.params
    old_mask = cyclic_shift(rec.key, rec.shift_index, params.radix)
    decoy = fresh_decoy(params, rng, root_pool | {rec.decoy})
    shift = fresh_shift_index(rec.key, params, rng, avoid_mask=old_mask)
    state.records[class_id] = replace(rec, decoy=decoy, shift_index=shift)


def _update_filter(
    state: CaState,
    class_id: str,
    added: list[str],
    removed_roots: list[int],
    rng: Random,
) -> None:
    """Incrementally rewrite one class's filter after a hierarchy change.

    added: predecessors that joined its strict-predecessor set (their
    root values are multiplied in); removed_roots: root values of the
    predecessors that left (divided out).  Masked schemes get a fresh
    decoy and mask; the legacy schemes keep theirs, which is precisely
    the weakness the attack module demonstrates.
    """
    rec = state.records[class_id]
    old_filt = state.filters[class_id]
    preds_now = state.hierarchy.strict_predecessors(class_id)

    if not preds_now:
        state.filters[class_id] = replace(
            old_filt, poly=zero_poly(state.params.p), shift_index=None
        )
        return

    roots_now = filter_roots(state, class_id)
    added_roots = [roots_now[v] for v in sorted(added)]
    if len(set(roots_now.values())) != len(roots_now):
        raise RootCollision(f"roots of {class_id!r} collide after the change")

    if old_filt.poly.is_zero:
        # Gained its first predecessors: nothing to replay, build fresh.
        if state.scheme in MASKED_SCHEMES:
            _rerandomize(state, class_id, rng, set(roots_now.values()))
        state.filters[class_id] = build_filter(state, class_id)
        return

    old_mask = _current_mask(state, rec)
    if state.scheme in MASKED_SCHEMES:
        _rerandomize(state, class_id, rng, set(roots_now.values()))
        new_rec = state.records[class_id]
        assert new_rec.decoy is not None and new_rec.shift_index is not None
        state.filters[class_id] = _replay(
            old_filt,
            old_mask=old_mask,
            new_mask=cyclic_shift(new_rec.key, new_rec.shift_index, state.params.radix),
            divide_out=removed_roots + [rec.decoy],
            multiply_in=[new_rec.decoy] + added_roots,
            new_shift_index=new_rec.shift_index,
        )
    else:
        state.filters[class_id] = _replay(
            old_filt,
            old_mask=old_mask,
            new_mask=old_mask,
            divide_out=removed_roots,
            multiply_in=added_roots,
            new_shift_index=None,
        )


def _refresh_akl(state: CaState, affected: Iterable[str]) -> None:
    """Recompute exponents and keys for classes whose up-set changed."""
    assert state.akl is not None
    primes = state.akl.primes
    exponents = dict(state.akl.exponents)
    for cid in sorted(affected):
        upset = {cid} | set(state.hierarchy.strict_predecessors(cid))
        t = 1
        for member in sorted(upset):
            t *= primes[member]
        exponents[cid] = t
    state.akl = replace(state.akl, exponents=exponents)
    for cid in sorted(affected):
        state.records[cid] = replace(
            state.records[cid], exponent=exponents[cid], key=akl_key(state.akl, cid)
        )


def _relink_salt(state: CaState, rng: Random) -> None:
    """linhsu rebuilds everything under a fresh public salt each epoch.

    A salt that happens to collide two hashed roots is simply redrawn;
    unlike the other schemes no secret needs to move.
    """
    for _ in range(64):
        state.params = replace(state.params, salt=rng.randrange(1, state.params.p))
        try:
            state.filters = build_all_filters(state)
            return
        except RootCollision:
            continue
    raise RootCollision("could not find a collision-free salt")


def insert_class_dynamic(
    state: CaState,
    class_id: str,
    above: Iterable[str],
    below: Iterable[str],
    rng: Random,
    key: int | None = None,
) -> CaState:
    """Enroll a new class and update exactly the filters its arrival touches.

    Successors gaining the newcomer (or anyone newly reachable through
    it) as a predecessor get their filters extended in place; everything
    else on the board is byte-identical to the previous epoch.
    """
    new = _clone(state)
    before = state.hierarchy.predecessor_map()
    new.hierarchy = state.hierarchy.add_class(class_id, above=above, below=below)
    after = new.hierarchy.predecessor_map()

    if new.scheme == "akl":
        assert new.akl is not None
        next_prime = _next_free_prime(new.akl.primes)
        primes = dict(new.akl.primes)
        primes[class_id] = next_prime
        new.akl = replace(new.akl, primes=primes)
        new.records[class_id] = ClassRecord(id=class_id, key=0, prime=next_prime)
        grew = [cid for cid in sorted(before) if after[cid] != before[cid]]
        _refresh_akl(new, grew + [class_id])
        new.epoch += 1
        return new

    used = {r.secret for r in new.records.values() if r.secret is not None}
    new.records[class_id] = enroll_record(
        new.params,
        class_id,
        rng,
        ca_point=new.ca_point,
        ca_secret=new.ca_secret,
        used_secrets=used,
        key=key,
    )
    repair_root_collisions(new, rng, resample_pool={class_id})

    if new.scheme == "linhsu":
        assign_decoys(new, rng, targets=[class_id])
        _relink_salt(new, rng)
        new.epoch += 1
        return new

    assign_decoys(new, rng, targets=[class_id])
    new.filters[class_id] = build_filter(new, class_id)
    for cid in sorted(before):
        gained = after[cid] - before[cid]
        if gained:
            _update_filter(new, cid, added=sorted(gained), removed_roots=[], rng=rng)
    new.epoch += 1
    return new


def remove_class_dynamic(state: CaState, class_id: str, rng: Random) -> CaState:
    """Discard a class; shrink every filter that carried one of its roots.

    Root values of departing predecessors are recomputed from the stored
    secrets before the record is dropped, then divided out of each
    affected successor's filter (with re-randomization for the masked
    schemes).
    """
    state.record(class_id)
    new = _clone(state)
    before = state.hierarchy.predecessor_map()
    new.hierarchy, _ = state.hierarchy.remove_class(class_id)
    after = new.hierarchy.predecessor_map()

    if new.scheme == "akl":
        assert new.akl is not None
        primes = dict(new.akl.primes)
        primes.pop(class_id)
        exponents = dict(new.akl.exponents)
        exponents.pop(class_id)
        new.akl = replace(new.akl, primes=primes, exponents=exponents)
        new.records.pop(class_id)
        shrank = [cid for cid in sorted(after) if after[cid] != before[cid]]
        _refresh_akl(new, shrank)
        new.epoch += 1
        return new

    if new.scheme == "linhsu":
        new.records.pop(class_id)
        new.filters.pop(class_id, None)
        _relink_salt(new, rng)
        new.epoch += 1
        return new

    # Collect departing root values while the old records are still whole.
    for cid in sorted(after):
        lost = before[cid] - after[cid]
        if not lost:
            continue
        removed_roots = [root_value(state, cid, v) for v in sorted(lost)]
        _update_filter(new, cid, added=[], removed_roots=removed_roots, rng=rng)
    new.records.pop(class_id)
    new.filters.pop(class_id, None)
    new.epoch += 1
    return new


def _next_free_prime(primes: dict[str, int]) -> int:
    from .modmath import is_prime

    n = max(primes.values(), default=1) + 1
    while not is_prime(n):
        n += 1
    return n


def rebuild_filters(state: CaState) -> dict[str, SecureFilter]:
    """From-scratch regeneration of every filter from the current records.

    Independent of the incremental path above; mutation tests hold the
    two coefficient-vector sets exactly equal.
    """
    return build_all_filters(state)
