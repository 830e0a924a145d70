"""Key-assignment schemes: generate public filters, derive successor keys.

Six scheme tags share one interface:

    akl     exponent assignment: public t_i, keys K_0**t_i mod p
    wu      filter roots g_i**s_j mod p, mask is the raw key
    jw      filter roots from shared curve points, mask is the raw key
    linhsu  like jw but roots are salted hashes of the shared scalars
    m1      jw roots plus a CA-held decoy root, cyclic-shift-masked key
    m2      wu roots plus a CA-held decoy root, cyclic-shift-masked key

A filter for class i is a published monic polynomial that evaluates to
the (possibly shift-masked) key of i exactly at the root values known to
i's strict predecessors.  Classes with no predecessors publish the zero
filter.  The central authority enrolls every class, holds all secrets,
and is the single writer; derivation reads only public material plus the
viewer's own secret.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from random import Random
from typing import Iterable

from .curve import (
    CurveContext,
    DEFAULT_CURVES,
    Point,
    point_to_scalar,
    scalar_mul,
    transport_decrypt,
    transport_encrypt,
)
from .errors import (
    DegenerateEphemeral,
    NotPredecessor,
    NotShiftable,
    RootCollision,
    UnknownClass,
    UnknownScheme,
)
from .hierarchy import Hierarchy
from .modmath import Poly, ensure_modulus, poly_eval, poly_from_roots, zero_poly
from .radixshift import RadixContext, cyclic_shift, shiftable

SCHEME_TAGS = ("akl", "wu", "jw", "linhsu", "m1", "m2")
ECC_SCHEMES = frozenset({"jw", "linhsu", "m1"})
EXP_SCHEMES = frozenset({"wu", "m2"})
MASKED_SCHEMES = frozenset({"m1", "m2"})
FILTER_SCHEMES = ECC_SCHEMES | EXP_SCHEMES

# Reserved viewer id: the authority derives straight from its store.
CA_VIEWER = "ca"

RETRY_LIMIT = 64


def hash_root(salt: int, value: int, p: int) -> int:
    """Salted one-way map of a shared scalar onto Z_p (linhsu roots)."""
    digest = hashlib.sha256(f"{salt}||{value}".encode("ascii")).hexdigest()
    return int(digest, 16) % p


@dataclass(frozen=True)
class SchemeParams:
    """Public system parameters shared by every class."""

    scheme: str
    p: int
    base: int = 10                    # radix for shift masking (m1/m2)
    curve: CurveContext | None = None
    salt: int | None = None           # public hash salt, refreshed per epoch (linhsu)

    def __post_init__(self) -> None:
        if self.scheme not in SCHEME_TAGS:
            raise UnknownScheme(f"unknown scheme tag {self.scheme!r}")
        ensure_modulus(self.p)
        if self.scheme in ECC_SCHEMES:
            if self.curve is None:
                raise UnknownScheme(f"scheme {self.scheme!r} needs curve parameters")
            if self.curve.p != self.p:
                raise UnknownScheme(
                    f"curve field {self.curve.p} must equal the filter modulus {self.p}"
                )

    @property
    def radix(self) -> RadixContext:
        return RadixContext(self.base, self.p)


@dataclass(frozen=True)
class ClassRecord:
    """Everything the authority holds for one enrolled class.

    key and secret are private; point, public_base, exponent and
    shift_index are published on the board.  decoy is the CA-only extra
    filter root used by the masked schemes.
    """

    id: str
    key: int
    secret: int | None = None        # scalar n (ECC) or exponent s (wu/m2)
    point: Point | None = None       # public key n*G (ECC)
    public_base: int | None = None   # public base g (wu/m2)
    decoy: int | None = None         # CA-held extra root (m1/m2)
    shift_index: int | None = None   # published rotation count (m1/m2)
    exponent: int | None = None      # public t (akl)
    prime: int | None = None         # per-class prime behind t (akl)


@dataclass(frozen=True)
class SecureFilter:
    """Published filter: monic polynomial plus its public unmasking hint."""

    owner: str
    scheme: str
    poly: Poly
    shift_index: int | None = None

    @property
    def degree(self) -> int:
        return self.poly.degree


@dataclass(frozen=True)
class AklAssignment:
    """Exponent assignment: divisibility of public t values encodes the order."""

    p: int
    base_key: int                 # secret seed K_0
    exponents: dict[str, int]     # public
    primes: dict[str, int]        # one distinct prime per class


@dataclass
class CaState:
    """Full authority-side state: hierarchy, per-class records, published filters."""

    params: SchemeParams
    hierarchy: Hierarchy
    records: dict[str, ClassRecord]
    filters: dict[str, SecureFilter] = field(default_factory=dict)
    epoch: int = 0
    ca_secret: int | None = None     # authority's transport scalar (ECC)
    ca_point: Point | None = None    # published authority point (ECC)
    akl: AklAssignment | None = None

    @property
    def scheme(self) -> str:
        return self.params.scheme

    def record(self, class_id: str) -> ClassRecord:
        try:
            return self.records[class_id]
        except KeyError:
            raise UnknownClass(f"unknown class {class_id!r}") from None


# ---------------------------------------------------------------------------
# Akl-Taylor baseline
# ---------------------------------------------------------------------------

_FIRST_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _next_prime(after: int) -> int:
    from .modmath import is_prime

    n = after + 1
    while not is_prime(n):
        n += 1
    return n


def akl_setup(
    hierarchy: Hierarchy, base_key: int, p: int, primes: dict[str, int] | None = None
) -> AklAssignment:
    """Assign one prime per class; t_i multiplies the primes of i's up-set.

    t_i then divides t_j exactly when j sits at or below i, which is the
    whole trick: a dominating class raises its own key to t_j/t_i.
    """
    ensure_modulus(p)
    if not 2 <= base_key < p:
        raise ValueError(f"base key must lie in [2, {p}), got {base_key}")
    ids = sorted(hierarchy.nodes)
    if primes is None:
        primes = {}
        last = 1
        for i, cid in enumerate(ids):
            nxt = _FIRST_PRIMES[i] if i < len(_FIRST_PRIMES) else _next_prime(last)
            primes[cid] = nxt
            last = nxt
    exponents = {}
    for cid in ids:
        upset = {cid} | set(hierarchy.strict_predecessors(cid))
        t = 1
        for member in sorted(upset):
            t *= primes[member]
        exponents[cid] = t
    return AklAssignment(p=p, base_key=base_key, exponents=exponents, primes=dict(primes))


def akl_key(assignment: AklAssignment, class_id: str) -> int:
    try:
        t = assignment.exponents[class_id]
    except KeyError:
        raise UnknownClass(f"unknown class {class_id!r}") from None
    return pow(assignment.base_key, t, assignment.p)


def akl_derive(assignment: AklAssignment, viewer: str, target: str) -> int:
    """Derive the target's key from the viewer's key via the exponent ratio."""
    for cid in (viewer, target):
        if cid not in assignment.exponents:
            raise UnknownClass(f"unknown class {cid!r}")
    t_v = assignment.exponents[viewer]
    t_t = assignment.exponents[target]
    if t_t % t_v != 0:
        raise NotPredecessor(f"{viewer!r} does not dominate {target!r}")
    return pow(akl_key(assignment, viewer), t_t // t_v, assignment.p)


# ---------------------------------------------------------------------------
# Enrollment
# ---------------------------------------------------------------------------

def sample_key(params: SchemeParams, rng: Random) -> int:
    """Draw an encryption key; masked schemes reject until it is shiftable."""
    if params.scheme not in MASKED_SCHEMES:
        return rng.randrange(1, params.p)
    ctx = params.radix
    for _ in range(RETRY_LIMIT * 4):
        k = rng.randrange(1, params.p)
        if shiftable(k, ctx):
            return k
    raise NotShiftable(f"no shiftable key found below {params.p} in base {params.base}")


def validate_key(params: SchemeParams, key: int) -> None:
    if not 1 <= key < params.p:
        raise NotShiftable(f"key must lie in [1, {params.p})")
    if params.scheme in MASKED_SCHEMES and not shiftable(key, params.radix):
        raise NotShiftable(
            f"key {key} is not maskable in base {params.base}: pick one whose top "
            f"digit is below the modulus's and whose lower digits are not all equal"
        )


def fresh_shift_index(key: int, params: SchemeParams, rng: Random, avoid_mask: int | None = None) -> int:
    """Draw a rotation count whose masked value is actually useful.

    At enrollment (avoid_mask None) the mask must differ from the key, so
    publishing it reveals nothing directly.  When re-randomizing a live
    filter the one binding constraint is that the new masked value differ
    from avoid_mask (the previously published one); for keys whose digit
    pattern has a small rotation orbit that may force the bare key, which
    is acceptable because the decoy swap carries the re-randomization.
    """
    ctx = params.radix
    if ctx.block < 2:
        raise NotShiftable(f"modulus {params.p} has no room for a nontrivial rotation")
    for _ in range(RETRY_LIMIT * 4):
        l = rng.randrange(1, ctx.block)
        masked = cyclic_shift(key, l, ctx)
        if avoid_mask is None:
            if masked != key:
                return l
        elif masked != avoid_mask:
            return l
    raise NotShiftable(f"no usable shift index for key {key} under modulus {params.p}")


def fresh_decoy(params: SchemeParams, rng: Random, forbidden: Iterable[int]) -> int:
    """Draw a CA-held decoy root distinct from everything in forbidden."""
    bad = set(forbidden)
    for _ in range(RETRY_LIMIT):
        h = rng.randrange(0, params.p)
        if h not in bad:
            return h
    raise RootCollision(f"could not find a fresh decoy among {params.p} residues")


def enroll_record(
    params: SchemeParams,
    class_id: str,
    rng: Random,
    *,
    ca_point: Point | None = None,
    ca_secret: int | None = None,
    used_secrets: set[int] | None = None,
    key: int | None = None,
) -> ClassRecord:
    """Create the authority-side record for one class.

    ECC schemes run the full transport ceremony: the class picks a nonce,
    masks (key, secret) against the authority's point, and the authority
    unmasks; the stored values are the decrypted ones.
    """
    if key is None:
        key = sample_key(params, rng)
    else:
        validate_key(params, key)
    used = used_secrets if used_secrets is not None else set()

    secret = None
    point = None
    public_base = None
    if params.scheme in ECC_SCHEMES:
        curve = params.curve
        assert curve is not None
        secret = _distinct(rng, 1, curve.q, used)
        point = scalar_mul(secret, curve.g, curve)
        key, secret = _transport_ceremony(key, secret, ca_point, ca_secret, curve, rng)
    elif params.scheme in EXP_SCHEMES:
        secret = _distinct(rng, 1, params.p, used)
        # p - 1 has order 2: it can never give more than two distinct roots
        public_base = rng.randrange(2, params.p - 1)
    if secret is not None:
        used.add(secret)

    decoy = None
    shift_index = None
    if params.scheme in MASKED_SCHEMES:
        decoy = rng.randrange(0, params.p)
        shift_index = fresh_shift_index(key, params, rng)

    return ClassRecord(
        id=class_id,
        key=key,
        secret=secret,
        point=point,
        public_base=public_base,
        decoy=decoy,
        shift_index=shift_index,
    )


def _distinct(rng: Random, lo: int, hi: int, used: set[int]) -> int:
    for _ in range(RETRY_LIMIT * 4):
        v = rng.randrange(lo, hi)
        if v not in used:
            return v
    raise RootCollision(f"exhausted distinct draws in [{lo}, {hi})")


def _transport_ceremony(
    key: int,
    secret: int,
    ca_point: Point | None,
    ca_secret: int | None,
    curve: CurveContext,
    rng: Random,
) -> tuple[int, int]:
    if ca_point is None or ca_secret is None:
        return key, secret
    for _ in range(RETRY_LIMIT):
        k = rng.randrange(1, curve.q)
        try:
            ct = transport_encrypt(key, secret, ca_point, k, curve)
        except DegenerateEphemeral:
            continue
        return transport_decrypt(ct, ca_secret, curve)
    raise DegenerateEphemeral("enrollment transport kept degenerating")


# ---------------------------------------------------------------------------
# Root values and filters
# ---------------------------------------------------------------------------

def root_value(state: CaState, target: str, viewer: str) -> int:
    """The evaluation point viewer uses on target's filter.

    Computable two ways that agree by construction: the viewer combines
    its own secret with the target's public data; the authority, holding
    every secret, does the same.
    """
    params = state.params
    t_rec = state.record(target)
    v_rec = state.record(viewer)
    if params.scheme in ECC_SCHEMES:
        curve = params.curve
        assert curve is not None and v_rec.secret is not None
        shared = scalar_mul(v_rec.secret, t_rec.point, curve)
        value = point_to_scalar(shared, curve)
        if params.scheme == "linhsu":
            assert params.salt is not None
            value = hash_root(params.salt, value, params.p)
        return value
    if params.scheme in EXP_SCHEMES:
        assert t_rec.public_base is not None and v_rec.secret is not None
        return pow(t_rec.public_base, v_rec.secret, params.p)
    raise UnknownScheme(f"scheme {params.scheme!r} has no filter roots")


def filter_roots(state: CaState, target: str) -> dict[str, int]:
    """Root value per strict predecessor of target (decoy not included)."""
    return {
        viewer: root_value(state, target, viewer)
        for viewer in sorted(state.hierarchy.strict_predecessors(target))
    }


def build_filter(state: CaState, target: str) -> SecureFilter:
    """Construct target's published filter from the current records.

    Classes without predecessors publish the zero filter.  Raises
    RootCollision when predecessor root values (or the decoy) coincide;
    the enrollment layer is responsible for resampling around that.
    """
    params = state.params
    rec = state.record(target)
    roots_by_viewer = filter_roots(state, target)
    if not roots_by_viewer:
        return SecureFilter(owner=target, scheme=params.scheme, poly=zero_poly(params.p))

    roots = list(roots_by_viewer.values())
    if len(set(roots)) != len(roots):
        dup = sorted(v for v in set(roots) if roots.count(v) > 1)
        raise RootCollision(f"filter roots for {target!r} collide at {dup}")

    if params.scheme in MASKED_SCHEMES:
        assert rec.decoy is not None and rec.shift_index is not None
        if rec.decoy in roots:
            raise RootCollision(f"decoy for {target!r} equals a predecessor root")
        mask = cyclic_shift(rec.key, rec.shift_index, params.radix)
        f = poly_from_roots(roots + [rec.decoy], mask, params.p)
        return SecureFilter(owner=target, scheme=params.scheme, poly=f, shift_index=rec.shift_index)

    f = poly_from_roots(roots, rec.key, params.p)
    return SecureFilter(owner=target, scheme=params.scheme, poly=f)


def build_all_filters(state: CaState) -> dict[str, SecureFilter]:
    if state.scheme not in FILTER_SCHEMES:
        return {}
    return {cid: build_filter(state, cid) for cid in sorted(state.hierarchy.nodes)}


def repair_root_collisions(
    state: CaState, rng: Random, resample_pool: set[str] | None = None
) -> None:
    """Resample secrets until every filter's roots are pairwise distinct.

    resample_pool limits whose secrets may change (the entering class
    during a dynamic insert); a collision purely among classes outside
    the pool is surfaced as RootCollision rather than silently rewriting
    unrelated keys.
    """
    params = state.params
    if params.scheme not in FILTER_SCHEMES:
        return
    used = {r.secret for r in state.records.values() if r.secret is not None}
    for _ in range(RETRY_LIMIT * 4):
        clash = _find_collision(state)
        if clash is None:
            return
        target, offenders = clash
        victim = _pick_victim(offenders, resample_pool)
        if victim is None:
            raise RootCollision(
                f"root collision in filter of {target!r} among {sorted(offenders)}; "
                f"not allowed to resample any of them"
            )
        rec = state.records[victim]
        used.discard(rec.secret)
        if params.scheme in ECC_SCHEMES:
            curve = params.curve
            assert curve is not None
            secret = _distinct(rng, 1, curve.q, used)
            point = scalar_mul(secret, curve.g, curve)
            key, secret = _transport_ceremony(
                rec.key, secret, state.ca_point, state.ca_secret, curve, rng
            )
            state.records[victim] = replace(rec, key=key, secret=secret, point=point)
        else:
            secret = _distinct(rng, 1, params.p, used)
            state.records[victim] = replace(rec, secret=secret)
        used.add(secret)
    raise RootCollision("could not clear root collisions within the retry budget")


def _find_collision(state: CaState) -> tuple[str, list[str]] | None:
    for target in sorted(state.hierarchy.nodes):
        roots = filter_roots(state, target)
        seen: dict[int, str] = {}
        for viewer, value in roots.items():
            if value in seen:
                return target, [seen[value], viewer]
            seen[value] = viewer
    return None


def _pick_victim(offenders: list[str], pool: set[str] | None) -> str | None:
    candidates = offenders if pool is None else [o for o in offenders if o in pool]
    if not candidates:
        return None
    return sorted(candidates)[-1]


def assign_decoys(state: CaState, rng: Random, targets: Iterable[str] | None = None) -> None:
    """(Re)draw decoy roots so each stays clear of its own filter's roots."""
    if state.params.scheme not in MASKED_SCHEMES:
        return
    ids = sorted(state.hierarchy.nodes) if targets is None else sorted(targets)
    for cid in ids:
        roots = set(filter_roots(state, cid).values())
        rec = state.records[cid]
        if rec.decoy is not None and rec.decoy not in roots:
            continue
        state.records[cid] = replace(rec, decoy=fresh_decoy(state.params, rng, roots))


# ---------------------------------------------------------------------------
# Setup and derivation
# ---------------------------------------------------------------------------

def setup(
    scheme: str,
    hierarchy: Hierarchy,
    p: int,
    rng: Random,
    *,
    base: int = 10,
    curve: CurveContext | None = None,
    keys: dict[str, int] | None = None,
    akl_base_key: int | None = None,
) -> CaState:
    """Enroll every class of the hierarchy and publish all filters."""
    if scheme in ECC_SCHEMES and curve is None:
        curve = DEFAULT_CURVES.get(p)
    salt = rng.randrange(1, p) if scheme == "linhsu" else None
    params = SchemeParams(scheme=scheme, p=p, base=base, curve=curve, salt=salt)

    state = CaState(params=params, hierarchy=hierarchy, records={})
    if scheme in ECC_SCHEMES:
        assert curve is not None
        state.ca_secret = rng.randrange(1, curve.q)
        state.ca_point = scalar_mul(state.ca_secret, curve.g, curve)

    if scheme == "akl":
        base_key = akl_base_key if akl_base_key is not None else rng.randrange(2, p)
        state.akl = akl_setup(hierarchy, base_key, p)
        for cid in sorted(hierarchy.nodes):
            state.records[cid] = ClassRecord(
                id=cid,
                key=akl_key(state.akl, cid),
                exponent=state.akl.exponents[cid],
                prime=state.akl.primes[cid],
            )
        state.filters = {}
        return state

    used: set[int] = set()
    for cid in sorted(hierarchy.nodes):
        key = keys.get(cid) if keys else None
        state.records[cid] = enroll_record(
            params,
            cid,
            rng,
            ca_point=state.ca_point,
            ca_secret=state.ca_secret,
            used_secrets=used,
            key=key,
        )
    repair_root_collisions(state, rng)
    assign_decoys(state, rng)
    state.filters = build_all_filters(state)
    return state


def derive_from_filter(filt: SecureFilter, eval_point: int, params: SchemeParams) -> int:
    """Evaluate a published filter and strip the mask if the scheme uses one.

    This is the viewer-side operation: it consumes only public data plus
    the evaluation point.  A wrong evaluation point yields garbage that
    only a comparison against the true key can detect.
    """
    value = poly_eval(filt.poly, eval_point)
    if filt.scheme in MASKED_SCHEMES and filt.shift_index is not None:
        # A zero filter publishes no shift index; the raw value (always 0,
        # never a valid key) is all a viewer can compute then.
        value = cyclic_shift(value, -filt.shift_index, params.radix)
    return value


def derive_key(state: CaState, viewer: str, target: str) -> int:
    """Derive target's key as viewer.

    The reserved viewer "ca" (and a class asking about itself) reads the
    stored key directly.  Otherwise the scheme's derivation runs on public
    data: exponent ratios for akl, filter evaluation for the rest.  The
    result is only guaranteed to equal the stored key when viewer strictly
    dominates target.
    """
    if viewer == CA_VIEWER:
        return state.record(target).key
    v_rec = state.record(viewer)
    t_rec = state.record(target)
    if viewer == target:
        return v_rec.key
    if state.scheme == "akl":
        assert state.akl is not None
        t_v, t_t = v_rec.exponent, t_rec.exponent
        assert t_v is not None and t_t is not None
        if t_t % t_v != 0:
            raise NotPredecessor(f"{viewer!r} does not dominate {target!r}")
        return pow(v_rec.key, t_t // t_v, state.params.p)
    filt = state.filters[target]
    return derive_from_filter(filt, root_value(state, target, viewer), state.params)
