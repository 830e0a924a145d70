"""Persistence: the public board and the authority's secret store.

One JSON document per file, every integer serialized as a decimal string
so consumers in other languages never hit 64-bit precision issues.
Serialization is deterministic (sorted keys, fixed separators): the same
state always produces identical bytes.  Writes go through a temp file
and an atomic replace.

The public board carries coefficients (ascending, leading 1 omitted on
the wire), public points/bases/exponents, shift indices, curve and hash
parameters, and the hierarchy's adjacency.  Keys, scheme secrets, decoy
roots and the authority's scalar live only in the secret store, which is
written with owner-only permissions.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .curve import CurveContext, Point
from .errors import ParseError, SchemeMismatch, VersionMismatch
from .hierarchy import Hierarchy
from .modmath import Poly, poly, zero_poly
from .schemes import (
    AklAssignment,
    CaState,
    ClassRecord,
    FILTER_SCHEMES,
    SCHEME_TAGS,
    SecureFilter,
)

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Wire helpers
# ---------------------------------------------------------------------------

def coeffs_to_wire(f: Poly) -> tuple[int, list[str]]:
    """(degree, published coefficients): monic leading 1 dropped, zero filter empty."""
    if f.is_zero:
        return 0, []
    assert f.is_monic, "published filters are monic"
    return f.degree, [str(c) for c in f.coeffs[:-1]]


def coeffs_from_wire(degree: int, wire: list[str], p: int) -> Poly:
    """Rebuild the in-memory polynomial, restoring the implicit leading 1."""
    if degree == 0:
        if wire:
            raise ParseError("zero filter must publish no coefficients")
        return zero_poly(p)
    if len(wire) != degree:
        raise ParseError(f"degree {degree} filter must publish exactly {degree} coefficients")
    return poly([int(c) for c in wire] + [1], p)


def _int(obj: dict, key: str, where: str) -> int:
    try:
        return int(obj[key])
    except KeyError:
        raise ParseError(f"missing field {key!r} in {where}") from None
    except (TypeError, ValueError):
        raise ParseError(f"field {key!r} in {where} is not a decimal integer") from None


def _opt_int(obj: dict, key: str) -> int | None:
    v = obj.get(key)
    return None if v is None else int(v)


# ---------------------------------------------------------------------------
# Public board
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoardClass:
    """Public per-class entry."""

    degree: int
    coeffs: tuple[str, ...]            # ascending, leading 1 omitted
    point: tuple[int, int] | None = None
    public_base: int | None = None
    exponent: int | None = None
    shift_index: int | None = None


@dataclass(frozen=True)
class PublicBoard:
    epoch: int
    scheme: str
    p: int
    base: int
    classes: dict[str, BoardClass]
    edges: tuple[tuple[str, str], ...]
    curve: tuple[int, int, int, int, int, int] | None = None  # p, a, b, gx, gy, q
    scalar_map: str | None = None
    salt: int | None = None
    ca_point: tuple[int, int] | None = None
    version: int = FORMAT_VERSION

    def filter_poly(self, class_id: str) -> Poly:
        entry = self.classes[class_id]
        return coeffs_from_wire(entry.degree, list(entry.coeffs), self.p)


def board_from_state(state: CaState) -> PublicBoard:
    """Extract the public view: everything an adversary may read."""
    classes: dict[str, BoardClass] = {}
    for cid in sorted(state.hierarchy.nodes):
        rec = state.records[cid]
        if state.scheme in FILTER_SCHEMES:
            f = state.filters[cid]
            degree, wire = coeffs_to_wire(f.poly)
            # The rotation count is public per class even while its filter
            # is still the zero polynomial (no predecessors yet).
            shift = rec.shift_index
        else:
            degree, wire, shift = 0, [], None
        classes[cid] = BoardClass(
            degree=degree,
            coeffs=tuple(wire),
            point=(rec.point.x, rec.point.y) if rec.point else None,
            public_base=rec.public_base,
            exponent=rec.exponent,
            shift_index=shift,
        )
    curve = state.params.curve
    return PublicBoard(
        epoch=state.epoch,
        scheme=state.scheme,
        p=state.params.p,
        base=state.params.base,
        classes=classes,
        edges=tuple(sorted(state.hierarchy.edges)),
        curve=(curve.p, curve.a, curve.b, curve.gx, curve.gy, curve.q) if curve else None,
        scalar_map=curve.scalar_map if curve else None,
        salt=state.params.salt,
        ca_point=(state.ca_point.x, state.ca_point.y) if state.ca_point else None,
    )


def board_to_obj(board: PublicBoard) -> dict:
    classes = {}
    for cid, entry in sorted(board.classes.items()):
        item: dict = {"degree": str(entry.degree), "coeffs": list(entry.coeffs)}
        if entry.point is not None:
            item["point"] = [str(entry.point[0]), str(entry.point[1])]
        if entry.public_base is not None:
            item["base"] = str(entry.public_base)
        if entry.exponent is not None:
            item["exponent"] = str(entry.exponent)
        if entry.shift_index is not None:
            item["shift_index"] = str(entry.shift_index)
        classes[cid] = item
    params: dict = {"p": str(board.p), "base": str(board.base)}
    if board.curve is not None:
        params["curve"] = {
            k: str(v) for k, v in zip(("p", "a", "b", "gx", "gy", "q"), board.curve)
        }
        params["scalar_map"] = board.scalar_map or "x"
    if board.salt is not None:
        params["salt"] = str(board.salt)
    if board.ca_point is not None:
        params["ca_point"] = [str(board.ca_point[0]), str(board.ca_point[1])]
    return {
        "version": str(board.version),
        "epoch": str(board.epoch),
        "scheme": board.scheme,
        "params": params,
        "classes": classes,
        "edges": [[u, v] for u, v in sorted(board.edges)],
    }


def board_from_obj(obj: dict) -> PublicBoard:
    if not isinstance(obj, dict):
        raise ParseError("board document must be a JSON object")
    version = _int(obj, "version", "board")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported board version {version}")
    scheme = obj.get("scheme")
    if scheme not in SCHEME_TAGS:
        raise ParseError(f"unknown scheme tag {scheme!r} in board")
    params = obj.get("params")
    if not isinstance(params, dict):
        raise ParseError("missing params object in board")
    p = _int(params, "p", "params")
    curve = None
    scalar_map = None
    if "curve" in params:
        c = params["curve"]
        try:
            curve = tuple(int(c[k]) for k in ("p", "a", "b", "gx", "gy", "q"))
        except (KeyError, TypeError, ValueError):
            raise ParseError("curve parameters must carry decimal p,a,b,gx,gy,q") from None
        scalar_map = params.get("scalar_map", "x")
    classes_obj = obj.get("classes")
    if not isinstance(classes_obj, dict):
        raise ParseError("missing classes object in board")
    classes: dict[str, BoardClass] = {}
    for cid, item in classes_obj.items():
        if not isinstance(item, dict):
            raise ParseError(f"class entry {cid!r} must be an object")
        degree = _int(item, "degree", f"class {cid!r}")
        coeffs = item.get("coeffs")
        if not isinstance(coeffs, list):
            raise ParseError(f"class {cid!r} has no coefficient list")
        point = item.get("point")
        classes[cid] = BoardClass(
            degree=degree,
            coeffs=tuple(str(int(c)) for c in coeffs),
            point=(int(point[0]), int(point[1])) if point is not None else None,
            public_base=_opt_int(item, "base"),
            exponent=_opt_int(item, "exponent"),
            shift_index=_opt_int(item, "shift_index"),
        )
    edges_obj = obj.get("edges")
    if not isinstance(edges_obj, list):
        raise ParseError("missing edges list in board")
    edges = []
    for e in edges_obj:
        if not (isinstance(e, list) and len(e) == 2):
            raise ParseError(f"malformed edge entry {e!r}")
        edges.append((str(e[0]), str(e[1])))
    ca_point = params.get("ca_point")
    return PublicBoard(
        epoch=_int(obj, "epoch", "board"),
        scheme=scheme,
        p=p,
        base=int(params.get("base", "10")),
        classes=classes,
        edges=tuple(sorted(edges)),
        curve=curve,
        scalar_map=scalar_map,
        salt=_opt_int(params, "salt"),
        ca_point=(int(ca_point[0]), int(ca_point[1])) if ca_point is not None else None,
    )


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _atomic_write(path: Path, text: str, mode: int | None = None) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    if mode is not None:
        os.chmod(tmp, mode)
    os.replace(tmp, path)


def save_board(board: PublicBoard, path: str | Path) -> None:
    _atomic_write(Path(path), _dump(board_to_obj(board)))


def load_board(path: str | Path) -> PublicBoard:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read board file {path}: {e}") from e
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"board file {path} is not valid JSON: {e}") from e
    return board_from_obj(obj)


# ---------------------------------------------------------------------------
# Epoch diffs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoardDiff:
    added: tuple[str, ...]
    removed: tuple[str, ...]
    changed: tuple[str, ...]  # present in both, published entry differs

    @property
    def touched(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.added) | set(self.removed) | set(self.changed)))


def diff_epochs(old: PublicBoard, new: PublicBoard) -> BoardDiff:
    """Per-class comparison of two epochs of the same system."""
    if old.scheme != new.scheme or old.p != new.p:
        raise SchemeMismatch(
            f"cannot diff boards: scheme/modulus ({old.scheme}, {old.p}) "
            f"vs ({new.scheme}, {new.p})"
        )
    old_ids = set(old.classes)
    new_ids = set(new.classes)
    changed = []
    for cid in sorted(old_ids & new_ids):
        if old.classes[cid] != new.classes[cid]:
            changed.append(cid)
    return BoardDiff(
        added=tuple(sorted(new_ids - old_ids)),
        removed=tuple(sorted(old_ids - new_ids)),
        changed=tuple(changed),
    )


# ---------------------------------------------------------------------------
# Secret store
# ---------------------------------------------------------------------------

def secrets_to_obj(state: CaState, master_seed: str | None = None) -> dict:
    per_class = {}
    for cid in sorted(state.records):
        rec = state.records[cid]
        entry: dict = {"key": str(rec.key)}
        if rec.secret is not None:
            entry["secret"] = str(rec.secret)
        if rec.decoy is not None:
            entry["decoy"] = str(rec.decoy)
        if rec.prime is not None:
            entry["prime"] = str(rec.prime)
        per_class[cid] = entry
    obj: dict = {
        "version": str(FORMAT_VERSION),
        "scheme": state.scheme,
        "classes": per_class,
    }
    if state.ca_secret is not None:
        obj["ca_secret"] = str(state.ca_secret)
    if state.akl is not None:
        obj["akl_base_key"] = str(state.akl.base_key)
    if master_seed is not None:
        obj["master_seed"] = master_seed
    return obj


def save_secrets(state: CaState, path: str | Path, master_seed: str | None = None) -> None:
    _atomic_write(Path(path), _dump(secrets_to_obj(state, master_seed)), mode=0o600)


def load_secrets_obj(path: str | Path) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"cannot read secret store {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"secret store {path} is not valid JSON: {e}") from e
    if _int(obj, "version", "secret store") != FORMAT_VERSION:
        raise VersionMismatch("unsupported secret store version")
    return obj


# ---------------------------------------------------------------------------
# Reassembly
# ---------------------------------------------------------------------------

def state_from_parts(board: PublicBoard, secrets: dict) -> CaState:
    """Rebuild the authority state from the public board plus the secret store."""
    if secrets.get("scheme") != board.scheme:
        raise SchemeMismatch(
            f"secret store is for scheme {secrets.get('scheme')!r}, board for {board.scheme!r}"
        )
    from .schemes import SchemeParams

    curve_ctx = None
    if board.curve is not None:
        cp, ca, cb, gx, gy, q = board.curve
        curve_ctx = CurveContext(
            p=cp, a=ca, b=cb, gx=gx, gy=gy, q=q, scalar_map=board.scalar_map or "x"
        )
    params = SchemeParams(
        scheme=board.scheme, p=board.p, base=board.base, curve=curve_ctx, salt=board.salt
    )
    hierarchy = Hierarchy.build(sorted(board.classes), board.edges)

    sec_classes = secrets.get("classes")
    if not isinstance(sec_classes, dict):
        raise ParseError("secret store has no classes object")

    records: dict[str, ClassRecord] = {}
    filters: dict[str, SecureFilter] = {}
    for cid in sorted(board.classes):
        pub = board.classes[cid]
        if cid not in sec_classes:
            raise ParseError(f"secret store is missing class {cid!r}")
        sec = sec_classes[cid]
        records[cid] = ClassRecord(
            id=cid,
            key=_int(sec, "key", f"secrets for {cid!r}"),
            secret=_opt_int(sec, "secret"),
            point=Point(*pub.point) if pub.point else None,
            public_base=pub.public_base,
            decoy=_opt_int(sec, "decoy"),
            shift_index=pub.shift_index,
            exponent=pub.exponent,
            prime=_opt_int(sec, "prime"),
        )
        if board.scheme in FILTER_SCHEMES:
            parsed = board.filter_poly(cid)
            filters[cid] = SecureFilter(
                owner=cid,
                scheme=board.scheme,
                poly=parsed,
                shift_index=None if parsed.is_zero else pub.shift_index,
            )

    akl = None
    if board.scheme == "akl":
        exponents = {}
        for cid in board.classes:
            if board.classes[cid].exponent is None:
                raise ParseError(f"class {cid!r} on an akl board must publish an exponent")
            exponents[cid] = board.classes[cid].exponent
        akl = AklAssignment(
            p=board.p,
            base_key=_int(secrets, "akl_base_key", "secret store"),
            exponents=exponents,
            primes={cid: _int(sec_classes[cid], "prime", f"secrets for {cid!r}") for cid in board.classes},
        )

    return CaState(
        params=params,
        hierarchy=hierarchy,
        records=records,
        filters=filters,
        epoch=board.epoch,
        ca_secret=_opt_int(secrets, "ca_secret"),
        ca_point=Point(*board.ca_point) if board.ca_point else None,
        akl=akl,
    )
