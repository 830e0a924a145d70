"""Operator frontend for the authority: init, enroll, derive, inspect, attack.

State lives under $HIERKEY_HOME (default ./.hierkey): the current public
board, the secret store, and one board snapshot per epoch so attack
demos can compare any two published states.  Every mutation bumps the
epoch exactly once.  A master seed fixed at init drives all sampling, so
a session started with --seed replays byte-identically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from random import Random

from . import board as board_mod
from . import dynamics, schemes
from .attacks import judge, linhsu_attack, shift_unmask, tripathy_paul_attack
from .curve import CurveContext
from .errors import HierKeyError, ParseError
from .hierarchy import Hierarchy
from .radixshift import RadixContext, cyclic_shift
from .schemes import CaState, MASKED_SCHEMES

BOARD_FILE = "board.json"
SECRETS_FILE = "ca_secrets.json"
SNAPSHOT_DIR = "snapshots"


def state_home() -> Path:
    return Path(os.environ.get("HIERKEY_HOME", ".hierkey"))


def _snapshot_path(home: Path, epoch: int) -> Path:
    return home / SNAPSHOT_DIR / f"board-{epoch:06d}.json"


def _save_all(home: Path, state: CaState, master_seed: str) -> None:
    home.mkdir(parents=True, exist_ok=True)
    (home / SNAPSHOT_DIR).mkdir(exist_ok=True)
    board = board_mod.board_from_state(state)
    board_mod.save_board(board, home / BOARD_FILE)
    board_mod.save_board(board, _snapshot_path(home, state.epoch))
    board_mod.save_secrets(state, home / SECRETS_FILE, master_seed=master_seed)


def _load_all(home: Path) -> tuple[CaState, str]:
    board = board_mod.load_board(home / BOARD_FILE)
    secrets = board_mod.load_secrets_obj(home / SECRETS_FILE)
    seed = secrets.get("master_seed")
    if not isinstance(seed, str):
        raise ParseError("secret store is missing the master seed")
    return board_mod.state_from_parts(board, secrets), seed


def _mutation_rng(master_seed: str, epoch: int, verb: str, arg: str) -> Random:
    # String seeding hashes the text, so separate invocations replay identically.
    return Random(f"{master_seed}:{epoch}:{verb}:{arg}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_init(args: argparse.Namespace) -> int:
    home = state_home()
    if (home / BOARD_FILE).exists():
        print(f"error: {home} already holds a board; remove it first", file=sys.stderr)
        return 1
    curve = None
    if args.curve:
        try:
            cp, ca, cb, gx, gy, q = (int(v) for v in args.curve.split(","))
        except ValueError:
            print("error: --curve expects p,a,b,gx,gy,q", file=sys.stderr)
            return 2
        curve = CurveContext(p=cp, a=ca, b=cb, gx=gx, gy=gy, q=q)
    master_seed = args.seed if args.seed is not None else str(Random().randrange(2**63))
    rng = _mutation_rng(master_seed, 0, "init", args.scheme)
    state = schemes.setup(
        args.scheme, Hierarchy.empty(), args.p, rng, base=args.base, curve=curve
    )
    _save_all(home, state, master_seed)
    print(f"initialized scheme={args.scheme} p={args.p} epoch=0 at {home}")
    return 0


def cmd_class_add(args: argparse.Namespace) -> int:
    home = state_home()
    state, seed = _load_all(home)
    rng = _mutation_rng(seed, state.epoch, "add", args.id)
    state = dynamics.insert_class_dynamic(
        state, args.id, above=args.above, below=args.below, rng=rng, key=args.key
    )
    _save_all(home, state, seed)
    print(f"added class {args.id} (epoch {state.epoch})")
    return 0


def cmd_class_remove(args: argparse.Namespace) -> int:
    home = state_home()
    state, seed = _load_all(home)
    rng = _mutation_rng(seed, state.epoch, "remove", args.id)
    state = dynamics.remove_class_dynamic(state, args.id, rng=rng)
    _save_all(home, state, seed)
    print(f"removed class {args.id} (epoch {state.epoch})")
    return 0


def cmd_derive(args: argparse.Namespace) -> int:
    state, _ = _load_all(state_home())
    value = schemes.derive_key(state, args.viewer, args.target)
    print(value)
    if args.verify:
        stored = state.record(args.target).key
        if value == stored:
            print("verify: OK")
        else:
            print("verify: MISMATCH (viewer is not a predecessor)")
            return 1
    return 0


def cmd_board_show(args: argparse.Namespace) -> int:
    home = state_home()
    if args.epoch is not None:
        board = board_mod.load_board(_snapshot_path(home, args.epoch))
    else:
        board = board_mod.load_board(home / BOARD_FILE)
    print(json.dumps(board_mod.board_to_obj(board), indent=2, sort_keys=True))
    if args.unsafe_show_secrets:
        secrets = board_mod.load_secrets_obj(home / SECRETS_FILE)
        print(json.dumps(secrets, indent=2, sort_keys=True))
    return 0


def cmd_attack(args: argparse.Namespace) -> int:
    home = state_home()
    try:
        k1, k2 = (int(v) for v in args.epochs.split(","))
    except ValueError:
        print("error: --epochs expects two epoch numbers k1,k2", file=sys.stderr)
        return 2
    old_board = board_mod.load_board(_snapshot_path(home, k1))
    new_board = board_mod.load_board(_snapshot_path(home, k2))
    cid = args.target_class
    if cid not in old_board.classes or cid not in new_board.classes:
        print(f"error: class {cid!r} must exist in both epochs", file=sys.stderr)
        return 1
    old_poly = old_board.filter_poly(cid)
    new_poly = new_board.filter_poly(cid)

    unmask_old = unmask_new = None
    if old_board.scheme in MASKED_SCHEMES:
        ctx = RadixContext(old_board.base, old_board.p)
        so = old_board.classes[cid].shift_index
        sn = new_board.classes[cid].shift_index
        unmask_old = shift_unmask(so, ctx) if so is not None else None
        unmask_new = shift_unmask(sn, ctx) if sn is not None else None

    if args.attack == "linhsu":
        report = linhsu_attack(
            old_poly, new_poly, scheme=old_board.scheme, target=cid,
            unmask_old=unmask_old, unmask_new=unmask_new,
        )
    else:
        report = tripathy_paul_attack(
            old_poly, new_poly, scheme=old_board.scheme, target=cid, unmask_new=unmask_new,
        )

    print(f"attack={report.attack} scheme={report.scheme} class={cid} epochs={k1}->{k2}")
    if report.degenerate:
        print("degenerate: filters identical, nothing to compare")
        return 0
    print(f"candidate roots: {list(report.candidate_roots)}")
    print(f"candidate keys:  {list(report.candidate_keys)}")
    # The operator runs CA-side, so the verdict uses the secret store.
    state, _ = _load_all(home)
    judged = judge(report, state.record(cid).key)
    print(f"verdict: {'KEY RECOVERED' if judged.success else 'attack failed'}")
    return 0


def cmd_demo_paper(args: argparse.Namespace) -> int:
    checks: list[tuple[str, bool]] = []

    def check(name: str, ok: bool) -> None:
        checks.append((name, ok))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")

    # Decimal rotation table for 21349 under a five-digit modulus.
    ctx10 = RadixContext(10, 99991)
    table = [cyclic_shift(21349, l, ctx10) for l in (1, 2, 3, 4)]
    print(f"decimal shifts of 21349: {table}")
    check("shift-by-1..4 of 21349 = 23491, 24913, 29134, 21349",
          table == [23491, 24913, 29134, 21349])

    # Binary rotation table for 0b11110 under a five-bit modulus.
    ctx2 = RadixContext(2, 31)
    btable = [cyclic_shift(0b11110, l, ctx2) for l in (1, 2, 3, 4)]
    print(f"binary shifts of 11110: {[bin(v)[2:].zfill(5) for v in btable]}")
    check("binary shifts = 11101, 11011, 10111, 11110",
          btable == [0b11101, 0b11011, 0b10111, 0b11110])

    # Non-invertible counterexample: top digit collides with the modulus's.
    ctx239 = RadixContext(10, 239)
    forward = cyclic_shift(235, 1, ctx239)
    back = cyclic_shift(forward, -1, ctx239)
    print(f"shift 235 by 1 mod 239 -> {forward}, back -> {back}")
    check("round trip of 235 under p=239 lands on 41, not 235", back == 41 and back != 235)

    # Five-class hierarchy with predecessor counts 0,1,1,2,3.
    seed = args.seed if args.seed is not None else "demo"
    h = Hierarchy.build(
        ["u1", "u2", "u3", "u4", "u5"],
        [("u1", "u2"), ("u1", "u3"), ("u2", "u4"), ("u2", "u5"), ("u3", "u5")],
    )
    state = schemes.setup("m1", h, 10007, Random(f"{seed}:setup"))
    degrees = [max(state.filters[c].degree, 0) for c in sorted(h.nodes)]
    print(f"filter degrees for u1..u5: {degrees}")
    check("filter degree vector is 0,2,2,3,4", degrees == [0, 2, 2, 3, 4])

    # Insert u6 between u1 and u4: exactly one existing filter changes.
    inserted = dynamics.insert_class_dynamic(
        state, "u6", above=["u1"], below=["u4"], rng=Random(f"{seed}:insert")
    )
    changed = [c for c in sorted(state.filters)
               if state.filters[c].poly != inserted.filters[c].poly]
    check("inserting u6 above u4 updates only u4's filter", changed == ["u4"])
    check("u6's filter has degree 2", inserted.filters["u6"].degree == 2)
    check("u6 derives u4's key exactly",
          schemes.derive_key(inserted, "u6", "u4") == inserted.records["u4"].key)
    rebuilt = dynamics.rebuild_filters(inserted)
    check("incremental insert equals full rebuild, coefficient-exact",
          all(inserted.filters[c].poly == rebuilt[c].poly for c in rebuilt))

    # Remove u3: u5's filter shrinks from degree 4 to 3.
    removed = dynamics.remove_class_dynamic(state, "u3", Random(f"{seed}:remove"))
    check("removing u3 shrinks u5's filter from degree 4 to 3",
          state.filters["u5"].degree == 4 and removed.filters["u5"].degree == 3)
    rebuilt = dynamics.rebuild_filters(removed)
    check("incremental removal equals full rebuild, coefficient-exact",
          all(removed.filters[c].poly == rebuilt[c].poly for c in rebuilt))
    ok = all(
        schemes.derive_key(removed, v, t) == removed.records[t].key
        for t in sorted(removed.hierarchy.nodes)
        for v in sorted(removed.hierarchy.strict_predecessors(t))
    )
    check("all surviving derivations still exact after removal", ok)

    failed = [name for name, ok in checks if not ok]
    print(f"\n{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierkey",
        description="CA-side toolkit for hierarchical key assignment with secure filters",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="create a new system in $HIERKEY_HOME")
    p_init.add_argument("--scheme", choices=schemes.SCHEME_TAGS, default="m1")
    p_init.add_argument("--p", type=int, default=10007, help="filter modulus (prime)")
    p_init.add_argument("--base", type=int, default=10, help="radix for shift masking")
    p_init.add_argument("--curve", help="p,a,b,gx,gy,q (defaults to a built-in curve for --p)")
    p_init.add_argument("--seed", help="master seed; fixes all sampling for replay")
    p_init.set_defaults(func=cmd_init)

    p_class = sub.add_parser("class", help="add or remove a security class")
    class_sub = p_class.add_subparsers(dest="class_command", required=True)
    p_add = class_sub.add_parser("add", help="enroll a class")
    p_add.add_argument("id")
    p_add.add_argument("--above", action="append", default=[],
                       help="existing class that will dominate the new one")
    p_add.add_argument("--below", action="append", default=[],
                       help="existing class the new one will dominate")
    p_add.add_argument("--key", type=int, help="explicit encryption key (validated)")
    p_add.set_defaults(func=cmd_class_add)
    p_rm = class_sub.add_parser("remove", help="remove a class")
    p_rm.add_argument("id")
    p_rm.set_defaults(func=cmd_class_remove)

    p_derive = sub.add_parser("derive", help="derive a key as some viewer")
    p_derive.add_argument("--as", dest="viewer", required=True,
                          help="viewer class id (or 'ca' for the authority)")
    p_derive.add_argument("--target", required=True)
    p_derive.add_argument("--verify", action="store_true",
                          help="compare against the stored key")
    p_derive.set_defaults(func=cmd_derive)

    p_board = sub.add_parser("board", help="inspect the public board")
    board_sub = p_board.add_subparsers(dest="board_command", required=True)
    p_show = board_sub.add_parser("show")
    p_show.add_argument("--epoch", type=int, help="show a historic snapshot")
    p_show.add_argument("--unsafe-show-secrets", action="store_true",
                        help="also dump the secret store")
    p_show.set_defaults(func=cmd_board_show)

    p_attack = sub.add_parser("attack", help="run a published attack on two epochs")
    p_attack.add_argument("attack", choices=("linhsu", "tp"))
    p_attack.add_argument("--class", dest="target_class", required=True)
    p_attack.add_argument("--epochs", required=True, help="k1,k2 snapshot epochs to compare")
    p_attack.set_defaults(func=cmd_attack)

    p_demo = sub.add_parser("demo", help="replay the worked examples")
    demo_sub = p_demo.add_subparsers(dest="demo_command", required=True)
    p_paper = demo_sub.add_parser("paper")
    p_paper.add_argument("--seed", help="seed for the replayed system")
    p_paper.set_defaults(func=cmd_demo_paper)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HierKeyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
