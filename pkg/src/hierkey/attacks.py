"""Adversaries that compare two published epochs of the same filter.

Both attacks consume public data only: coefficient vectors before and
after a hierarchy change, plus whatever unmasking hints the board
publishes (the shift index, for the masked schemes).  Success is judged
outside, by whoever holds the true key; the attack itself just reports
candidates.

Root-recovery (tag "linhsu"): when a filter grows by one root and the
mask stays put, old and new agree on every old root, so the difference
polynomial exposes them; evaluating the old filter there yields the key.

Coefficient-subtraction (tag "tp"): for monic filters the coefficient
below the leading term is minus the root sum, so subtracting the two
subleading coefficients of consecutive epochs isolates the new root;
evaluating the new filter there yields the key.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

from .errors import DegreeMismatch, ModulusMismatch
from .modmath import DEGENERATE, Poly, find_roots, poly_eval, poly_sub
from .radixshift import RadixContext, cyclic_shift

Unmask = Callable[[int], int]


@dataclass(frozen=True)
class AttackReport:
    """What an adversary recovered from one epoch pair.

    candidate_keys holds every key value the attack can justify from
    public data; success stays None until judged against the true key by
    a party that holds it.
    """

    attack: str
    scheme: str
    target: str | None
    candidate_roots: tuple[int, ...] = ()
    candidate_keys: tuple[int, ...] = ()
    degenerate: bool = False
    success: bool | None = None
    transcript: dict = field(default_factory=dict)


def shift_unmask(shift_index: int, ctx: RadixContext) -> Unmask:
    """Adversary-side unmasking from the published rotation count."""
    return lambda value: cyclic_shift(value, -shift_index, ctx)


def linhsu_attack(
    old: Poly,
    new: Poly,
    *,
    scheme: str = "unknown",
    target: str | None = None,
    unmask_old: Unmask | None = None,
    unmask_new: Unmask | None = None,
) -> AttackReport:
    """Root-recovery on consecutive filter epochs.

    Scans for the roots of (new - old) and turns each into key
    candidates via both epochs' unmasking hints.  If the filters are
    identical the difference is the zero polynomial and the report is
    flagged degenerate.
    """
    if old.p != new.p:
        raise ModulusMismatch(f"epochs use different moduli: {old.p} vs {new.p}")
    base = AttackReport(
        attack="linhsu",
        scheme=scheme,
        target=target,
        transcript={"old_coeffs": old.coeffs, "new_coeffs": new.coeffs},
    )
    if old == new:
        # Nothing changed between the epochs: the difference is the zero
        # polynomial and there is nothing to solve.
        return replace(base, degenerate=True)
    if new.degree != old.degree + 1:
        raise DegreeMismatch(
            f"expected the new filter to grow by one (old degree {old.degree}, "
            f"new degree {new.degree})"
        )
    diff = poly_sub(new, old)
    roots = find_roots(diff)
    assert roots is not DEGENERATE  # distinct epochs cannot cancel completely
    candidates: list[int] = []
    for r in sorted(roots):
        value = poly_eval(old, r)  # equals new(r) at any root of the difference
        candidates.append(unmask_old(value) if unmask_old else value)
        if unmask_new:
            candidates.append(unmask_new(value))
    return replace(
        base,
        candidate_roots=tuple(sorted(roots)),
        candidate_keys=tuple(dict.fromkeys(candidates)),
    )


def tripathy_paul_attack(
    old: Poly,
    new: Poly,
    *,
    scheme: str = "unknown",
    target: str | None = None,
    unmask_new: Unmask | None = None,
) -> AttackReport:
    """Coefficient-subtraction on consecutive filter epochs.

    Needs both epochs monic with the new degree exactly one higher.  The
    recovered root is (old subleading) - (new subleading) mod p, i.e.
    the growth of the root sum; the key candidate is the new filter
    evaluated there (unmasked when a hint is supplied).
    """
    if old.p != new.p:
        raise ModulusMismatch(f"epochs use different moduli: {old.p} vs {new.p}")
    if new.degree != old.degree + 1 or old.degree < 1:
        raise DegreeMismatch(
            f"need monic epochs with degrees (n, n+1), n >= 1; "
            f"got {old.degree} and {new.degree}"
        )
    if not (old.is_monic and new.is_monic):
        raise DegreeMismatch("both epochs must be monic")
    sub_old = old.coeffs[old.degree - 1]
    sub_new = new.coeffs[new.degree - 1]
    root = (sub_old - sub_new) % old.p
    value = poly_eval(new, root)
    key = unmask_new(value) if unmask_new else value
    return AttackReport(
        attack="tp",
        scheme=scheme,
        target=target,
        candidate_roots=(root,),
        candidate_keys=(key,),
        transcript={
            "old_subleading": sub_old,
            "new_subleading": sub_new,
            "old_coeffs": old.coeffs,
            "new_coeffs": new.coeffs,
        },
    )


def judge(report: AttackReport, true_key: int) -> AttackReport:
    """Harness-side verdict: did any candidate hit the real key?

    Lives apart from the attack functions on purpose; they never see
    secret material.
    """
    return replace(report, success=true_key in report.candidate_keys)
