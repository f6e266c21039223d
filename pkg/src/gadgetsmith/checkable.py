"""Simply checkable gadgets: one designated traversal certifies full health.

A gadget is simply checkable for a check entry/exit pair when (1) the only
non-trivial way to come out of the check exit, or to land in the checked
state, is the designated check traversal, and (2) once broken, always
broken. Post-selection then throws the broken states away: any agent that
later completes the check certifies its gadget never was in one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .model import STEP, Gadget, GadgetTransition


@dataclass(frozen=True)
class CheckSpec:
    check_in: str = "I"
    check_out: str = "O"
    checked: str = "checked"
    allow_push: bool = False


def _validate(gadget: Gadget, spec: CheckSpec) -> None:
    if spec.checked not in gadget.states:
        raise ValueError(f"checked state {spec.checked!r} is not a state of the gadget")
    if spec.check_in not in gadget.locations:
        raise ValueError(f"check entry {spec.check_in!r} is not a location of the gadget")
    if spec.check_out not in gadget.locations:
        raise ValueError(f"check exit {spec.check_out!r} is not a location of the gadget")


def is_check_traversal(t: GadgetTransition, spec: CheckSpec) -> bool:
    if t.entry_loc != spec.check_in or t.exit_loc != spec.check_out:
        return False
    if t.to_state != spec.checked:
        return False
    if not spec.allow_push and not (t.entry_state is STEP and t.exit_state is STEP):
        return False
    return True


def check_sources(gadget: Gadget, spec: CheckSpec) -> list[str]:
    """States from which the designated check traversal is available."""
    _validate(gadget, spec)
    out = []
    for q in gadget.states:
        if any(
            t.from_state == q and is_check_traversal(t, spec)
            for t in gadget.transitions
        ):
            out.append(q)
    return out


def infer_broken(gadget: Gadget, spec: CheckSpec) -> frozenset:
    """States that can never reach a check again; start and checked are exempt."""
    _validate(gadget, spec)
    sources = set(check_sources(gadget, spec))
    # walk the transition graph backwards from the check sources
    rev: dict[str, set[str]] = {q: set() for q in gadget.states}
    for t in gadget.transitions:
        rev[t.to_state].add(t.from_state)
    alive = set(sources)
    queue = deque(sources)
    while queue:
        q = queue.popleft()
        for p in rev[q]:
            if p not in alive:
                alive.add(p)
                queue.append(p)
    return frozenset(
        q
        for q in gadget.states
        if q not in alive and q != gadget.start_state and q != spec.checked
    )


def violations(
    gadget: Gadget, spec: CheckSpec, broken: Iterable[str] | None = None
) -> list[str]:
    """Why the gadget is not simply checkable; empty means it is."""
    _validate(gadget, spec)
    broken_set = infer_broken(gadget, spec) if broken is None else frozenset(broken)
    out: list[str] = []
    for q in broken_set:
        if q not in gadget.states:
            out.append(f"broken state {q!r} is not a state of the gadget")
    for t in gadget.transitions:
        if t.is_trivial():
            continue
        if (t.exit_loc == spec.check_out or t.to_state == spec.checked) and not is_check_traversal(t, spec):
            out.append(f"non-check traversal reaches the check exit or checked state: {t}")
    for t in gadget.transitions:
        if t.from_state in broken_set and t.to_state not in broken_set:
            out.append(f"transition escapes the broken set: {t}")
    return out


def post_select(
    gadget: Gadget, spec: CheckSpec, broken: Iterable[str] | None = None
) -> Gadget:
    """Delete the broken states, keep what the start can still reach.

    The start and checked states survive unconditionally; everything keeps
    its original name and order.
    """
    _validate(gadget, spec)
    broken_set = infer_broken(gadget, spec) if broken is None else frozenset(broken)
    if gadget.start_state in broken_set:
        raise ValueError("the start state cannot be declared broken")
    if spec.checked in broken_set:
        raise ValueError("the checked state cannot be declared broken")
    kept_trans = [
        t
        for t in gadget.transitions
        if t.from_state not in broken_set and t.to_state not in broken_set
    ]
    reach = {gadget.start_state}
    queue = deque([gadget.start_state])
    while queue:
        q = queue.popleft()
        for t in kept_trans:
            if t.from_state == q and t.to_state not in reach:
                reach.add(t.to_state)
                queue.append(t.to_state)
    keep = reach | {gadget.start_state, spec.checked}
    states = tuple(q for q in gadget.states if q in keep and q not in broken_set)
    transitions = tuple(
        t for t in kept_trans if t.from_state in keep and t.to_state in keep
    )
    return Gadget(states, gadget.start_state, gadget.locations, transitions)
