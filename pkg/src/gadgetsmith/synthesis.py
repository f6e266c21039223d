"""Synthesis: distill a finite gadget out of a low-level construction.

The pipeline: explore the construction's configuration graph seed by seed,
collecting one automaton transition per boundary-to-boundary traversal, then
determinize and minimize to get the canonical gadget. Verification compares
two behaviors as languages, never as state graphs.
"""

from __future__ import annotations

import concurrent.futures
import threading
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .automata import DFA, NFA, determinize, equivalent, full_alphabet, minimize
from .model import (
    Construction,
    Gadget,
    GadgetConstruction,
    GadgetTransition,
    TraversalSymbol,
    symbol_sorted,
)

DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        super().__init__(
            f"configuration budget exceeded: more than {budget} distinct configurations"
        )
        self.budget = budget


class _ConfigTracker:
    """Global deduplicated set of every configuration materialized.

    The budget verdict depends only on the final closure size, which is a
    schedule-independent set union, so it cannot flip between runs or worker
    counts. CPython set.add is atomic enough for the threaded path.
    """

    def __init__(self, budget: int):
        self.configs: set = set()
        self.budget = budget

    def add(self, config: Hashable) -> None:
        self.configs.add(config)
        if len(self.configs) > self.budget:
            raise BudgetExceeded(self.budget)

    @property
    def count(self) -> int:
        return len(self.configs)


def _explore_seed(
    construction: Construction, seed: Hashable, tracker: _ConfigTracker
) -> tuple[Hashable, list[tuple[TraversalSymbol, Hashable, bool]]]:
    """One traversal segment search: seed to every next observable configuration.

    Walks only through unobservable configurations; an observable successor
    ends the segment there (it becomes a seed of its own later). The seed
    itself reappearing as a successor is an endpoint too, which is where
    trivial symbols come from.
    """
    entry_obs = construction.observation(seed)
    if entry_obs is None:
        raise ValueError(f"seed configuration is not observable: {seed!r}")
    src_state = construction.state_of(seed)
    endpoints: list[tuple[TraversalSymbol, Hashable, bool]] = []
    recorded: set = set()
    visited: set = {seed}
    queue: deque = deque([seed])
    while queue:
        config = queue.popleft()
        for nxt in construction.successors(config):
            tracker.add(nxt)
            obs = construction.observation(nxt)
            if obs is not None:
                if nxt not in recorded:
                    recorded.add(nxt)
                    sym = TraversalSymbol(entry_obs[0], entry_obs[1], obs[0], obs[1])
                    endpoints.append((sym, nxt, construction.can_depart(nxt)))
                continue
            if nxt not in visited:
                visited.add(nxt)
                queue.append(nxt)
    return src_state, endpoints


def construction_to_nfa(
    construction: Construction,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> tuple[NFA, int]:
    """Explore the construction and return (behavior NFA, configurations seen).

    Automaton states are construction states (the `state_of` projection),
    while every dedup set here is keyed on whole configurations: two
    configurations sharing a projection still get explored separately, they
    just pool their outgoing transitions on the same automaton state.

    Seeds are (a) the re-entry configurations of every discovered state and
    (b) every observable endpoint reached, since an agent may continue from
    the exact configuration it stopped in. Workers split the seed list; the
    result is the same closure for any worker count.
    """
    alphabet = full_alphabet(construction.ports)
    tracker = _ConfigTracker(budget)
    init = construction.initial_state
    nfa_states: set = {init}
    moves: dict[tuple[Hashable, TraversalSymbol], set] = defaultdict(set)
    seeded: set = set()
    entered_states: set = set()
    pending: list = []

    def seed_state(q: Hashable) -> None:
        for c in construction.entry_configs(q):
            tracker.add(c)
            if c not in seeded:
                seeded.add(c)
                pending.append(c)

    entered_states.add(init)
    seed_state(init)

    pool = (
        concurrent.futures.ThreadPoolExecutor(max_workers=threads)
        if threads > 1
        else None
    )
    try:
        while pending:
            batch, pending = pending, []
            if pool is None:
                results = [_explore_seed(construction, s, tracker) for s in batch]
            else:
                results = list(
                    pool.map(lambda s: _explore_seed(construction, s, tracker), batch)
                )
            for src_state, endpoints in results:
                nfa_states.add(src_state)
                for sym, end_cfg, can_depart in endpoints:
                    q2 = construction.state_of(end_cfg)
                    nfa_states.add(q2)
                    if can_depart:
                        moves[(src_state, sym)].add(q2)
                    if q2 not in entered_states:
                        entered_states.add(q2)
                        seed_state(q2)
                    if end_cfg not in seeded:
                        seeded.add(end_cfg)
                        pending.append(end_cfg)
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    nfa = NFA(
        alphabet,
        frozenset(nfa_states),
        frozenset({init}),
        {k: frozenset(v) for k, v in moves.items()},
    )
    return nfa, tracker.count


def gadget_to_nfa(gadget: Gadget) -> NFA:
    alphabet = full_alphabet(gadget.locations)
    moves: dict[tuple[str, TraversalSymbol], set] = defaultdict(set)
    for t in gadget.transitions:
        moves[(t.from_state, t.symbol)].add(t.to_state)
    return NFA(
        alphabet,
        frozenset(gadget.states),
        frozenset({gadget.start_state}),
        {k: frozenset(v) for k, v in moves.items()},
    )


def nfa_to_gadget(nfa: NFA, ports: Iterable[str] | None = None) -> Gadget:
    """Canonical gadget for a behavior: determinize, minimize, rename S0..Sn."""
    dfa = minimize(determinize(nfa))
    if ports is None:
        locs = sorted({l for s in nfa.alphabet for l in (s.entry_loc, s.exit_loc)})
    else:
        locs = sorted(set(ports))
    transitions: list[GadgetTransition] = []
    order = symbol_sorted(dfa.alphabet)
    for q in dfa.states:
        for sym in order:
            q2 = dfa.moves.get((q, sym))
            if q2 is not None:
                transitions.append(
                    GadgetTransition(
                        q, sym.entry_loc, sym.entry_state, q2, sym.exit_loc, sym.exit_state
                    )
                )
    return Gadget(tuple(dfa.states), "S0", tuple(locs), tuple(transitions))


@dataclass
class SynthesisResult:
    gadget: Gadget
    configurations: int

    @property
    def states(self) -> int:
        return len(self.gadget.states)

    @property
    def transitions(self) -> int:
        return len(self.gadget.transitions)


def synthesize(
    construction: Construction,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> SynthesisResult:
    nfa, count = construction_to_nfa(construction, budget=budget, threads=threads)
    gadget = nfa_to_gadget(nfa, ports=construction.ports)
    return SynthesisResult(gadget, count)


@dataclass
class VerifyResult:
    """Outcome of a behavioral comparison between two port-labeled behaviors."""

    equal: bool
    port_mismatch: bool = False
    witness: list[TraversalSymbol] | None = None
    side: str | None = None  # which side accepts the witness: "left" | "right"


def compare_behaviors(
    left_ports: Sequence[str],
    left: NFA,
    right_ports: Sequence[str],
    right: NFA,
) -> VerifyResult:
    """Equal port sets and equal languages; anything else gets a witness."""
    if tuple(sorted(set(left_ports))) != tuple(sorted(set(right_ports))):
        return VerifyResult(False, port_mismatch=True)
    eq, witness, side = equivalent(left, right)
    if eq:
        return VerifyResult(True)
    return VerifyResult(False, witness=witness, side=side)


def verify_gadgets(left: Gadget, right: Gadget) -> VerifyResult:
    return compare_behaviors(
        sorted(left.locations),
        gadget_to_nfa(left),
        sorted(right.locations),
        gadget_to_nfa(right),
    )


def roundtrip(gadget: Gadget, budget: int = DEFAULT_BUDGET, threads: int = 1) -> SynthesisResult:
    """Re-synthesize a gadget from its own behavior, via the construction wrapper."""
    return synthesize(GadgetConstruction(gadget), budget=budget, threads=threads)
