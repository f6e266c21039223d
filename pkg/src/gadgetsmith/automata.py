"""Finite automata over traversal symbols.

Gadget behavior is a prefix-closed language of traversal-symbol words. The
automata here make that operational: a sparse NFA whose every listed state is
accepting, with one implicit trap for everything that falls off. Missing
moves go to the trap; the trap never appears in `states`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .model import TraversalSymbol, symbol_sorted


@dataclass(frozen=True)
class NFA:
    """Nondeterministic automaton; all listed states accept, the trap is implicit."""

    alphabet: tuple[TraversalSymbol, ...]
    states: frozenset
    starts: frozenset
    moves: Mapping[tuple[Hashable, TraversalSymbol], frozenset]

    def post(self, subset: frozenset, symbol: TraversalSymbol) -> frozenset:
        out: set = set()
        for q in subset:
            out |= self.moves.get((q, symbol), frozenset())
        return frozenset(out)

    def validate(self) -> None:
        if not self.starts <= self.states:
            raise ValueError("start states must be listed states")
        alpha = set(self.alphabet)
        for (q, sym), targets in self.moves.items():
            if q not in self.states:
                raise ValueError(f"move from unknown state {q!r}")
            if sym not in alpha:
                raise ValueError(f"move on symbol outside alphabet: {sym}")
            if not targets <= self.states:
                raise ValueError(f"move to unknown state from {q!r} on {sym}")


@dataclass(frozen=True)
class DFA:
    """Deterministic automaton; same accept-everything-listed convention."""

    alphabet: tuple[TraversalSymbol, ...]
    states: tuple
    start: Hashable
    moves: Mapping[tuple[Hashable, TraversalSymbol], Hashable]

    def step(self, state: Hashable, symbol: TraversalSymbol) -> Hashable | None:
        return self.moves.get((state, symbol))


def accepts(nfa: NFA, word: Sequence[TraversalSymbol]) -> bool:
    """Subset simulation. The empty word is accepted from any nonempty start."""
    current = nfa.starts
    if not current:
        return False
    for sym in word:
        current = nfa.post(current, sym)
        if not current:
            return False
    return True


def determinize(nfa: NFA) -> DFA:
    """Subset construction over reachable nonempty subsets.

    The empty subset is the trap and is left implicit, matching the sparse
    move convention.
    """
    if not nfa.starts:
        raise ValueError("cannot determinize an automaton with no start states")
    start = frozenset(nfa.starts)
    order = list(nfa.alphabet)
    seen: dict[frozenset, None] = {start: None}
    queue: deque[frozenset] = deque([start])
    moves: dict[tuple[frozenset, TraversalSymbol], frozenset] = {}
    while queue:
        subset = queue.popleft()
        for sym in order:
            nxt = nfa.post(subset, sym)
            if not nxt:
                continue
            moves[(subset, sym)] = nxt
            if nxt not in seen:
                seen[nxt] = None
                queue.append(nxt)
    return DFA(nfa.alphabet, tuple(seen), start, moves)


def _reachable(dfa: DFA) -> list:
    seen: dict = {dfa.start: None}
    queue = deque([dfa.start])
    while queue:
        q = queue.popleft()
        for sym in dfa.alphabet:
            nxt = dfa.moves.get((q, sym))
            if nxt is not None and nxt not in seen:
                seen[nxt] = None
                queue.append(nxt)
    return list(seen)


def minimize(dfa: DFA) -> DFA:
    """Moore partition refinement, then a canonical BFS renaming to S0..Sn.

    Every live state accepts, so the initial partition is one live block
    against the implicit trap; states split only on where their moves land.
    """
    live = _reachable(dfa)
    block: dict = {q: 0 for q in live}
    nblocks = 1
    while True:
        signatures: dict = {}
        for q in live:
            sig = tuple(
                block.get(dfa.moves.get((q, sym)), -1) for sym in dfa.alphabet
            )
            signatures[q] = (block[q], sig)
        relabel: dict[tuple, int] = {}
        for q in live:
            relabel.setdefault(signatures[q], len(relabel))
        new_block = {q: relabel[signatures[q]] for q in live}
        if len(relabel) == nblocks:
            block = new_block
            break
        block, nblocks = new_block, len(relabel)

    # canonical names by BFS from the start block, symbols in canonical order
    rep: dict[int, Hashable] = {}
    for q in live:
        rep.setdefault(block[q], q)
    names: dict[int, str] = {block[dfa.start]: "S0"}
    queue = deque([block[dfa.start]])
    ordered = [block[dfa.start]]
    while queue:
        b = queue.popleft()
        for sym in dfa.alphabet:
            nxt = dfa.moves.get((rep[b], sym))
            if nxt is None:
                continue
            nb = block[nxt]
            if nb not in names:
                names[nb] = f"S{len(names)}"
                ordered.append(nb)
                queue.append(nb)
    moves: dict[tuple[str, TraversalSymbol], str] = {}
    for b in ordered:
        for sym in dfa.alphabet:
            nxt = dfa.moves.get((rep[b], sym))
            if nxt is not None:
                moves[(names[b], sym)] = names[block[nxt]]
    return DFA(dfa.alphabet, tuple(names[b] for b in ordered), "S0", moves)


def equivalent(
    left: NFA, right: NFA
) -> tuple[bool, list[TraversalSymbol] | None, str | None]:
    """Language equality via product subset BFS.

    Returns (True, None, None) when the languages match. Otherwise returns
    (False, witness, side): the shortest word in exactly one language, least
    in the canonical symbol order among shortest, and which side accepts it.
    """
    order = symbol_sorted(set(left.alphabet) | set(right.alphabet))
    la, ra = frozenset(left.starts), frozenset(right.starts)
    if bool(la) != bool(ra):
        return (False, [], "left" if la else "right")
    if not la:
        return (True, None, None)
    seen = {(la, ra)}
    queue: deque[tuple[frozenset, frozenset, tuple]] = deque([(la, ra, ())])
    while queue:
        sa, sb, path = queue.popleft()
        for sym in order:
            na, nb = left.post(sa, sym), right.post(sb, sym)
            if bool(na) != bool(nb):
                return (False, list(path) + [sym], "left" if na else "right")
            if not na:
                continue
            key = (na, nb)
            if key not in seen:
                seen.add(key)
                queue.append((na, nb, path + (sym,)))
    return (True, None, None)


def nfa_states_count(nfa: NFA) -> int:
    return len(nfa.states)


def full_alphabet(locations: Iterable[str]) -> tuple[TraversalSymbol, ...]:
    """Every traversal symbol over the given boundary locations, canonical order."""
    from .model import AgentState

    locs = sorted(set(locations))
    syms = [
        TraversalSymbol(l1, s1, l2, s2)
        for l1 in locs
        for s1 in (AgentState.STEP, AgentState.PUSH)
        for l2 in locs
        for s2 in (AgentState.STEP, AgentState.PUSH)
    ]
    return tuple(symbol_sorted(syms))
