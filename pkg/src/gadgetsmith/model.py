"""Core gadget model: states, locations, traversal symbols, traces.

A gadget is a finite-state device an agent moves through. Each transition
consumes an entry at one location and produces an exit at another, possibly
flipping the gadget's internal state. The agent itself carries a two-valued
mode: plain stepping, or pushing a block. Everything downstream (automata,
synthesis, composition) speaks the traversal-symbol vocabulary defined here.
"""

from __future__ import annotations

import enum
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, NamedTuple, Sequence


class AgentState(enum.Enum):
    """Mode of the agent at a boundary crossing: stepping, or pushing a block."""

    STEP = "step"
    PUSH = "push"

    @property
    def rank(self) -> int:
        return 0 if self is AgentState.STEP else 1

    def __lt__(self, other: "AgentState") -> bool:
        if not isinstance(other, AgentState):
            return NotImplemented
        return self.rank < other.rank

    def __str__(self) -> str:
        return self.value


STEP = AgentState.STEP
PUSH = AgentState.PUSH


def parse_agent_state(text: str) -> AgentState:
    try:
        return AgentState(text)
    except ValueError:
        raise ValueError(f"unknown agent state {text!r}, expected 'step' or 'push'")


class TraversalSymbol(NamedTuple):
    """One boundary-to-boundary pass: entered here in this mode, left there in that mode."""

    entry_loc: str
    entry_state: AgentState
    exit_loc: str
    exit_state: AgentState

    @property
    def entry(self) -> tuple[str, AgentState]:
        return (self.entry_loc, self.entry_state)

    @property
    def exit(self) -> tuple[str, AgentState]:
        return (self.exit_loc, self.exit_state)

    def is_trivial(self) -> bool:
        return self.entry_loc == self.exit_loc and self.entry_state == self.exit_state

    def sort_key(self) -> tuple:
        return (self.entry_loc, self.entry_state.rank, self.exit_loc, self.exit_state.rank)

    def __str__(self) -> str:
        return (
            f"({self.entry_loc},{self.entry_state})"
            f"->({self.exit_loc},{self.exit_state})"
        )


def symbol_sorted(symbols: Iterable[TraversalSymbol]) -> list[TraversalSymbol]:
    """Canonical total order used for every tie-break in the package."""
    return sorted(symbols, key=TraversalSymbol.sort_key)


class GadgetTransition(NamedTuple):
    from_state: str
    entry_loc: str
    entry_state: AgentState
    to_state: str
    exit_loc: str
    exit_state: AgentState

    @property
    def symbol(self) -> TraversalSymbol:
        return TraversalSymbol(self.entry_loc, self.entry_state, self.exit_loc, self.exit_state)

    def is_trivial(self) -> bool:
        return self.from_state == self.to_state and self.symbol.is_trivial()

    def __str__(self) -> str:
        return (
            f"{self.from_state} ({self.entry_loc},{self.entry_state})"
            f" -> {self.to_state} ({self.exit_loc},{self.exit_state})"
        )


@dataclass(frozen=True)
class Gadget:
    """Finite-state gadget: states, a start state, boundary locations, transitions."""

    states: tuple[str, ...]
    start_state: str
    locations: tuple[str, ...]
    transitions: tuple[GadgetTransition, ...]

    def validate(self) -> None:
        seen_states = set()
        for q in self.states:
            if q in seen_states:
                raise ValueError(f"duplicate state {q!r}")
            seen_states.add(q)
        seen_locs = set()
        for loc in self.locations:
            if loc in seen_locs:
                raise ValueError(f"duplicate location {loc!r}")
            seen_locs.add(loc)
        if self.start_state not in seen_states:
            raise ValueError(f"start state {self.start_state!r} not among states")
        seen_trans = set()
        for t in self.transitions:
            if t.from_state not in seen_states:
                raise ValueError(f"transition from unknown state {t.from_state!r}")
            if t.to_state not in seen_states:
                raise ValueError(f"transition to unknown state {t.to_state!r}")
            if t.entry_loc not in seen_locs:
                raise ValueError(f"transition enters unknown location {t.entry_loc!r}")
            if t.exit_loc not in seen_locs:
                raise ValueError(f"transition exits unknown location {t.exit_loc!r}")
            if t in seen_trans:
                raise ValueError(f"duplicate transition {t}")
            seen_trans.add(t)

    def moves(self, state: str, entry_loc: str, entry_state: AgentState) -> list[GadgetTransition]:
        """All transitions enabled from `state` for an agent arriving at (loc, mode)."""
        return [
            t
            for t in self.transitions
            if t.from_state == state
            and t.entry_loc == entry_loc
            and t.entry_state == entry_state
        ]

    def nontrivial_transitions(self) -> tuple[GadgetTransition, ...]:
        return tuple(t for t in self.transitions if not t.is_trivial())


# ---------------------------------------------------------------------------
# Constructions: the low-level side of the synthesis pipeline.


@dataclass(frozen=True)
class PortSpec:
    """What the environment may do at a boundary port."""

    allow_block_in: bool = False
    allow_block_out: bool = False
    axis: str | None = None  # "ns" | "ew" | None when direction is meaningless


class Construction(ABC):
    """A low-level system with opaque configurations and a pure successor rule.

    Configurations must be hashable. `state_of` projects a configuration to
    the hashable "construction state" used as an NFA state by synthesis; two
    configurations with equal projections are merged there, while the visited
    set is still keyed on whole configurations.
    """

    @property
    @abstractmethod
    def ports(self) -> tuple[str, ...]: ...

    @property
    def port_caps(self) -> dict[str, PortSpec]:
        return {p: PortSpec() for p in self.ports}

    @property
    @abstractmethod
    def initial_state(self) -> Hashable: ...

    @abstractmethod
    def entry_configs(self, state: Hashable) -> Iterable[Hashable]:
        """Configurations where an agent may appear from outside, given the state."""

    @abstractmethod
    def successors(self, config: Hashable) -> Iterable[Hashable]: ...

    @abstractmethod
    def observation(self, config: Hashable) -> tuple[str, AgentState] | None:
        """(port, mode) when the agent sits at a boundary, else None."""

    @abstractmethod
    def state_of(self, config: Hashable) -> Hashable: ...

    def can_depart(self, config: Hashable) -> bool:
        """Whether an observable configuration may hand control to the outside."""
        return True


class GadgetConfig(NamedTuple):
    """A gadget-as-construction configuration: agent poised at a boundary."""

    state: str
    loc: str
    astate: AgentState


class GadgetConstruction(Construction):
    """Wraps a gadget so it can be synthesized or composed like any construction.

    Every configuration is observable: the agent only ever exists at the
    boundary, mid-transition time is not modeled.
    """

    def __init__(self, gadget: Gadget, caps: dict[str, PortSpec] | None = None):
        gadget.validate()
        self.gadget = gadget
        self._caps = dict(caps) if caps else {p: PortSpec() for p in gadget.locations}

    @property
    def ports(self) -> tuple[str, ...]:
        return tuple(sorted(self.gadget.locations))

    @property
    def port_caps(self) -> dict[str, PortSpec]:
        return dict(self._caps)

    @property
    def initial_state(self) -> str:
        return self.gadget.start_state

    def entry_configs(self, state: str) -> Iterator[GadgetConfig]:
        for loc in self.ports:
            for astate in (STEP, PUSH):
                yield GadgetConfig(state, loc, astate)

    def successors(self, config: GadgetConfig) -> Iterator[GadgetConfig]:
        for t in self.gadget.moves(config.state, config.loc, config.astate):
            yield GadgetConfig(t.to_state, t.exit_loc, t.exit_state)

    def observation(self, config: GadgetConfig) -> tuple[str, AgentState]:
        return (config.loc, config.astate)

    def state_of(self, config: GadgetConfig) -> str:
        return config.state


# ---------------------------------------------------------------------------
# Traces and the observable projection.


class TraceError(ValueError):
    """A trace step that matches neither a gadget transition nor an outside move."""


@dataclass
class Trace:
    """Sequence of (state, loc, mode) snapshots at observable instants.

    Consecutive snapshots must be joined either by a transition of the gadget
    or by an outside move (the gadget state unchanged while the agent wanders
    beyond the boundary).
    """

    gadget: Gadget
    snapshots: list[tuple[str, str, AgentState]] = field(default_factory=list)

    def extend(self, state: str, loc: str, astate: AgentState) -> None:
        self.snapshots.append((state, loc, astate))


def gadget_step(
    gadget: Gadget, state: str, symbol: TraversalSymbol
) -> list[str]:
    """States reachable by firing `symbol` from `state`. Unknown state is an error."""
    if state not in gadget.states:
        raise ValueError(f"unknown state {state!r}")
    return [
        t.to_state
        for t in gadget.transitions
        if t.from_state == state and t.symbol == symbol
    ]


def observable_sequence(trace: Trace) -> list[TraversalSymbol | None]:
    """Project a trace onto traversal symbols, one slot per consecutive pair.

    A pair joined by a gadget transition yields that symbol; a pair that is
    only an outside move yields None. A pair that is both (same state, same
    port and mode, and such a self-loop transition exists) counts as the
    symbol: staying inside is the reading that produces language entries.
    """
    out: list[TraversalSymbol | None] = []
    snaps = trace.snapshots
    for i in range(len(snaps) - 1):
        (q1, l1, s1), (q2, l2, s2) = snaps[i], snaps[i + 1]
        sym = TraversalSymbol(l1, s1, l2, s2)
        is_transition = any(
            t.from_state == q1 and t.to_state == q2 and t.symbol == sym
            for t in trace.gadget.transitions
        )
        is_outside = q1 == q2
        if is_transition:
            out.append(sym)
        elif is_outside:
            out.append(None)
        else:
            raise TraceError(
                f"step {i}: {q1} ({l1},{s1}) -> {q2} ({l2},{s2}) is neither a "
                f"transition of the gadget nor an outside move"
            )
    return out


# ---------------------------------------------------------------------------
# Text format.


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_TRANSITION_RE = re.compile(
    r"^(\S+)\s+\((\S+?),(step|push)\)\s*->\s*(\S+)\s+\((\S+?),(step|push)\)\s*$"
)


def parse_gadget(text: str, source: str = "<string>") -> Gadget:
    """Parse the line-oriented gadget format.

    Header lines `states:`, `start:`, `locations:` in any order before the
    transitions; `#` starts a full-line comment; blank lines ignored.
    """
    states: tuple[str, ...] | None = None
    start: str | None = None
    locations: tuple[str, ...] | None = None
    transitions: list[GadgetTransition] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("states:"):
            states = tuple(line[len("states:"):].split())
            continue
        if line.startswith("start:"):
            parts = line[len("start:"):].split()
            if len(parts) != 1:
                raise ParseError("start: expects exactly one state", lineno)
            start = parts[0]
            continue
        if line.startswith("locations:"):
            locations = tuple(line[len("locations:"):].split())
            continue
        m = _TRANSITION_RE.match(line)
        if not m:
            raise ParseError(f"cannot parse line {line!r}", lineno)
        q1, l1, s1, q2, l2, s2 = m.groups()
        transitions.append(
            GadgetTransition(q1, l1, AgentState(s1), q2, l2, AgentState(s2))
        )
    if states is None:
        raise ParseError("missing states: header", 1)
    if start is None:
        raise ParseError("missing start: header", 1)
    if locations is None:
        raise ParseError("missing locations: header", 1)
    g = Gadget(states, start, locations, tuple(transitions))
    try:
        g.validate()
    except ValueError as e:
        raise ParseError(str(e), 1)
    return g


def format_gadget(g: Gadget, header: str | None = None) -> str:
    lines = []
    if header:
        for h in header.splitlines():
            lines.append(f"# {h}" if h else "#")
    lines.append("states: " + " ".join(g.states))
    lines.append("start: " + g.start_state)
    lines.append("locations: " + " ".join(g.locations))
    for t in g.transitions:
        lines.append(str(t))
    return "\n".join(lines) + "\n"


def load_gadget(path: str) -> Gadget:
    with open(path, "r", encoding="utf-8") as f:
        return parse_gadget(f.read(), source=path)


def save_gadget(path: str, g: Gadget, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_gadget(g, header))
