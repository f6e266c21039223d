"""Push-1 grids: an agent that walks on floor cells and pushes single blocks.

Rules: the agent steps onto an empty floor cell, or pushes exactly one block
one cell forward when the cell beyond it is empty floor. Two blocks in a row
never move, which is what makes 2x2 block squares permanently immobile.

Ports frame the boundary. Each port has a door cell (inside, floor) and a
virtual exterior cell just beyond it (never floor). Standing on the door cell
is the step-mode boundary observation. A block crossing the door line, in
either direction, is the push-mode observation, carried by dedicated entry
and exit framings so the block ledger inside stays exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .model import (
    STEP,
    PUSH,
    AgentState,
    Construction,
    ParseError,
    PortSpec,
)

Cell = tuple[int, int]

NORTH, SOUTH, WEST, EAST = (0, -1), (0, 1), (-1, 0), (1, 0)
# fixed expansion order everywhere, part of the determinism contract
DIR_ORDER: tuple[Cell, ...] = (NORTH, SOUTH, WEST, EAST)
DIR_NAMES = {"north": NORTH, "south": SOUTH, "west": WEST, "east": EAST}
DIR_AXIS = {NORTH: "ns", SOUTH: "ns", WEST: "ew", EAST: "ew"}
STEP_LETTER = {NORTH: "u", SOUTH: "d", WEST: "l", EAST: "r"}
PUSH_LETTER = {NORTH: "U", SOUTH: "D", WEST: "L", EAST: "R"}


def _add(a: Cell, b: Cell) -> Cell:
    return (a[0] + b[0], a[1] + b[1])


def _neg(d: Cell) -> Cell:
    return (-d[0], -d[1])


@dataclass(frozen=True)
class GridPort:
    name: str
    door: Cell
    out: Cell  # unit vector from the door cell toward the exterior
    spec: PortSpec


@dataclass(frozen=True)
class Push1Grid:
    floors: frozenset
    ports: dict  # name -> GridPort
    initial_blocks: frozenset
    start: Cell | None = None
    goal: Cell | None = None

    def door_port(self, cell: Cell) -> str | None:
        for name, p in self.ports.items():
            if p.door == cell:
                return name
        return None


# ---------------------------------------------------------------------------
# Parsing.

_CELL_WALL = {"#", " "}


def parse_grid(text: str, source: str = "<string>") -> Push1Grid:
    """Parse the grid format: port declarations, a blank line, then rows.

    Rows keep their exact spacing: space and '#' are wall, '.' floor, 'b' a
    block on floor, an uppercase letter a door cell, '@' the agent start,
    'G' the goal. Short rows are padded with wall.
    """
    lines = text.splitlines()
    i = 0
    while i < len(lines) and not lines[i].strip():
        i += 1
    decls: dict[str, tuple[str, bool, bool, int]] = {}
    while i < len(lines) and lines[i].split() and lines[i].split()[0] == "port":
        lineno = i + 1
        tokens = lines[i].split()
        if len(tokens) < 3:
            raise ParseError("port line needs a name and out=<direction>", lineno)
        name = tokens[1]
        if name in decls:
            raise ParseError(f"port {name!r} declared twice", lineno)
        attrs: dict[str, str] = {}
        for tok in tokens[2:]:
            if "=" not in tok:
                col = lines[i].find(tok) + 1
                raise ParseError(f"expected key=value, got {tok!r}", lineno, col)
            k, v = tok.split("=", 1)
            if k in attrs:
                raise ParseError(f"duplicate attribute {k!r}", lineno)
            attrs[k] = v
        out = attrs.pop("out", None)
        if out is None:
            raise ParseError(f"port {name!r} is missing out=<direction>", lineno)
        if out not in DIR_NAMES:
            raise ParseError(f"unknown direction {out!r}", lineno)
        flags = {}
        for key in ("block_in", "block_out"):
            val = attrs.pop(key, "no")
            if val not in ("yes", "no"):
                raise ParseError(f"{key} must be yes or no, got {val!r}", lineno)
            flags[key] = val == "yes"
        if attrs:
            bad = sorted(attrs)[0]
            raise ParseError(f"unknown attribute {bad!r}", lineno)
        decls[name] = (out, flags["block_in"], flags["block_out"], lineno)
        i += 1
    if decls:
        if i >= len(lines) or lines[i].strip():
            raise ParseError("expected a blank line after port declarations", i + 1)
        i += 1
    body_start = i
    rows = lines[i:]
    while rows and not rows[-1].strip():
        rows.pop()
    if not rows:
        raise ParseError("grid has no rows", max(1, len(lines)))

    floors: set[Cell] = set()
    blocks: set[Cell] = set()
    doors: dict[str, Cell] = {}
    start: Cell | None = None
    goal: Cell | None = None
    for y, row in enumerate(rows):
        lineno = body_start + y + 1
        for x, ch in enumerate(row):
            cell = (x, y)
            if ch in _CELL_WALL:
                continue
            if ch == ".":
                floors.add(cell)
            elif ch == "b":
                floors.add(cell)
                blocks.add(cell)
            elif ch == "@":
                if start is not None:
                    raise ParseError("more than one '@' start cell", lineno, x + 1)
                floors.add(cell)
                start = cell
            elif ch == "G":
                if goal is not None:
                    raise ParseError("more than one 'G' goal cell", lineno, x + 1)
                floors.add(cell)
                goal = cell
            elif ch.isupper() and ch.isalpha():
                if ch in doors:
                    raise ParseError(f"port {ch!r} appears twice in the grid", lineno, x + 1)
                if ch not in decls:
                    raise ParseError(f"port {ch!r} not declared in the header", lineno, x + 1)
                floors.add(cell)
                doors[ch] = cell
            else:
                raise ParseError(f"unknown cell character {ch!r}", lineno, x + 1)
    for name, (out, _bi, _bo, lineno) in decls.items():
        if name not in doors:
            raise ParseError(f"declared port {name!r} does not appear in the grid", lineno)
    ports: dict[str, GridPort] = {}
    for name, cell in doors.items():
        out_name, block_in, block_out, lineno = decls[name]
        out_vec = DIR_NAMES[out_name]
        exterior = _add(cell, out_vec)
        if exterior in floors:
            raise ParseError(
                f"port {name!r}: the cell just outside the door (toward {out_name}) must not be floor",
                lineno,
            )
        ports[name] = GridPort(
            name,
            cell,
            out_vec,
            PortSpec(block_in, block_out, DIR_AXIS[out_vec]),
        )
    return Push1Grid(frozenset(floors), ports, frozenset(blocks), start, goal)


def load_grid(path: str) -> Push1Grid:
    with open(path, "r", encoding="utf-8") as f:
        return parse_grid(f.read(), source=path)


# ---------------------------------------------------------------------------
# Moves. One shared rule set serves the boundary semantics and the solver.


class Move(NamedTuple):
    kind: str  # "step" | "push" | "exit-step" | "eject" | "enter-push"
    direction: Cell


class GridConfig(NamedTuple):
    """Framed configuration: where the agent is relative to the boundary.

    kind "in": agent on the floor cell `at`, observable when that is a door.
    kind "enter": agent at the exterior of port `at`, a fresh block overlaid
    on the door cell; its only move pushes that block inward.
    kind "exit": agent on the door cell of port `at`, the block it just
    pushed out absorbed by the exterior.
    """

    kind: str  # "in" | "enter" | "exit"
    blocks: frozenset
    at: object  # Cell for "in", port name for "enter"/"exit"


class Push1Construction(Construction):
    """A grid exposed through the construction interface.

    Construction states are block layouts; the agent's whereabouts live only
    in configurations. The exit-step move (walking off a door cell into the
    exterior) lands the same standing configuration, which is what makes a
    standable door cell show up as a trivial self-traversal.
    """

    def __init__(self, grid: Push1Grid):
        self.grid = grid
        self._door_of: dict[Cell, str] = {p.door: n for n, p in grid.ports.items()}

    @property
    def ports(self) -> tuple[str, ...]:
        return tuple(sorted(self.grid.ports))

    @property
    def port_caps(self) -> dict[str, PortSpec]:
        return {n: self.grid.ports[n].spec for n in self.ports}

    @property
    def initial_state(self) -> frozenset:
        return self.grid.initial_blocks

    def entry_configs(self, state: frozenset) -> Iterator[GridConfig]:
        for name in self.ports:
            p = self.grid.ports[name]
            if p.door in state:
                continue  # a block parked on the door seals the port
            yield GridConfig("in", state, p.door)
            if p.spec.allow_block_in:
                yield GridConfig("enter", state, name)

    def legal_moves(self, config: GridConfig) -> list[Move]:
        grid = self.grid
        if config.kind == "enter":
            p = grid.ports[config.at]
            inward = _neg(p.out)
            tgt = _add(p.door, inward)
            if tgt in grid.floors and tgt not in config.blocks:
                return [Move("enter-push", inward)]
            return []
        if config.kind == "exit":
            pos = grid.ports[config.at].door
        else:
            pos = config.at
        moves: list[Move] = []
        for d in DIR_ORDER:
            tgt = _add(pos, d)
            if tgt in grid.floors:
                if tgt not in config.blocks:
                    moves.append(Move("step", d))
                    continue
                beyond = _add(tgt, d)
                if beyond in grid.floors:
                    if beyond not in config.blocks:
                        moves.append(Move("push", d))
                else:
                    port = self._door_of.get(tgt)
                    if (
                        port is not None
                        and grid.ports[port].out == d
                        and grid.ports[port].spec.allow_block_out
                    ):
                        moves.append(Move("eject", d))
            else:
                port = self._door_of.get(pos)
                if port is not None and grid.ports[port].out == d:
                    moves.append(Move("exit-step", d))
        return moves

    def apply_move(self, config: GridConfig, move: Move) -> GridConfig:
        grid = self.grid
        if move.kind == "enter-push":
            p = grid.ports[config.at]
            tgt = _add(p.door, move.direction)
            return GridConfig("in", config.blocks | {tgt}, p.door)
        pos = grid.ports[config.at].door if config.kind == "exit" else config.at
        tgt = _add(pos, move.direction)
        if move.kind == "step":
            return GridConfig("in", config.blocks, tgt)
        if move.kind == "exit-step":
            return GridConfig("in", config.blocks, pos)
        if move.kind == "push":
            beyond = _add(tgt, move.direction)
            return GridConfig("in", (config.blocks - {tgt}) | {beyond}, tgt)
        if move.kind == "eject":
            return GridConfig("exit", config.blocks - {tgt}, self._door_of[tgt])
        raise ValueError(f"unknown move kind {move.kind!r}")

    def successors(self, config: GridConfig) -> Iterator[GridConfig]:
        for move in self.legal_moves(config):
            yield self.apply_move(config, move)

    def observation(self, config: GridConfig) -> tuple[str, AgentState] | None:
        if config.kind == "enter" or config.kind == "exit":
            return (config.at, PUSH)
        port = self._door_of.get(config.at)
        if port is not None:
            return (port, STEP)
        return None

    def state_of(self, config: GridConfig) -> frozenset:
        return config.blocks

    def can_depart(self, config: GridConfig) -> bool:
        return config.kind != "enter"


# ---------------------------------------------------------------------------
# Level solving: pure interior motion, no boundary.


def level_moves(
    grid: Push1Grid, pos: Cell, blocks: frozenset
) -> Iterator[tuple[str, Cell, frozenset]]:
    """(letter, new position, new blocks) in the fixed direction order."""
    for d in DIR_ORDER:
        tgt = _add(pos, d)
        if tgt not in grid.floors:
            continue
        if tgt not in blocks:
            yield STEP_LETTER[d], tgt, blocks
        else:
            beyond = _add(tgt, d)
            if beyond in grid.floors and beyond not in blocks:
                yield PUSH_LETTER[d], tgt, (blocks - {tgt}) | {beyond}


def solve_level(
    grid: Push1Grid, start: Cell | None = None, goal: Cell | None = None
) -> str | None:
    """Shortest move string from start to goal, or None when unreachable.

    Breadth-first over (agent, blocks); the fixed direction order makes the
    answer the canonically least among the shortest.
    """
    if start is None:
        start = grid.start
    if goal is None:
        goal = grid.goal
    if start is None or goal is None:
        raise ValueError("level needs both a start and a goal")
    if start not in grid.floors:
        raise ValueError(f"start {start} is not a floor cell")
    if goal not in grid.floors:
        raise ValueError(f"goal {goal} is not a floor cell")
    if start in grid.initial_blocks:
        raise ValueError(f"start {start} is occupied by a block")
    init = (start, grid.initial_blocks)
    if start == goal:
        return ""
    parents: dict[tuple[Cell, frozenset], tuple] = {init: None}
    queue: deque[tuple[Cell, frozenset]] = deque([init])
    while queue:
        pos, blocks = queue.popleft()
        for letter, npos, nblocks in level_moves(grid, pos, blocks):
            key = (npos, nblocks)
            if key in parents:
                continue
            parents[key] = ((pos, blocks), letter)
            if npos == goal:
                out: list[str] = []
                while parents[key] is not None:
                    key, letter = parents[key]
                    out.append(letter)
                return "".join(reversed(out))
            queue.append(key)
    return None
