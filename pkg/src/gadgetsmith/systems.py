"""Systems: wire constructions together and treat the result as one construction.

Instances keep their own state spaces; a composite state is the tuple of
instance states, and a composite configuration pins down which instance the
agent occupies and its local framing there. Internal edges join two ports:
a free edge carries only the agent, a block edge also lets a block cross,
which happens as an atomic handoff between the giving side's push-out
framing and the receiving side's push-in framing. Half-finished handoffs
(push a block across, then walk away) are not representable here by design;
the comparison oracle for composites follows the same convention.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Hashable, Iterator

from .model import (
    PUSH,
    STEP,
    AgentState,
    Construction,
    GadgetConstruction,
    ParseError,
    PortSpec,
    load_gadget,
)
from .push1 import Push1Construction, load_grid


@dataclass(frozen=True)
class SystemEdge:
    a: tuple[int, str]  # (instance index, port)
    b: tuple[int, str]
    kind: str  # "free" | "block"
    axis: str | None = None


@dataclass(frozen=True)
class Exposure:
    idx: int
    port: str
    label: str
    spec: PortSpec


class CompositeConstruction(Construction):
    """The product of the instances, restricted by the declared edges.

    Only exposed ports are observable from outside; everything crossing an
    internal edge is unobservable interior motion.
    """

    def __init__(
        self,
        names: tuple[str, ...],
        constructions: tuple[Construction, ...],
        edges: tuple[SystemEdge, ...],
        exposures: tuple[Exposure, ...],
    ):
        self.names = tuple(names)
        self.constructions = tuple(constructions)
        self.edges = tuple(edges)
        self._exposures = tuple(sorted(exposures, key=lambda e: e.label))
        self._edge_at: dict[tuple[int, str], tuple[tuple[int, str], str]] = {}
        endpoints: set[tuple[int, str]] = set()

        def claim(end: tuple[int, str]) -> None:
            if end in endpoints:
                idx, port = end
                raise ValueError(
                    f"port {self.names[idx]}.{port} is used by more than one edge or exposure"
                )
            endpoints.add(end)

        for e in edges:
            for end in (e.a, e.b):
                idx, port = end
                if port not in self.constructions[idx].ports:
                    raise ValueError(f"instance {self.names[idx]} has no port {port!r}")
                claim(end)
            self._edge_at[e.a] = (e.b, e.kind)
            self._edge_at[e.b] = (e.a, e.kind)
        labels: set[str] = set()
        for x in self._exposures:
            if x.port not in self.constructions[x.idx].ports:
                raise ValueError(f"instance {self.names[x.idx]} has no port {x.port!r}")
            claim((x.idx, x.port))
            if x.label in labels:
                raise ValueError(f"duplicate exposed label {x.label!r}")
            labels.add(x.label)
        self._exposure_at = {(x.idx, x.port): x for x in self._exposures}

    @property
    def ports(self) -> tuple[str, ...]:
        return tuple(x.label for x in self._exposures)

    @property
    def port_caps(self) -> dict[str, PortSpec]:
        caps = {}
        for x in self._exposures:
            inner = self.constructions[x.idx].port_caps.get(x.port, PortSpec())
            caps[x.label] = PortSpec(
                x.spec.allow_block_in,
                x.spec.allow_block_out,
                x.spec.axis if x.spec.axis is not None else inner.axis,
            )
        return caps

    @property
    def initial_state(self) -> tuple:
        return tuple(c.initial_state for c in self.constructions)

    def entry_configs(self, state: tuple) -> Iterator[tuple]:
        for x in self._exposures:
            inst = self.constructions[x.idx]
            for c in inst.entry_configs(state[x.idx]):
                obs = inst.observation(c)
                if obs is None or obs[0] != x.port:
                    continue
                if obs[1] is PUSH and not x.spec.allow_block_in:
                    continue
                yield (state, x.idx, c)

    def successors(self, config: tuple) -> Iterator[tuple]:
        state, idx, local = config
        inst = self.constructions[idx]
        obs = inst.observation(local)
        can_dep = obs is not None and inst.can_depart(local)
        pushing_out = can_dep and obs[1] is PUSH
        if pushing_out:
            # the block is crossing the boundary right now; inside a system
            # that is only real where an exposure absorbs it, otherwise the
            # handoff below is the sole continuation
            exp = self._exposure_at.get((idx, obs[0]))
            absorbed = exp is not None and exp.spec.allow_block_out
        else:
            absorbed = True
        if absorbed:
            for nlocal in inst.successors(local):
                nstate_i = inst.state_of(nlocal)
                if nstate_i == state[idx]:
                    nstate = state
                else:
                    nstate = state[:idx] + (nstate_i,) + state[idx + 1:]
                yield (nstate, idx, nlocal)
        if can_dep:
            link = self._edge_at.get((idx, obs[0]))
            if link is not None:
                (jdx, port2), kind = link
                mode = obs[1]
                if mode is STEP or kind == "block":
                    other = self.constructions[jdx]
                    for c in other.entry_configs(state[jdx]):
                        jobs = other.observation(c)
                        if jobs is None or jobs[0] != port2 or jobs[1] is not mode:
                            continue
                        if mode is PUSH and not any(True for _ in other.successors(c)):
                            continue  # the handoff cannot complete, so the push never happens
                        yield (state, jdx, c)

    def observation(self, config: tuple) -> tuple[str, AgentState] | None:
        state, idx, local = config
        inst = self.constructions[idx]
        obs = inst.observation(local)
        if obs is None:
            return None
        exp = self._exposure_at.get((idx, obs[0]))
        if exp is None:
            return None
        if obs[1] is PUSH and inst.can_depart(local) and not exp.spec.allow_block_out:
            return None
        return (exp.label, obs[1])

    def state_of(self, config: tuple) -> tuple:
        return config[0]

    def can_depart(self, config: tuple) -> bool:
        return self.constructions[config[1]].can_depart(config[2])


# ---------------------------------------------------------------------------
# System files.

_USE_RE = re.compile(r"^use\s+(\w+)\s*=\s*(\S+)\s*$")
_EDGE_RE = re.compile(r"^edge\s+(\w+)\.(\S+)\s+--\s+(\w+)\.(\S+)((?:\s+\S+=\S+)*)\s*$")
_EXPOSE_RE = re.compile(r"^expose\s+(\w+)\.(\S+)\s+as\s+(\S+?)((?:\s+\S+=\S+)*)\s*$")


def _parse_attrs(blob: str, allowed: dict[str, tuple[str, ...]], lineno: int) -> dict[str, str]:
    attrs: dict[str, str] = {}
    for tok in blob.split():
        k, _, v = tok.partition("=")
        if k not in allowed:
            raise ParseError(f"unknown attribute {k!r}", lineno)
        if k in attrs:
            raise ParseError(f"duplicate attribute {k!r}", lineno)
        if allowed[k] and v not in allowed[k]:
            raise ParseError(
                f"{k} must be one of {', '.join(allowed[k])}; got {v!r}", lineno
            )
        attrs[k] = v
    return attrs


def parse_system(
    text: str, base_dir: str = ".", _stack: tuple = ()
) -> CompositeConstruction:
    names: list[str] = []
    cons: list[Construction] = []
    index: dict[str, int] = {}
    edges: list[SystemEdge] = []
    exposures: list[Exposure] = []
    seen_ends: dict[tuple[int, str], int] = {}
    seen_labels: dict[str, int] = {}

    def resolve(inst: str, port: str, lineno: int) -> tuple[int, str]:
        if inst not in index:
            raise ParseError(f"unknown instance {inst!r}", lineno)
        idx = index[inst]
        if port not in cons[idx].ports:
            raise ParseError(f"instance {inst!r} has no port {port!r}", lineno)
        return (idx, port)

    def claim(end: tuple[int, str], lineno: int) -> None:
        if end in seen_ends:
            raise ParseError(
                f"port {names[end[0]]}.{end[1]} already used on line {seen_ends[end]}",
                lineno,
            )
        seen_ends[end] = lineno

    def axis_of(end: tuple[int, str], override: str | None) -> str | None:
        if override is not None:
            return override
        return cons[end[0]].port_caps.get(end[1], PortSpec()).axis

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word = line.split(None, 1)[0]
        if word == "use":
            m = _USE_RE.match(line)
            if not m:
                raise ParseError("expected: use <name> = <path>", lineno)
            name, rel = m.groups()
            if name in index:
                raise ParseError(f"instance {name!r} declared twice", lineno)
            path = rel if os.path.isabs(rel) else os.path.join(base_dir, rel)
            try:
                con = load_construction(path, _stack)
            except FileNotFoundError:
                raise ParseError(f"cannot find {rel!r}", lineno)
            except ParseError as e:
                raise ParseError(f"while loading {rel}: {e}", lineno)
            index[name] = len(names)
            names.append(name)
            cons.append(con)
        elif word == "edge":
            m = _EDGE_RE.match(line)
            if not m:
                raise ParseError("expected: edge <inst>.<port> -- <inst>.<port> kind=free|block", lineno)
            ia, pa, ib, pb, blob = m.groups()
            attrs = _parse_attrs(
                blob, {"kind": ("free", "block"), "axis": ("ns", "ew")}, lineno
            )
            if "kind" not in attrs:
                raise ParseError("edge is missing kind=free|block", lineno)
            a = resolve(ia, pa, lineno)
            b = resolve(ib, pb, lineno)
            if a == b:
                raise ParseError("edge cannot join a port to itself", lineno)
            claim(a, lineno)
            claim(b, lineno)
            axis = attrs.get("axis")
            if attrs["kind"] == "block":
                ax_a, ax_b = axis_of(a, axis), axis_of(b, axis)
                if ax_a is None or ax_b is None:
                    raise ParseError(
                        "block edge endpoints have no push axis; add axis=ns|ew", lineno
                    )
                if ax_a != ax_b:
                    raise ParseError(
                        f"block edge joins incompatible push axes {ax_a} and {ax_b}", lineno
                    )
            edges.append(SystemEdge(a, b, attrs["kind"], axis))
        elif word == "expose":
            m = _EXPOSE_RE.match(line)
            if not m:
                raise ParseError("expected: expose <inst>.<port> as <label>", lineno)
            inst_name, port, label, blob = m.groups()
            attrs = _parse_attrs(
                blob,
                {"block_in": ("yes", "no"), "block_out": ("yes", "no"), "axis": ("ns", "ew")},
                lineno,
            )
            end = resolve(inst_name, port, lineno)
            claim(end, lineno)
            if label in seen_labels:
                raise ParseError(
                    f"label {label!r} already exposed on line {seen_labels[label]}", lineno
                )
            seen_labels[label] = lineno
            spec = PortSpec(
                attrs.get("block_in", "no") == "yes",
                attrs.get("block_out", "no") == "yes",
                attrs.get("axis"),
            )
            exposures.append(Exposure(end[0], end[1], label, spec))
        else:
            raise ParseError(f"unknown directive {word!r}", lineno)
    if not names:
        raise ParseError("system declares no instances", 1)
    return CompositeConstruction(tuple(names), tuple(cons), tuple(edges), tuple(exposures))


def load_system(path: str, _stack: tuple = ()) -> CompositeConstruction:
    real = os.path.realpath(path)
    if real in _stack:
        raise ParseError(f"system files include each other in a cycle: {path}", 1)
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_system(text, os.path.dirname(path) or ".", _stack + (real,))


def load_construction(path: str, _stack: tuple = ()) -> Construction:
    """Load any construction file, dispatching on the extension."""
    ext = os.path.splitext(path)[1].lower()
    if ext == ".gdt":
        return GadgetConstruction(load_gadget(path))
    if ext == ".grid":
        return Push1Construction(load_grid(path))
    if ext == ".sys":
        return load_system(path, _stack)
    raise ValueError(
        f"cannot tell the construction type of {path!r}; expected .gdt, .grid, or .sys"
    )
