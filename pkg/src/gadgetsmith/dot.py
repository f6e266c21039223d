"""Graphviz export for gadgets."""

from __future__ import annotations

from .model import Gadget


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def gadget_to_dot(gadget: Gadget, show_trivial: bool = False) -> str:
    """DOT text for the transition diagram; trivial self-loops are display noise
    and stay hidden unless asked for."""
    lines = ["digraph gadget {", "  rankdir=LR;", "  node [shape=circle];"]
    lines.append(f"  {_quote(gadget.start_state)} [shape=doublecircle];")
    for q in gadget.states:
        if q != gadget.start_state:
            lines.append(f"  {_quote(q)};")
    for t in gadget.transitions:
        if t.is_trivial() and not show_trivial:
            continue
        label = str(t.symbol)
        lines.append(
            f"  {_quote(t.from_state)} -> {_quote(t.to_state)} [label={_quote(label)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
