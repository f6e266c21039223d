"""Command line front end.

Exit codes: 0 success / property holds; 1 the asked-about property does not
hold (inequivalent behaviors, failed checkability, unreachable goal); 2 bad
input of any kind; 3 the configuration budget ran out.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys

from .automata import NFA
from .checkable import CheckSpec, post_select, violations
from .dot import gadget_to_dot
from .model import Gadget, GadgetConstruction, ParseError, format_gadget, load_gadget, save_gadget
from .push1 import load_grid, solve_level
from .synthesis import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    compare_behaviors,
    construction_to_nfa,
    gadget_to_nfa,
    synthesize,
)
from .systems import load_construction


def _default_threads() -> int:
    return os.cpu_count() or 1


def _source_header(verb: str, path: str) -> str:
    with open(path, "rb") as f:
        digest = hashlib.sha256(f.read()).hexdigest()[:12]
    return f"{verb} {os.path.basename(path)} sha256={digest}"


def _display(gadget: Gadget, show_trivial: bool) -> Gadget:
    if show_trivial:
        return gadget
    return Gadget(
        gadget.states, gadget.start_state, gadget.locations, gadget.nontrivial_transitions()
    )


def _emit_gadget(gadget: Gadget, args, header: str) -> None:
    if args.output:
        save_gadget(args.output, gadget, header=header)
    else:
        sys.stdout.write(format_gadget(_display(gadget, args.show_trivial)))


def _load_for_synthesis(path: str):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".gdt":
        return GadgetConstruction(load_gadget(path))
    return load_construction(path)


def _cmd_synth(args) -> int:
    construction = _load_for_synthesis(args.input)
    result = synthesize(construction, budget=args.budget, threads=args.threads)
    print(f"states: {result.states}")
    print(f"transitions: {result.transitions}")
    print(f"configurations: {result.configurations}")
    _emit_gadget(result.gadget, args, _source_header("synthesized from", args.input))
    return 0


def _cmd_compose(args) -> int:
    if os.path.splitext(args.input)[1].lower() != ".sys":
        raise ValueError("compose expects a .sys file")
    return _cmd_synth(args)


def _nfa_of(path: str, budget: int, threads: int) -> tuple[list[str], NFA]:
    ext = os.path.splitext(path)[1].lower()
    if ext == ".gdt":
        gadget = load_gadget(path)
        return sorted(gadget.locations), gadget_to_nfa(gadget)
    construction = load_construction(path)
    nfa, _ = construction_to_nfa(construction, budget=budget, threads=threads)
    return list(construction.ports), nfa


def _cmd_verify(args) -> int:
    left_ports, left = _nfa_of(args.left, args.budget, args.threads)
    right_ports, right = _nfa_of(args.right, args.budget, args.threads)
    outcome = compare_behaviors(left_ports, left, right_ports, right)
    if outcome.equal:
        print("EQUIVALENT")
        return 0
    if outcome.port_mismatch:
        print("PORT MISMATCH")
        print(f"left ports:  {' '.join(sorted(set(left_ports)))}")
        print(f"right ports: {' '.join(sorted(set(right_ports)))}")
        return 1
    print("NOT EQUIVALENT")
    accepted_by = args.left if outcome.side == "left" else args.right
    print(f"witness accepted only by {accepted_by}:")
    for sym in outcome.witness or []:
        print(str(sym))
    return 1


def _cmd_postselect(args) -> int:
    gadget = load_gadget(args.input)
    spec = CheckSpec(args.check_in, args.check_out, args.checked, args.allow_push)
    broken = None
    if args.broken is not None:
        broken = [q for q in args.broken.split(",") if q]
    problems = violations(gadget, spec, broken)
    if problems:
        print("NOT SIMPLY CHECKABLE")
        for p in problems:
            print(p)
        return 1
    selected = post_select(gadget, spec, broken)
    _emit_gadget(selected, args, _source_header("post-selected from", args.input))
    return 0


def _parse_cell(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected x,y; got {text!r}")
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError:
        raise ValueError(f"expected integer coordinates; got {text!r}")


def _cmd_solve(args) -> int:
    grid = load_grid(args.level)
    start = _parse_cell(args.start) if args.start else None
    goal = _parse_cell(args.goal) if args.goal else None
    answer = solve_level(grid, start=start, goal=goal)
    if answer is None:
        print("UNREACHABLE")
        return 1
    print(answer)
    return 0


def _cmd_export_dot(args) -> int:
    ext = os.path.splitext(args.input)[1].lower()
    if ext == ".gdt":
        gadget = load_gadget(args.input)
    else:
        construction = load_construction(args.input)
        gadget = synthesize(construction, budget=args.budget, threads=args.threads).gadget
    text = gadget_to_dot(gadget, show_trivial=args.show_trivial)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gadgetsmith",
        description="Verify and synthesize motion-planning gadgets from low-level constructions.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_BUDGET,
        help="largest number of distinct configurations to explore",
    )
    common.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help="worker threads for exploration (output is identical for any count)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="synthesize the gadget of a construction")
    p.add_argument("input", help=".grid, .sys, or .gdt file")
    p.add_argument("-o", "--output", help="write the gadget here instead of stdout")
    p.add_argument("--show-trivial", action="store_true", help="include trivial self-loops in the stdout listing")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("compose", parents=[common], help="synthesize the gadget of a system file")
    p.add_argument("input", help=".sys file")
    p.add_argument("-o", "--output", help="write the gadget here instead of stdout")
    p.add_argument("--show-trivial", action="store_true", help="include trivial self-loops in the stdout listing")
    p.set_defaults(func=_cmd_compose)

    p = sub.add_parser("verify", parents=[common], help="compare two behaviors")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("postselect", parents=[common], help="check simple checkability and post-select")
    p.add_argument("input", help=".gdt file")
    p.add_argument("-o", "--output", help="write the gadget here instead of stdout")
    p.add_argument("--checked", default="checked", help="name of the checked state")
    p.add_argument("--check-in", default="I", help="check entry location")
    p.add_argument("--check-out", default="O", help="check exit location")
    p.add_argument("--allow-push", action="store_true", help="let the check traversal push")
    p.add_argument("--broken", help="comma-separated broken states (default: inferred)")
    p.add_argument("--show-trivial", action="store_true", help="include trivial self-loops in the stdout listing")
    p.set_defaults(func=_cmd_postselect)

    p = sub.add_parser("solve", parents=[common], help="shortest move string through a level")
    p.add_argument("level", help=".grid file")
    p.add_argument("--start", help="x,y agent start (defaults to the '@' cell)")
    p.add_argument("--goal", help="x,y goal (defaults to the 'G' cell)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("export-dot", parents=[common], help="Graphviz view of a gadget")
    p.add_argument("input", help=".gdt, .grid, or .sys file")
    p.add_argument("-o", "--output", help="write the DOT text here instead of stdout")
    p.add_argument("--show-trivial", action="store_true", help="include trivial self-loops")
    p.set_defaults(func=_cmd_export_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
