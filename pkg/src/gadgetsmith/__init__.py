"""Formal verification and synthesis of motion-planning gadgets."""

from .model import (
    PUSH,
    STEP,
    AgentState,
    Construction,
    Gadget,
    GadgetConfig,
    GadgetConstruction,
    GadgetTransition,
    ParseError,
    PortSpec,
    Trace,
    TraceError,
    TraversalSymbol,
    format_gadget,
    gadget_step,
    load_gadget,
    observable_sequence,
    parse_gadget,
    save_gadget,
    symbol_sorted,
)
from .automata import DFA, NFA, accepts, determinize, equivalent, full_alphabet, minimize
from .synthesis import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    SynthesisResult,
    VerifyResult,
    compare_behaviors,
    construction_to_nfa,
    gadget_to_nfa,
    nfa_to_gadget,
    roundtrip,
    synthesize,
    verify_gadgets,
)
from .push1 import (
    GridConfig,
    Move,
    Push1Construction,
    Push1Grid,
    load_grid,
    parse_grid,
    solve_level,
)
from .systems import (
    CompositeConstruction,
    Exposure,
    SystemEdge,
    load_construction,
    load_system,
    parse_system,
)
from .checkable import CheckSpec, check_sources, infer_broken, post_select, violations
from .dot import gadget_to_dot

__version__ = "0.1.0"
