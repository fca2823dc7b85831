"""Multi-agent epistemic models with bounded attention.

The package models how agents with limited attention absorb information:
states pair an S5 partition model with a per-agent attention budget,
actions pair pointed event models with per-event attention costs, and the
update semantics spends budget to refine what each agent can tell apart.
On top of that sit bisimulation tools, translations between the budgeted
and postcondition-based presentations, and a terminating planner for the
class of actions that always charge for new information.
"""

from .actions import (
    AttentionAction,
    AttentionActionModel,
    CostEntry,
    CostTable,
    Diagnostic,
    EpistemicAction,
    applicable,
    apply_sequence,
    attention_update,
    background_announcement,
    is_nfl,
    product_update,
    validate_action,
)
from .bisim import (
    BisimWitness,
    NotBisimilar,
    bisimilar,
    contract,
    distinguishing_formula,
    kripke_bisimilar,
)
from .emulate import (
    AttentionProfile,
    Verdict,
    check_equivalent_on,
    from_nopost,
    profiles_for,
    resolve_actual,
    to_post,
)
from .errors import (
    AttnPlanError,
    CostLookupError,
    FormulaSyntaxError,
    FormulaValidationError,
    IllFormedResult,
    NotApplicable,
    NotNfl,
    SignatureMismatch,
    StateValidationError,
    TaskFileError,
)
from .logic import (
    And,
    AttEq,
    AttLess,
    Formula,
    Know,
    Not,
    PropAtom,
    Signature,
    TOP,
    Top,
    and_all,
    att_geq,
    att_gt,
    bot,
    entails,
    format_formula,
    iff,
    implies,
    is_satisfiable,
    is_valid,
    modal_depth,
    or_,
    or_all,
    parse_formula,
    subformulas,
    validate_formula,
)
from .models import (
    AttentionState,
    EpistemicState,
    attention_state_from_epistemic,
    check,
    check_epistemic,
    close_into_partition,
    kripke_rendition,
    validate_state,
)
from .planner import (
    NoSolution,
    NoneWithinBound,
    PlanningTask,
    Solution,
    solve_bounded,
    solve_nfl,
)
from .taskfile import (
    TaskDocument,
    action_document,
    bundled_path,
    epistemic_action_dict,
    export_dot,
    load,
    load_bundled,
    loads,
    state_document,
)

__version__ = "0.1.0"

__all__ = [
    "And",
    "AttEq",
    "AttLess",
    "AttentionAction",
    "AttentionActionModel",
    "AttentionProfile",
    "AttentionState",
    "AttnPlanError",
    "BisimWitness",
    "CostEntry",
    "CostLookupError",
    "CostTable",
    "Diagnostic",
    "EpistemicAction",
    "EpistemicState",
    "Formula",
    "FormulaSyntaxError",
    "FormulaValidationError",
    "IllFormedResult",
    "Know",
    "Not",
    "NotApplicable",
    "NotBisimilar",
    "NotNfl",
    "NoSolution",
    "NoneWithinBound",
    "PlanningTask",
    "PropAtom",
    "Signature",
    "SignatureMismatch",
    "Solution",
    "StateValidationError",
    "TOP",
    "TaskDocument",
    "TaskFileError",
    "Top",
    "Verdict",
    "action_document",
    "and_all",
    "applicable",
    "apply_sequence",
    "att_geq",
    "att_gt",
    "attention_state_from_epistemic",
    "attention_update",
    "background_announcement",
    "bisimilar",
    "bot",
    "bundled_path",
    "check",
    "check_epistemic",
    "check_equivalent_on",
    "close_into_partition",
    "contract",
    "distinguishing_formula",
    "entails",
    "epistemic_action_dict",
    "export_dot",
    "format_formula",
    "from_nopost",
    "iff",
    "implies",
    "is_nfl",
    "is_satisfiable",
    "is_valid",
    "kripke_bisimilar",
    "kripke_rendition",
    "load",
    "load_bundled",
    "loads",
    "modal_depth",
    "or_",
    "or_all",
    "parse_formula",
    "product_update",
    "profiles_for",
    "resolve_actual",
    "solve_bounded",
    "solve_nfl",
    "state_document",
    "subformulas",
    "to_post",
    "validate_action",
    "validate_formula",
    "validate_state",
]
