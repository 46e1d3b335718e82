"""Head reduction and quantitative (non-idempotent intersection) types for a
pattern calculus with pairs and explicit matchings."""
from .derivation import Derivation, Judgment, deriv_size, from_json, pair_e_reading, to_json
from .errors import (
    BudgetExceeded, FormatError, LinearityError, NotCanonical, NotHeadNormalizing, ParseError,
    ReplayMismatch, RuleViolation, ShapeMismatch,
)
from .reduction import (
    Classification, Counters, StepKind, Trace, canonical_size, classify, full_steps,
    head_normalize, head_step,
)
from .syntax import STANDARD_MACROS, alpha_eq, parse, show
from .system_e import check_e, forward_replay_check, is_tight_derivation, synthesize_tight, verify_exact
from .system_u import check_u, synthesize_u, transport_judgment

__version__ = "0.1.0"

__all__ = [
    "alpha_eq", "BudgetExceeded", "canonical_size", "check_e", "check_u", "Classification",
    "classify", "Counters", "deriv_size", "Derivation", "FormatError", "forward_replay_check",
    "from_json", "full_steps", "head_normalize", "head_step", "is_tight_derivation", "Judgment",
    "LinearityError", "NotCanonical", "NotHeadNormalizing", "pair_e_reading", "parse", "ParseError",
    "ReplayMismatch", "RuleViolation", "ShapeMismatch", "show", "STANDARD_MACROS", "StepKind",
    "synthesize_tight", "synthesize_u", "to_json", "Trace", "transport_judgment", "verify_exact",
]
