from .baseline import baseline_type_of, check_baseline, erase_refined
from .core import UNIT, TypeEnv
from .refined import (
    RefinedSig,
    check_call_constraint,
    check_refined,
    elaborate_legacy,
    refined_signature,
    refined_type_of,
)

CHECKERS = {"baseline": check_baseline, "refined": check_refined}

__all__ = [
    "CHECKERS", "UNIT", "RefinedSig", "TypeEnv", "baseline_type_of", "check_baseline",
    "check_call_constraint", "check_refined", "elaborate_legacy", "erase_refined",
    "refined_signature", "refined_type_of",
]
