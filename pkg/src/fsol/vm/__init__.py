from .interpreter import Machine, default_value
from .state import (
    FORBIDDEN_REASONS,
    REVERT_REASONS,
    AddressOccupied,
    AddrV,
    BoolV,
    ChainState,
    ContractInstance,
    ContractRefV,
    DeployError,
    ExternalAccount,
    Reverted,
    Success,
    Transaction,
    UInt160V,
    UIntV,
    UnitV,
    reason_name,
    trace_to_jsonl,
)

__all__ = [
    "FORBIDDEN_REASONS", "REVERT_REASONS", "AddressOccupied", "AddrV", "BoolV",
    "ChainState", "ContractInstance", "ContractRefV", "DeployError", "ExternalAccount",
    "Machine", "Reverted", "Success", "Transaction", "UInt160V", "UIntV", "UnitV",
    "default_value", "reason_name", "trace_to_jsonl",
]
