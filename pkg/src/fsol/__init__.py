"""FSol: a core Solidity-like language with baseline and refined address typing."""
