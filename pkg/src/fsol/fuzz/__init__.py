"""Type-directed fuzzing of the checkers against the VM."""

from .campaign import CampaignReport, SeedResult, Violation, run_campaign, run_seed
from .generate import MODES, GenConfig, generate_program, generate_scenario
from .shrink import shrink

__all__ = [
    "CampaignReport", "GenConfig", "MODES", "SeedResult", "Violation", "generate_program",
    "generate_scenario", "run_campaign", "run_seed", "shrink",
]
