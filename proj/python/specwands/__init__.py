"""Cycle-level SMT issue-scheduling simulator (SpecWands and baseline policies)."""

from ._core import (
    ChannelReport,
    ConfigError,
    HarnessError,
    PipelineConfig,
    SimulationError,
    Simulator,
    SniResult,
    TraceError,
    VerifierError,
    Workload,
    check_invariants,
    check_sni,
    emit_trace,
    gen_inter_sca,
    gen_intra_sca,
    gen_loop_div,
    parse_trace,
    random_secret,
    run_channel,
    run_matrix,
    validate,
)

__all__ = [
    "ChannelReport",
    "ConfigError",
    "HarnessError",
    "PipelineConfig",
    "SimulationError",
    "Simulator",
    "SniResult",
    "TraceError",
    "VerifierError",
    "Workload",
    "check_invariants",
    "check_sni",
    "emit_trace",
    "gen_inter_sca",
    "gen_intra_sca",
    "gen_loop_div",
    "parse_trace",
    "random_secret",
    "run_channel",
    "run_matrix",
    "validate",
]
