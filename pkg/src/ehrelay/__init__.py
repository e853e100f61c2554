"""Power allocation schemes and Monte Carlo benchmarks for a two-hop
energy-harvesting decode-and-forward relay network."""

from ehrelay.core import (
    CONVENTIONAL,
    LINK_ADAPTIVE,
    EpisodeTrace,
    FeasibilityReport,
    InfeasibleScheduleError,
    PowerSchedule,
    ScenarioConfig,
    battery_step,
    check_feasibility,
    rate,
    sample_episode,
    throughput,
)

__all__ = [
    "CONVENTIONAL",
    "LINK_ADAPTIVE",
    "EpisodeTrace",
    "FeasibilityReport",
    "InfeasibleScheduleError",
    "PowerSchedule",
    "ScenarioConfig",
    "battery_step",
    "check_feasibility",
    "rate",
    "sample_episode",
    "throughput",
]
