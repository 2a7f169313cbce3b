"""Desk-scale placement, delivery schedules and their audits."""

from .audit import SimulationReport, counted_ndt, verify_schedule
from .convergence import ConvergenceReport, finite_p_convergence
from .placement import PlacementPlan, least_L, plan_placement
from .schedule import Fragment, Phase, Schedule, Segment, build_pipelined_schedule, build_serial_schedule
from .softtransfer import effective_snr, log2_exact

__all__ = [
    "ConvergenceReport", "Fragment", "Phase", "PlacementPlan", "Schedule", "Segment",
    "SimulationReport", "build_pipelined_schedule", "build_serial_schedule", "counted_ndt",
    "effective_snr", "finite_p_convergence", "least_L", "log2_exact", "plan_placement",
    "verify_schedule",
]
