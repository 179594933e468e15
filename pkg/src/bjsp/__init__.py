"""Bounded job start scheduling: greedy approximations, exact oracles,
time-indexed MILP emitters and two-stage robust scheduling."""

from .model import (Bounds, FeasibilityReport, Instance, InstanceError, Period,
                    PeriodDecomposition, Schedule, ScheduleError, assign_machines,
                    bounds, check_feasible, classify, compactify, decompose_periods,
                    idle_upper_bound, is_compact, lower_bound_basic, lower_bound_long,
                    makespan, validate_instance)
from .greedy import (JobOrder, LsmConfig, alpha, greedy_schedule, lpt, lsm, lspt,
                     ratio_certificate)

__all__ = [
    "Bounds", "FeasibilityReport", "Instance", "InstanceError", "Period",
    "PeriodDecomposition", "Schedule", "ScheduleError", "assign_machines", "bounds",
    "check_feasible", "classify", "compactify", "decompose_periods", "idle_upper_bound",
    "is_compact", "lower_bound_basic", "lower_bound_long", "makespan", "validate_instance",
    "JobOrder", "LsmConfig", "alpha", "greedy_schedule", "lpt", "lsm", "lspt",
    "ratio_certificate",
]

__version__ = "0.1.0"
