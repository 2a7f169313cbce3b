"""Latency (NDT) trade-offs for cloud- and cache-aided wireless edge networks."""

from .analysis import (OptimalityCertificate, Status, achievable, exact_ndt, lower_bound,
                       multiplicative_gap,
                       pipelined_serial_ratio, verify_convexity)
from .bounds import (LpConstraint, LpSolution, cache_only_lower_bound, cloud_only_lower_bound,
                     interfile_coding_lower_bound, lp_constraints, lp_lower_bound,
                     pipelined_lower_bound, weighted_combination_bound)
from .core import (Mode, NdtPoint, RegimeLabel, SystemParams, Thresholds, classify_regime,
                   parse_rational, thresholds)
from .errors import (BudgetExceeded, CacheTooSmall, CausalityViolation, FranError, GapViolation,
                     Infeasible, IndivisibleL, InvalidParams, InvalidWeights, OutOfRange,
                     Undeliverable)
from .schemes import (FileSplit, SchemeId, SchemeNdt, achievable_pipelined, achievable_serial,
                      compose_pipelined, compose_serial, ndt_ca_ia, ndt_ca_zf, ndt_cl_hf,
                      ndt_cl_sf)

__version__ = "0.1.0"
