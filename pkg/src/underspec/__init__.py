"""False outperformance claim probabilities with seed variance."""
from ._backend import BACKEND
from .calibrate import CalibrationSpec, ReferencePoint, calibrate_s, calibration_trace
from .clf import (ClfComparison, ClfParams, ContingencyTable, clf_asymptotic_floor,
                  clf_false_claim_exact, clf_false_claim_mc, clf_false_claim_underspec,
                  congruence_bounds, expected_table, impute_table)
from .data import SEED_VARIANCE_RECORDS, SeedVarianceRecord
from .errors import ConvergenceError, DomainError, UnderspecError, UsageError
from .grid import (ContourShift, GridResult, GridSpec, MonotonicityError, compare_grids,
                   extract_contour, run_grid)
from .seg import (SegComparison, SegParams, seg_asymptotic_floor, seg_false_claim_prob,
                  seg_standard_error)
from .stats import (Probability, Rng, log_gamma, normal_cdf, reg_inc_beta, sample_dirichlet,
                    sample_normal, student_t_cdf)
from .tasks import Task

__version__ = "0.1.0"
