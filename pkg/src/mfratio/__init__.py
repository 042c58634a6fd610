"""Simulation of multifractal cascades, random measures and random walks, and
ratio-based estimation of their scaling function."""

from .cascade import CascadeRealization, cascade_totals, sample_cascade, theoretical_V
from .config import ExperimentConfig, parse_config
from .errors import *  # noqa: F401,F403
from .estimators import (EstimateReport, StructureTable, asymptotic_rate, differences,
                         structure_function, zeta_curve, zeta_hat, zeta_tilde)
from .grid import MixedGrid, Realization, aggregate, level_values
from .harness import (CovarianceDecay, McReport, Replications, covariance_decay,
                      ks_normal_test, rate_regression, run_rate_study, run_replications,
                      summarize)
from .idlaws import sample_id, sample_log_weights, stable_skewed_left
from .io import (ingest_series, read_realization, write_estimate, write_mc_reports,
                 write_realization)
from .mrm import ConeGeometry, MrmRealization, cone_overlap, sample_mrm, sample_wl
from .mrw import (MrwPath, conditional_sigma, conditional_variances, fgn_autocovariance,
                  sample_fgn, sample_mrw)
from .scaling import (CriticalExponents, ScalingModel, critical_exponents, moment_gap, psi,
                      psi_prime, zeta, zeta_h)
from .streams import Streams

__version__ = "0.1.0"
