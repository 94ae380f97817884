"""Median-based inequality analysis.

The package measures income inequality by comparing the struggling half
of a population against reference incomes taken at or above the median,
which keeps every index meaningful even when the underlying distribution
has no finite mean.  It provides parametric quantile families with
equality-curve integration, empirical estimators with classical
comparison indices, rank-preserving transfer analysis, a small survey
pipeline, and a command-line interface.
"""
from .curves import (CATALOG, DEFAULT_QUADRATURE, QuadratureConfig,
                     curve_samples, psi, psi_index, rank_models)
from .empirical import (DegenerateSampleError, IndexReport, Sample,
                        empirical_quantile, full_report, g2_n, gini_n,
                        make_sample, psi1_n, psi2_n, psi3_n, zenga_n, dg_n)
from .pipeline import (PipelineConfig, PipelineError, build_cohorts,
                       cohort_reports, equivalized_income, load_config,
                       read_records)
from .quantiles import QuantileModel, make_model, parse_model_spec, quantile
from .transfers import (Transfer, TransferError, apply_transfer, classify,
                        max_admissible, predict_effect, run_plan,
                        threshold_c2, threshold_c3)

__version__ = "0.1.0"
