from .experiment import (ExperimentConfig, ExperimentResult, run_synthetic, run_real, run_peak_lda,
                         run_sensitivity, run_near_bayes, run_method, emit_results, derived_seed)
from .cli import main
