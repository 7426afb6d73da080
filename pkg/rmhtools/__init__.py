from . import selection

from .tools import synthetic_data
from .tools.fdata import (Grid, FunctionalDataset, SplitPair, load_dataset, save_dataset,
                          second_derivative, local_linear_smooth, truncate, drop_zero_curves,
                          stratified_split, stratified_folds, apply_preprocessing)
from .tools.synthetic_data import (TrendSpec, SyntheticProblem, phi_mk, phi_mk_derivative,
                                   brownian_paths, brownian_sample, make_trend, generate_problem,
                                   bayes_rule_linear_trend, bayes_error)
from .tools.classify import (Classifier, KNNClassifier, LinearDiscriminant, knn_classify,
                             knn_classify_multi, knn_cv_error_table, select_k_cv, fisher_lda_fit,
                             fisher_lda_predict, error_rate)
from .tools.reducers import (ProjectionModel, PCAProjection, PLSProjection, pca_fit, pls_fit,
                             select_components_cv)
from .tools.display import curveshow, trajshow
from .tools.compare import compare_selection, recovery_rate

from .selection.dependence import dcov_sq, dcor_sq, relevance_curve, RelevanceCurve
from .selection.correction import IntervalNode, conditional_expectation, apply_correction
from .selection.selectors import (SelectionResult, find_local_maxima, maxima_hunting_select,
                                  redundancy_bounds, rmh_select, reduce_dataset)

from .bench.experiment import (ExperimentConfig, ExperimentResult, run_synthetic, run_real,
                               run_peak_lda, run_sensitivity, run_near_bayes, emit_results)

from .version import version as __version__
