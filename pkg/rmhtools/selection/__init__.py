from .dependence import dcov_sq, dcor_sq, dcor_sq_columns, relevance_curve, RelevanceCurve
from .correction import IntervalNode, conditional_expectation, correction_factors, apply_correction
from .selectors import (SelectionResult, find_local_maxima, maxima_hunting_select,
                        redundancy_bounds, rmh_select, reduce_dataset)
