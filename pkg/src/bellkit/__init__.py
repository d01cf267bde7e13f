"""Bell inequalities for bipartite binary-outcome scenarios: exact local bounds,
facet certification, see-saw quantum values and noise/detection thresholds."""
from .core import (Behavior, BellError, CorrelationInequality, CorrelatorTable,
                   DeterministicStrategy, LimitExceeded, ProbabilityInequality,
                   behavior_from_correlators, correlation_to_probability,
                   correlators_from_behavior, evaluate_correlation, evaluate_probability,
                   nonsignaling_check, pr_box)
from .families import as_bound_formula, catalog, gen_as, gen_d
from .local import (FacetReport, facet_check, local_bound_correlation, local_bound_probability,
                    naive_local_bound_correlation)
from .optimizer import (DetectionModel, OptimizerConfig, VectorStrategy, detection_threshold,
                        detection_value, geometry_report, seesaw_value, visibility_threshold)

__all__ = [name for name in dir() if not name.startswith("_")]
