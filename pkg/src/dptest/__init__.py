"""Two-query direct product testing over subset domains."""

from .adversary import (CorruptionSpec, coordinate_cluster_flip, corrupt_random_sets,
                        per_set_single_flip, random_string)
from .amplify import (AmplificationResult, SimpleGraph, amplification_ratio,
                      boundary_domain, cycle_graph, random_regular_graph,
                      simple_graph_test_graph, vertex_expansion)
from .certify import (Certificate, SoundnessConstants, certify_coordinate_expansion,
                      check_condition_global, check_condition_retention,
                      check_condition_sampling, soundness_constant)
from .codec import ConflictProfile, conflict_profile, majority_decode
from .core import DPTable, Domain, closest_codeword, dp_distance, dp_encode
from .errors import (DPTestError, EmptyLocalView, FormulaNotApplicable, InvalidArgument,
                     InvalidGraph, NumericFailure, RetryExhausted, UnsupportedSize)
from .spectral import (SpectralReport, conditional_edge_probability,
                       johnson_lambda2_closed_form, lambda_of, mixing_bound,
                       normalized_adjacency)
from .tester import (TestReport, check_edge, rejection_probability_exact,
                     run_test_monte_carlo)
from .testgraph import (TestGraph, build_clique_slice, build_family, build_from_edges,
                        build_johnson, build_sliding_window, local_subgraph, sample_edge,
                        sliding_window_domain)

__version__ = "0.1.0"
