"""Finite-stage workbench for sofic approximations of groups.

Permutation algebra with exact rational traces, word models and trace
profiles of approximation stages, the convex calculus (amplification,
direct sums, weighted combinations, cutting), the combinatorial rounding
lemmas, the weighted conjugacy metric as a search problem, and exact
centralizer computation with transitivity certificates.
"""

from .errors import BudgetError, ParseError, PreconditionError, SoficlabError
from .perm import (Perm, conjugate, cycle_type, direct_sum, fixed_count,
                   fixed_fraction, hs_dist_sq, mismatch_count, tensor)
from .words import (Presentation, Word, enumerate_words, free_reduce,
                    word_from_string, word_to_string)
from .groups import (CayleyTable, SoficApprox, TraceProfile, approx_from_dict,
                     approx_to_dict, conjugate_approx, coset_action,
                     cyclic_shift_approx, cyclic_table, dihedral_table,
                     evaluate_word, klein_table, product_table,
                     quaternion_table, regular_action, relator_defect,
                     soficity_score, table_from_dict, table_to_dict,
                     trace_profile, word_images)
from .convex import (CombinePlan, amplify, approximate_weights,
                     block_reorder_conjugator, check_weights, convex_combine,
                     cut, direct_sum_approx, exact_total,
                     interleave_conjugator, orbits, overlap_conjugator,
                     recovery_conjugator, tensor_power)
from .rounding import (BlockifyResult, PatchSpec, PointMap, SubsetFamily,
                       averaging_bound, blockify, copy_slices, deficit,
                       family_cost, majority_set, membership_counts,
                       patchwork, round_to_permutation, witness_permutation,
                       witness_value)
from .align import (Alignment, AxiomCheck, WeightScheme, axiom_suite,
                    conj_distance_anneal, conj_distance_exact, conj_objective,
                    equalize_dimensions)
from .commutant import (CentralizerDescription, ErgodicityCertificate,
                        MixingResult, approx_commutant_search,
                        centralizer_exact, comm_defect,
                        ergodicity_certificate, mixing_statistic,
                        verify_certificate)

__version__ = "0.1.0"
