"""Heat kernels, Besov seminorms, BV energy and functional-inequality
verification on finite weighted-graph Dirichlet spaces."""

__version__ = "0.1.0"

from .errors import (CapacityError, ConfigError, HeatBVError, InvariantViolation,
                     NumericError)
from .space import (DEFAULT_CAPACITY, MetricMeasureSpace, build_lattice,
                    build_metric_graph, build_sierpinski_gasket, build_space,
                    build_torus, carre_du_champ, carre_du_champ_sq,
                    dirichlet_energy, doubling_profile, intrinsic_metric,
                    load_space, poincare_constant, save_space, validate_space)
from .heat import (SpectralData, apply_generator, apply_semigroup,
                   gaussian_bound_fit, generator_matrix, heat_invariant_residuals,
                   heat_kernel, kernel_matrix, spectral_decompose)
from .besov import (SeminormProfile, compare_seminorms, critical_exponent_study,
                    heat_besov_profile, metric_besov_profile, smoothness_exponent)
from .bv import (coarea_bv, check_hausdorff_perimeter, hausdorff_content,
                 measure_theoretic_boundary, minkowski_content, perimeter,
                 relaxed_bv, sobolev_seminorm)
from .bakry_emery import (BEReport, cross_term_check, hamilton_check,
                          kernel_gradient_bound, pseudo_poincare_check,
                          quasi_be_constant, riesz_check, weak_be_constant)
from .cover import (max_separated_covering, partition_of_unity,
                    discrete_convolution, relaxation_energy)
from .inequalities import (bv_sobolev_check, fractional_isoperimetry,
                           isoperimetric_check, koch_snowflake_set, koch_study,
                           sobolev_conjugate, weak_embedding_check, weak_lq_norm)
