"""sympdual: exact calculus of symplectic self-dualities on finite abelian
p-groups — group extensions as integer matrices, bipartiteness and
homogeneous reduction, certified non-bipartite classes, and constructive
standardization of every symplectic self-duality."""

__version__ = "0.1.0"

from .errors import (DimensionMismatch, EnumerationGuard, InvariantViolation,
                     NoSolutionError, SympdualError, UnsupportedStructure)
from .groups import (Element, ExponentProfile, FinAbGroup, HomMatrix,
                     adjoint_hom, apply_hom, direct_sum, dual_pairing,
                     element_add, element_neg, element_scale, is_automorphism,
                     random_automorphism)
from .smith import SmithDecomposition, cokernel_structure, solve_congruence
from .smith import smith as smith_normal_form
from .symplectic import (Standardization, Subgroup, SymplecticForm,
                         SymplecticPair, evaluate, grow_maximal_isotropic,
                         isotropic_complement, orthogonal_complement, peel,
                         split_skew_hom, standard_pair, standardize_pair,
                         subquotient)
from .extensions import (ExtensionMatrix, block_decompose, canonicalize,
                         dual_extension, extension_from_triple,
                         extension_group, is_antidual, is_autodual,
                         rank_check, symplectic_from_antidual, transform)
from .standardness import (BipartiteWitness, NonStandardCertificate,
                           counterexample_matrix,
                           decide_triple_standard_exhaustive, is_bipartite,
                           reduce_homogeneous, verify_counterexample)
from .heisenberg import (Cocycle, MonomialOperator, commutator_form,
                         equivalence_splitting, standard_cocycle,
                         weyl_compose)
