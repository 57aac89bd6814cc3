"""Solve, classify and verify Bethe ansatz equations of inhomogeneous XXX / XXZ chains."""

__version__ = "0.1.0"

from .classify import Classification, LemmaVerdict, check_lemma, classify, lemma_precondition
from .completeness import (CountReport, completeness_report, singular_vector_count,
                           weight_subspace_dim)
from .errors import (ApplicabilityError, BetheError, BranchPlacementError,
                     DegenerateSystemError, InvalidInputError, NonSimplePoleError, PoleError)
from .identities import (IdentityQuery, IdentityValue, eval_F, eval_F_quadrature, eval_G,
                         eval_G_quadrature_integer, residue_pair, sum_rule_tz, sz0_sum_rule,
                         xxx_periodic_relation)
from .model import (Family, ModelSpec, RootSet, Sector, bethe_residual, canonicalize,
                    drinfeld_polynomial, normalized_residual, q_number, rational_form_residual)
from .polysolve import SolveOutcome, SolverConfig, multistart, solve, solve_k1, solve_k2
