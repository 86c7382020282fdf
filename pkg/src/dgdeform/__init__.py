"""Exact deformation theory: DGLAs, Maurer-Cartan solving, polyvector
calculus, Frobenius manifolds and 2d TQFTs over the Gaussian rationals."""

from .artin import GradedArtinAlgebra, SeriesElement
from .dgla import Dgla, DglaOverArtin, TensorElement, check_axioms, deformed_differential
from .errors import DeformError, ParseError, PreconditionError, SemanticError, StructuralError
from .frobenius import (FrobeniusData, check_frobenius_algebra, frobenius_family,
                        potential_to_tensor, tensor_to_potential, wdvv_check)
from .linalg import CochainComplex, GradedVectorSpace, LinearMap
from .mc import (HodgeTable, abelian_functor_eval, bch_product, deformed_cohomology,
                 extended_moduli_dims, gauge_act, gauge_equivalent, mc_residual,
                 smoothness_probe, solve_mc)
from .polyvector import (PolyvectorSpace, bv_delta, dbar, finite_ks_model, pv_wedge,
                         schouten_bracket, tt_audit)
from .scalars import ExactScalar, I, scalar
from .tqft import Surface, handle_operator, tqft_eval

__version__ = "0.1.0"

__all__ = [
    "GradedArtinAlgebra",
    "SeriesElement",
    "Dgla",
    "DglaOverArtin",
    "TensorElement",
    "check_axioms",
    "deformed_differential",
    "DeformError",
    "ParseError",
    "PreconditionError",
    "SemanticError",
    "StructuralError",
    "FrobeniusData",
    "check_frobenius_algebra",
    "frobenius_family",
    "potential_to_tensor",
    "tensor_to_potential",
    "wdvv_check",
    "CochainComplex",
    "GradedVectorSpace",
    "LinearMap",
    "HodgeTable",
    "abelian_functor_eval",
    "bch_product",
    "deformed_cohomology",
    "extended_moduli_dims",
    "gauge_act",
    "gauge_equivalent",
    "mc_residual",
    "smoothness_probe",
    "solve_mc",
    "PolyvectorSpace",
    "bv_delta",
    "dbar",
    "finite_ks_model",
    "pv_wedge",
    "schouten_bracket",
    "tt_audit",
    "ExactScalar",
    "I",
    "scalar",
    "Surface",
    "handle_operator",
    "tqft_eval",
]
