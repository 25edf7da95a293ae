"""Twirling semigroups: quantum dynamical semigroups from random walks on Lie groups."""

__version__ = "0.1.0"

from .errors import (AmbiguousPreimage, InvalidInput, InvalidSpec, NotPauli, NotRepresentable,
                     NumericFailure, StepTooCoarse, TwirlingError)
from .lie_core import (GroupElement, LieRepresentation, adapted_coordinates, build_representation,
                       custom, group_exp, identity, su2_spin, suN_defining, torus_charges, u1_charges)
from .kit import LevyMeasure, RepresentationKit, hunt_function, random_kit, truncate, truncate_kit
from .superop import (GKLSForm, Superoperator, evolve, full_generator, gaussian_generator,
                      gkls_canonical, gkls_superop, jump_generator, kit_from_gkls, twirl_exact, uvee)
from .sampler import PathConfig, TwirlEstimate, sample_gaussian_path, sample_jump_path, twirl_mc
from .analyzer import (ChannelReport, choi, covariance_check, is_ccp_generator, is_cptp,
                       pauli_decompose, truncation_convergence)
from .classical_oracle import ScalarKit, char_exponent, lift_to_charges, u1_coherence_factor

__all__ = [
    "AmbiguousPreimage",
    "InvalidInput",
    "InvalidSpec",
    "NotPauli",
    "NotRepresentable",
    "NumericFailure",
    "StepTooCoarse",
    "TwirlingError",
    "GroupElement",
    "LieRepresentation",
    "adapted_coordinates",
    "build_representation",
    "custom",
    "group_exp",
    "identity",
    "su2_spin",
    "suN_defining",
    "torus_charges",
    "u1_charges",
    "LevyMeasure",
    "RepresentationKit",
    "hunt_function",
    "random_kit",
    "truncate",
    "truncate_kit",
    "GKLSForm",
    "Superoperator",
    "evolve",
    "full_generator",
    "gaussian_generator",
    "gkls_canonical",
    "gkls_superop",
    "jump_generator",
    "kit_from_gkls",
    "twirl_exact",
    "uvee",
    "PathConfig",
    "TwirlEstimate",
    "sample_gaussian_path",
    "sample_jump_path",
    "twirl_mc",
    "ChannelReport",
    "choi",
    "covariance_check",
    "is_ccp_generator",
    "is_cptp",
    "pauli_decompose",
    "truncation_convergence",
    "ScalarKit",
    "char_exponent",
    "lift_to_charges",
    "u1_coherence_factor",
]
