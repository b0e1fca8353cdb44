"""Association schemes, their spectral/Krein data, the induced hypergroup
walks, quantum Markov chain constructions, and anyon fusion systems."""

__version__ = "0.1.0"

from . import galois, groups
from .anyons import (
    GOLDEN_RATIO,
    BraidGenerators,
    BridgeReport,
    FusionSystem,
    HexagonReport,
    PentagonReport,
    braid_generators,
    builtin_fusion_system,
    cyclic_fusion_system,
    fuse,
    make_fusion_system,
    quantum_dimensions,
    scheme_fusion_bridge,
    verify_hexagon,
    verify_pentagon,
)
from .errors import CertificationError, SchemeWalkError, ValidationError
from .hypergroup import Hypergroup, classical_chain, convolve, hypergroup_from, walk
from .parameters import (
    IntersectionTensor,
    KreinReport,
    KreinTensor,
    check_krein_condition,
    intersection_numbers,
    krein_parameters,
)
from .qmc import (
    ChannelTrajectory,
    CPReport,
    SchurChannel,
    TransitionExpectation,
    WalkOperator,
    apply_transition_expectation,
    certify_cp,
    choi_matrix,
    dilation_unitary,
    iterate_channel,
    make_transition_expectation,
    schur_channel_apply,
    stationary_distribution,
    szegedy_walk,
    transition_expectation_closed_form,
    transition_expectation_dual,
)
from .schemes import (
    AssociationScheme,
    AxiomReport,
    build_conjugacy_scheme,
    build_grassmann,
    build_group_scheme,
    build_johnson,
    build_orbit_scheme,
    verify_axioms,
)
from .spectral import BoseMesnerDecomposition, decompose, schur, schur_identity

__all__ = [
    "__version__",
    "galois",
    "groups",
    "GOLDEN_RATIO",
    "AssociationScheme",
    "AxiomReport",
    "BoseMesnerDecomposition",
    "BraidGenerators",
    "BridgeReport",
    "CPReport",
    "CertificationError",
    "ChannelTrajectory",
    "FusionSystem",
    "HexagonReport",
    "Hypergroup",
    "IntersectionTensor",
    "KreinReport",
    "KreinTensor",
    "PentagonReport",
    "SchemeWalkError",
    "SchurChannel",
    "TransitionExpectation",
    "ValidationError",
    "WalkOperator",
    "apply_transition_expectation",
    "braid_generators",
    "build_conjugacy_scheme",
    "build_grassmann",
    "build_group_scheme",
    "build_johnson",
    "build_orbit_scheme",
    "builtin_fusion_system",
    "certify_cp",
    "check_krein_condition",
    "choi_matrix",
    "classical_chain",
    "convolve",
    "cyclic_fusion_system",
    "decompose",
    "dilation_unitary",
    "fuse",
    "hypergroup_from",
    "intersection_numbers",
    "iterate_channel",
    "krein_parameters",
    "make_fusion_system",
    "make_transition_expectation",
    "quantum_dimensions",
    "scheme_fusion_bridge",
    "schur",
    "schur_channel_apply",
    "schur_identity",
    "stationary_distribution",
    "szegedy_walk",
    "transition_expectation_closed_form",
    "transition_expectation_dual",
    "verify_axioms",
    "verify_hexagon",
    "verify_pentagon",
    "walk",
]
