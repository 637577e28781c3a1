"""Discrepancy of subcube set systems, weight-k character matrices and
homogeneous arithmetic progressions, with exact solvers, determinant
lower-bound certificates and constructive colorings."""

from .certificates import (
    CheckReport,
    LowerBoundCert,
    check_char_decomposition,
    check_embedding,
    check_system_equivalence,
    check_transfer,
    detlb_certificate,
    verify_certificate,
)
from .core import (
    CapExceededError,
    Coloring,
    DiscrepancyReport,
    SetSystem,
    SignMatrix,
    eval_discrepancy,
    hap_disc_stream,
    restrict,
    to_matrix,
)
from .exact import DetSubsetResult, ExactResult, det_exact, disc_exact, find_large_det_subset, herdisc_exact
from .formats import FormatError, InvariantError, deserialize, read_document, serialize
from .generators import (
    CharacterIndex,
    CubePattern,
    EmbeddingWitness,
    extend_pattern,
    gen_characters,
    gen_embedding,
    gen_hap,
    gen_subcubes,
    gen_sylvester,
    representative,
)
from .heuristics import HeuristicOutcome, beck_fiala, greedy_improve, random_coloring, ternary_coloring

__version__ = "0.1.0"
