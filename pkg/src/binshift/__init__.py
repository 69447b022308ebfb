"""Combinatorial model of binary shifts on the hyperfinite II_1 factor.

A binary shift is encoded by its bitstream; everything here is exact
GF(2) and Z/4 arithmetic on packed ints.
"""
from .bitstream import (
    Bitstream,
    EventuallyPeriodic,
    ExplicitPrefix,
    Perturbed,
    Rule,
    ValidityReport,
    format_descriptor,
    parse_descriptor,
    validate,
)
from .errors import (
    BinshiftError,
    InputError,
    InternalInconsistency,
    InvalidStream,
    MirrorPeriodic,
    NotABreakPoint,
    ParseError,
    StructureViolation,
)
from .gf2 import GF2Matrix, kernel, nullity, nullity_sequence, toeplitz
from .invariants import (
    ClassificationTable,
    CommutantIndexResult,
    Verdict,
    census,
    classify,
    commutant_index,
    parse_structure,
)
from .perturbation import BreakPoint, PerturbationResult, UKind, break_points, family, perturb
from .words import Word, adjoint, central_words, commutation_bit, format_word, multiply, parse_word, shift

__version__ = "0.1.0"
