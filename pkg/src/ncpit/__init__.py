"""Randomized black-box identity testing for sparse noncommutative polynomials."""

from .algebra import CPOLY, ZZ, CommPoly, FieldElem, Matrix, PrimeField, field_create, mat_mul, mat_pow
from .circuit import (Circuit, CircuitBlackBox, PolyBlackBox, circuit_eval, expand_to_sparse, format_circuit,
                      gen_random_instance, gen_zero_circuit, parse_circuit, sparsity_log2_bound,
                      syntactic_degree_bound)
from .isolate import check_isolating, isolating_index_set
from .ncpoly import SparseNCPoly, encode_bivariate, format_ncpoly, ncpoly_eval, ncpoly_normalize, parse_ncpoly
from .pit import TestParams, Verdict, al_identity_test, nfa_identity_test, symbolic_theorem_check

__version__ = "0.1.0"
