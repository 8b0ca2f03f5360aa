"""Finite-scale workbench for partition regularity of linear systems.

The modules mirror the layers of the subject: exact matrices and Rado's
columns property (:mod:`partreg.matrix`), truncated systems
(:mod:`partreg.systems`), window set arithmetic and lemma checks
(:mod:`partreg.sumsets`), exhaustive colouring search and SAT export
(:mod:`partreg.search`), and the constructive executor (:mod:`partreg.proof`).
"""

from .coloring import Coloring
from .errors import (DimensionError, MalformedInputError, PartregError, SolverError,
                     TooLargeError, WindowError)
from .matrix import (ColumnsCertificate, SparseIntMatrix, columns_property, evaluate_image,
                     in_span, verify_certificate)
from .proof import ProofParams, ProofTrace, execute_proof
from .search import export_cnf, forced, min_forcing_N, mono_witness, solve_external
from .sumsets import (LemmaReport, WindowSet, check_new_lemma, check_symmetric_lemma,
                      check_translated_lemma, diffset, filter_above, iterate, lcm_bound, scale,
                      sumset, window_density)
from .systems import (LinearSystem, VarName, ap3_system, gen_bhl_kernel, gen_dh_truncation,
                      gen_finite_system, gen_nearmiss_kernel, schur_system, transform_nearmiss)

__version__ = "0.1.0"

__all__ = [
    "Coloring", "ColumnsCertificate", "DimensionError", "LemmaReport", "LinearSystem",
    "MalformedInputError", "PartregError", "ProofParams", "ProofTrace", "SolverError",
    "SparseIntMatrix", "TooLargeError", "VarName", "WindowError", "WindowSet", "ap3_system",
    "check_new_lemma", "check_symmetric_lemma", "check_translated_lemma", "columns_property",
    "diffset", "evaluate_image", "execute_proof", "export_cnf", "filter_above", "forced",
    "gen_bhl_kernel", "gen_dh_truncation", "gen_finite_system", "gen_nearmiss_kernel",
    "in_span", "iterate", "lcm_bound", "min_forcing_N", "mono_witness", "scale",
    "schur_system", "solve_external", "sumset", "transform_nearmiss", "verify_certificate",
    "window_density",
]
