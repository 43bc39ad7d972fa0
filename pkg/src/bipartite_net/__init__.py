"""Bipartite consensus analysis for weakly connected matrix-weighted networks."""
from .conditions import (BIPARTITE_PREDICTED, UNDETERMINED, ConditionReport, Relation, Verdict,
                         classify_paths, full_report, gamma0, gamma0_bar, gamma_nullity_oracle)
from .dynamics import SimConfig, SimTrace, e_b, e_b_series, integrate, integrate_laplacian
from .fixtures import BUILTINS, builtin
from .linalg import DEFAULT_TOL, SignClass, Subspace, Tolerances, classify_sign, intersect
from .netfile import NetworkFormatError, load_network, parse_network, render_network
from .network import GraphValidationError, MatrixGraph, incidence_factorization, laplacian
from .report import analyze, report_document, verify
from .spectral import analyze_null, bipartite_structure, check_containment, steady_state
from .topology import (Bipartition, EnumerationLimitError, NbsRecord, decompose_continents,
                       find_all_nbs, semidefinite_paths)

__version__ = "0.1.0"
