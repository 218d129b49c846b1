"""Spectral theory of self-adjoint discrete d-dimensional Sturm-Liouville problems."""
from .errors import DiscreteSLError, NumericalError, ValidationError
from .numkernel import DEFAULT_TOL, InertiaSignature, Tolerances
from .problem import BoundaryChart, BoundaryRaw, SLEquation, canonicalize, chart_to_raw, dirichlet, neumann
from .spectrum import Spectrum, count_formula, eigenfunction, eigenvalues, pencil_oracle
from .classify import (
    SKA,
    SKD,
    T_matrix,
    bc_layer,
    bc_signature,
    eq_signature,
    nondegenerate,
    predict_jump,
)
from .atkinson import AtkinsonProblem, atkinson_classify, atkinson_count, atkinson_spectrum

__version__ = "0.1.0"
