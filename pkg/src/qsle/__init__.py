"""Exact Uq(sl2) vectors for multiple-SLE partition functions, closed forms and a Loewner sampler."""

from .qfield import LaurentPoly, QRat, Q, qnum, qfact
from .uqsl2 import TensorVector, act_generator, singlet, singlet_project_hat
from .linkpatterns import LinkPattern, enumerate_patterns, parse_pattern
from .purevectors import PureVectorTable, build_table, dual_functional, symmetric_vector
from .boundaryvisits import VisitOrder, build_bvisit
from .interface import VerificationReport, load_table, serialize_table

__all__ = [
    "LaurentPoly", "QRat", "Q", "qnum", "qfact",
    "TensorVector", "act_generator", "singlet", "singlet_project_hat",
    "LinkPattern", "enumerate_patterns", "parse_pattern",
    "PureVectorTable", "build_table", "dual_functional", "symmetric_vector",
    "VisitOrder", "build_bvisit",
    "VerificationReport", "load_table", "serialize_table",
]

__version__ = "0.1.0"
