"""qleak: exact leakage analysis of nested rank-metric coset codes via q-polymatroids."""

from .errors import BudgetExceeded, FieldError, InputError, QLeakError, VerificationFailure
from .gf import GF, ExtBasis, FieldCtx, FieldElement
from .subspace import BilinearForm, Subspace, span
from .code import MatrixCode, VectorCode, dual, expand, gabidulin, shorten
from .polymatroid import QPolymatroid, from_code, uniform, verify_axioms
from .access import AccessStructure, Port, gamma_min, port, predicates
from .leakage import Entropy, NestedPair, Observation

__version__ = "0.1.0"

__all__ = [
    "AccessStructure",
    "BilinearForm",
    "BudgetExceeded",
    "Entropy",
    "ExtBasis",
    "FieldCtx",
    "FieldElement",
    "FieldError",
    "GF",
    "InputError",
    "MatrixCode",
    "NestedPair",
    "Observation",
    "Port",
    "QLeakError",
    "QPolymatroid",
    "Subspace",
    "VectorCode",
    "VerificationFailure",
    "dual",
    "expand",
    "from_code",
    "gabidulin",
    "gamma_min",
    "port",
    "predicates",
    "shorten",
    "span",
    "uniform",
    "verify_axioms",
]
