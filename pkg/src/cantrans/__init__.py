"""Numerical verification of canonical transformations on a global
canonical chart: Poisson brackets, Hamiltonian flows, generating
functions, invariance and the Noether correspondence, all to configurable
tolerance.
"""

from . import backend, errors
from .brackets import (constancy_residual, evolution_vector_field,
                       hamiltonian_vector_field, poisson_bracket)
from .canonicity import (CanonicityReport, RecoveredHamiltonian,
                         bracket_canonicity, mixed_covector,
                         mixed_covector_asymmetry, recover_new_hamiltonian,
                         symplectic_defect, time_dependent_canonicity)
from .config import JobConfig
from .dual import Dual
from .expr import Bindings, Expr, evaluate, parse, to_source
from .fixtures import get_fixture, list_examples
from .flows import (FlowPhaseMap, check_group_law, flow_map,
                    infinitesimal_generator, integrate_flow,
                    recover_generator_function)
from .genfun import (InfinitesimalMap, NewtonOptions, Type1GeneratingMap,
                     Type2GeneratingMap, infinitesimal_map, map_from_f1,
                     map_from_f2)
from .numdiff import (fd_gradient, fd_hessian, fd_jacobian, gradient,
                      hessian, jacobian)
from .phase import (Chart, ExprPhaseMap, ExtendedPoint, MapFamily, PhaseMap,
                    PhasePoint, ScalarField, TangentVector,
                    standard_symplectic_matrix)
from .reports import CheckReport, ReportDocument
from .symmetry import (equivalence_chain, invariance_defect, noether_forward,
                       noether_reverse, symmetry_defect,
                       symmetry_defect_pullback)

__version__ = "0.1.0"

__all__ = [
    "backend", "errors", "__version__",
    # expressions
    "parse", "evaluate", "to_source", "Expr", "Bindings", "Dual",
    # chart and fields
    "Chart", "PhasePoint", "ExtendedPoint", "TangentVector", "ScalarField",
    "PhaseMap", "ExprPhaseMap", "MapFamily", "standard_symplectic_matrix",
    # derivatives
    "gradient", "hessian", "jacobian", "fd_gradient", "fd_jacobian",
    "fd_hessian",
    # brackets and fields
    "poisson_bracket", "hamiltonian_vector_field", "evolution_vector_field",
    "constancy_residual",
    # flows
    "integrate_flow", "flow_map", "FlowPhaseMap", "check_group_law",
    "infinitesimal_generator", "recover_generator_function",
    # canonicity
    "bracket_canonicity", "symplectic_defect", "time_dependent_canonicity",
    "mixed_covector", "mixed_covector_asymmetry", "recover_new_hamiltonian",
    "CanonicityReport", "RecoveredHamiltonian",
    # generating functions
    "map_from_f1", "map_from_f2", "infinitesimal_map", "NewtonOptions",
    "Type1GeneratingMap", "Type2GeneratingMap", "InfinitesimalMap",
    # symmetry
    "invariance_defect", "symmetry_defect", "symmetry_defect_pullback",
    "noether_forward", "noether_reverse", "equivalence_chain",
    # reports and jobs
    "CheckReport", "ReportDocument", "JobConfig", "list_examples",
    "get_fixture",
]
