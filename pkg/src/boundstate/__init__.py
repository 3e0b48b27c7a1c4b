"""Analysis of 1D quantum bound states: moments and uncertainty products with
finite/divergent classification, potential reconstruction, Numerov
eigenstates, and asymptotic decay verdicts."""

from .decay import Agreement, DecayReport, Verdict, classify, classify_radial, consistency_check
from .eigensolver import Eigenpair, SolverConfig, solve_state, solve_states, verify_eigenpair
from .errors import (
    BoundStateError,
    BoxTooSmall,
    BracketError,
    DerivativeUndefined,
    DomainError,
    ExpressionSyntaxError,
    ManifestError,
    NodeInDomain,
    NoConvergence,
    NotNormalizable,
    SolverError,
    UnknownIdentifier,
    UnknownName,
)
from .expr import Expression, eval_jet2, evaluate, parse
from .gamma import gamma, polygamma01
from .inverse import PotentialGrid, reconstruct_potential, reconstruct_symbolic_check
from .observables import MomentReport, mean_p, mean_p2, mean_x, mean_x2, uncertainty_report
from .quadrature import (
    ExtendedReal,
    QuadConfig,
    TailModel,
    integrate_finite,
    integrate_half_line,
    integrate_real_line,
    tail_exponent,
)
from .wavefunction import Units, Wavefunction, catalog, count_nodes, from_expression, sample

__version__ = "0.1.0"
