"""Reflection-based phase minimization for MZI-mesh photonic neural networks."""
from .exceptions import BudgetExceededError, InvalidInputError, NumericalFailureError, ParseError
from .mesh import (MeshDecomposition, MziPhase, PhaseDeviation, decompose_clements, deviate,
                   deviate_mesh, fidelity_surface, mzi_transfer, reconstruct)
from .network import (AccuracyReport, Dataset, GaussianPhaseNoise, Ipnn, Ranked,
                      RankedPerturbationSpec, classify, forward, make_teacher, perturb_network,
                      phase_histogram, robustness_sweep)
from .numerics import SvdTriple, fidelity, is_unitary, svd
from .reflect import (AnnealingSchedule, LayerFactorization, Reflector, SearchResult,
                      apply_reflector, exhaustive_search, factorize, optimize_network,
                      phase_objective, sa_search)

__version__ = "0.1.0"
