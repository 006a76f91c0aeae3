"""Approximation algorithms for complex-demand knapsack and submodular quadratic
maximisation under a quadratic capacity, in exact rational arithmetic."""

from .errors import Infeasible, InvalidInput, InvariantBreach, SosschedError
from .maxsub import solve_maxsub
from .model import MaxSubInstance, MinCkpInstance, load_instance, save_instance
from .ptas import solve_ptas
from .relax import nlp_solve, nlp_t_feasible

__version__ = "0.1.0"

__all__ = ["Infeasible", "InvalidInput", "InvariantBreach", "SosschedError", "solve_maxsub",
           "MaxSubInstance", "MinCkpInstance", "load_instance", "save_instance", "solve_ptas",
           "nlp_solve", "nlp_t_feasible"]
