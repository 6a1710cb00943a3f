"""Genetic programming of benchmark functions that separate two optimizers."""
from .behavior import BehaviorScore, behavioral_distance, evaluate_pair, wasserstein_1d
from .bench import LiftedFunction, ValidationReport, baseline, delta_f, delta_x, lift, validate
from .engine import Archive, Elite, EngineConfig, best_separating, evolve, generate_batch
from .expr import Domain, ParseError, evaluate, evaluate_batch, parse, random_tree, to_sexpr
from .fla import DescriptorVector, fdc, neutrality, to_bin
from .optim import OptimizerConfig, SolutionTrace, preset, run

__version__ = "0.1.0"
