"""ltlq: policy synthesis for LTL objectives on unknown MDPs.

Builds the product of a labeled MDP with a limit-deterministic Buchi
automaton, learns a maximizing policy model-free with an accepting-state
reward/discount scheme, and verifies it against an exact model-checking
oracle.
"""

from .config import ExperimentConfig, load_config
from .errors import EpsilonCycleError, LtlqError, ParseError, ValidationError
from .ldba import Ldba, StateLasso, buchi_accepts, ldba_step, parse_ldba, render_ldba
from .learn import LearnConfig, ProductEnv, QTable, greedy_policy, q_update, run_learning
from .ltl import LassoWord, check_lasso, parse_ltl
from .mdp import (
    GridSpec,
    LabeledMdp,
    MarkovChain,
    MemorylessPolicy,
    bsccs,
    build_gridworld,
    induce_chain,
    parse_grid,
    parse_mdp,
    sample_step,
)
from .oracle import (
    max_buchi_probability,
    mec_decomposition,
    optimal_discounted_values,
    policy_buchi_probability,
    policy_discounted_value,
)
from .product import LdbaController, ProductMdp, build_product, project_policy
from .reward import RewardScheme, gamma_b_schedule, return_of, reward_of

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "load_config",
    "EpsilonCycleError",
    "LtlqError",
    "ParseError",
    "ValidationError",
    "Ldba",
    "StateLasso",
    "buchi_accepts",
    "ldba_step",
    "parse_ldba",
    "render_ldba",
    "LearnConfig",
    "ProductEnv",
    "QTable",
    "greedy_policy",
    "q_update",
    "run_learning",
    "LassoWord",
    "check_lasso",
    "parse_ltl",
    "GridSpec",
    "LabeledMdp",
    "MarkovChain",
    "MemorylessPolicy",
    "bsccs",
    "build_gridworld",
    "induce_chain",
    "parse_grid",
    "parse_mdp",
    "sample_step",
    "max_buchi_probability",
    "mec_decomposition",
    "optimal_discounted_values",
    "policy_buchi_probability",
    "policy_discounted_value",
    "LdbaController",
    "ProductMdp",
    "build_product",
    "project_policy",
    "RewardScheme",
    "gamma_b_schedule",
    "return_of",
    "reward_of",
    "__version__",
]
