"""beliefcast: belief-network scenario forecasting.

Typed DAG models with an expression language, reproducible forward Monte
Carlo sampling, an exact enumeration oracle for finite-discrete networks,
scenario overlays, and a bundled quarterly oil-market model.
"""

from . import errors
from .exact import enumerate_exact
from .expr import eval_expression, parse_expression, print_expression
from .network import (
    Categorical,
    ConditionalDistribution,
    ConditionalTable,
    Constant,
    Deterministic,
    Network,
    Normal,
    Prior,
    Triangular,
    Uniform,
    build_network,
    network_to_json,
    serialize_network,
    topological_order,
    validate_parameters,
)
from .rng import RngState
from .sampling import (
    ForecastResult,
    WorldSample,
    instantiate_world,
    run_monte_carlo,
    sample_distribution,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "enumerate_exact",
    "eval_expression", "parse_expression", "print_expression",
    "Categorical", "ConditionalDistribution", "ConditionalTable", "Constant",
    "Deterministic", "Network", "Normal", "Prior", "Triangular", "Uniform",
    "build_network", "network_to_json", "serialize_network",
    "topological_order", "validate_parameters",
    "RngState",
    "ForecastResult", "WorldSample", "instantiate_world", "run_monte_carlo",
    "sample_distribution", "summarize",
    "__version__",
]
