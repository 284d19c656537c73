"""Mixed binary-continuous black-box optimization.

CatCMA couples a CMA-ES Gaussian model for the continuous variables with a
margin-bounded Bernoulli model for the binary variables. Two treatments
address interactions between the two variable groups: warm-starting (the
binary model is frozen while the continuous model adapts against a shared
binary draw per iteration) and hyper-representation (the continuous
variable is replaced by the parameters of an affine map from bits to
reals). Both together form ICatCMA. The package ships interaction test
problems and a benchmark harness that measures success rates over seeded
trials.
"""

from .bench import RunConfig, RunRecord, aggregate, run_single, run_suite, write_results
from .catcma import Candidate, CatCMA, Termination
from .errors import RunAborted
from .gaussian import Hyperparameters, default_hyperparameters
from .problems import ProblemInstance, evaluate, generate_instance, optimum
from .treatments import CatCMAVariant, WarmStartConfig, make_icatcma, wrap_objective

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "CatCMA",
    "CatCMAVariant",
    "Hyperparameters",
    "ProblemInstance",
    "RunAborted",
    "RunConfig",
    "RunRecord",
    "Termination",
    "WarmStartConfig",
    "aggregate",
    "default_hyperparameters",
    "evaluate",
    "generate_instance",
    "make_icatcma",
    "optimum",
    "run_single",
    "run_suite",
    "wrap_objective",
    "write_results",
]
