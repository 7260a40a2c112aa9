"""Two-variable means, their difference measures and inequalities among them."""

__version__ = "0.1.0"

from meanforge.means import (  # noqa: E402
    DomainError,
    MeanforgeError,
    MeanKind,
    PositivePair,
    PreconditionError,
    ToleranceConfig,
    mean,
    mean_values,
    power_mean,
)
from meanforge.generating import DifferenceKind, difference, generating_function  # noqa: E402
from meanforge.convexity import GridSpec, certify_convexity  # noqa: E402
from meanforge.ratios import RatioPair, derive_inequality, profile  # noqa: E402
from meanforge.sampling import SamplingSpec  # noqa: E402
from meanforge.chains import builtin_chains, get_chain, verify_chain, verify_chains  # noqa: E402

__all__ = [
    "__version__",
    "DomainError",
    "MeanforgeError",
    "MeanKind",
    "PositivePair",
    "PreconditionError",
    "ToleranceConfig",
    "mean",
    "mean_values",
    "power_mean",
    "DifferenceKind",
    "difference",
    "generating_function",
    "GridSpec",
    "certify_convexity",
    "RatioPair",
    "derive_inequality",
    "profile",
    "SamplingSpec",
    "builtin_chains",
    "get_chain",
    "verify_chain",
    "verify_chains",
]
