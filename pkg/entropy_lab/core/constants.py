"""Constants using StrEnum and Final types."""

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        """Backport of enum.StrEnum for Python < 3.11."""

        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):  # type: ignore[no-untyped-def]
            return name.lower()
from typing import Final

TOOL_VERSION: Final[str] = "0.1.0"


class Command(StrEnum):
    """Experiment subcommands exposed by the CLI."""

    CONSTANTS = "constants"
    DEFICIT = "deficit"
    NASH_SCAN = "nash-scan"
    LIMIT_TRACE = "limit-trace"
    BUBBLE_FIT = "bubble-fit"
    B_SEARCH = "b-search"
    MINIMIZE = "minimize"
    B_TRACE = "b-trace"
    FIRST_CONSTANT = "first-constant"


class FamilyName(StrEnum):
    """Analytic radial profile families on R^n."""

    STRETCHED_EXP = "stretched_exp"
    GAUSSIAN_MIXTURE = "gaussian_mixture"
    BUMP_MIXTURE = "bump_mixture"
    FIXED = "fixed"
    DEFAULT = "default"


class ZonalFamilyName(StrEnum):
    """Zonal profile families on the round sphere."""

    CONSTANT = "constant"
    COSINE = "cosine"
    BUBBLE = "bubble"
    DEFAULT = "default"


class Observable(StrEnum):
    """Bubble integrals fitted against their small-scale expansion."""

    MASS = "mass"
    ENTROPY = "entropy"
    ENERGY = "energy"


class OutputFormat(StrEnum):
    """Report file formats."""

    CSV = "csv"
    JSON = "json"


class RowStatus(StrEnum):
    """Status column values for emitted rows."""

    OK = "ok"
    NONFINITE = "nonfinite"
    NOT_CONVERGED = "not_converged"
    PRECISION_FLOOR = "precision_floor"
    ILL_CONDITIONED = "ill_conditioned"


FLAGGED_STATUSES: Final[frozenset[str]] = frozenset(
    {
        RowStatus.NONFINITE,
        RowStatus.NOT_CONVERGED,
        RowStatus.PRECISION_FLOOR,
    }
)

# every emitted row carries these, empty where they do not apply
METADATA_COLUMNS: Final[tuple[str, ...]] = ("n", "p", "q", "seed", "tool_version")


class QuadratureDefaults:
    """Adaptive quadrature and sampling defaults."""

    EPSREL: Final[float] = 1e-11
    LIMIT: Final[int] = 200
    ACCEPT_ERR: Final[float] = 1e-8
    NORMALIZATION_TOL: Final[float] = 1e-8
    TAIL_LOG_DECAY: Final[float] = 60.0
    TAIL_FRACTION_MAX: Final[float] = 1e-12
    SAMPLED_NODES: Final[int] = 2000
    ZONAL_NODES: Final[int] = 2001


class OptimizerDefaults:
    """Multi-start simplex search defaults."""

    RESTARTS: Final[int] = 8
    MAX_EVALS: Final[int] = 400
    SEED: Final[int] = 0
    TIE_TOL: Final[float] = 1e-12
    PENALTY: Final[float] = 1e10
    START_ATTEMPTS: Final[int] = 20


class BubbleDefaults:
    """Geodesic bubble defaults on the round sphere."""

    DELTA: Final[float] = 0.5
    EPS_GRID: Final[tuple[float, ...]] = (0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08)
    NODES_PER_EPS: Final[int] = 80
    OUTER_NODES: Final[int] = 400
    MIN_FIT_POINTS: Final[int] = 6


class MinimizerDefaults:
    """Penalized Nash functional descent defaults."""

    NODES: Final[int] = 201
    MAX_ITER: Final[int] = 5000
    MU: Final[float] = 1e-8
    EL_TOL: Final[float] = 1e-4
    RELATION_TOL: Final[float] = 1e-6
    INIT_BUBBLE_WEIGHT: Final[float] = 0.05
    INIT_BUBBLE_EPS: Final[float] = 0.3


class ScanDefaults:
    """Default grids of the CLI experiments."""

    # fractions f of q = 1 + f (p - 1); p = 2 gives 1.0, 1.5, 1.8, 1.95, 1.99
    NASH_Q_FRACTIONS: Final[tuple[float, ...]] = (0.0, 0.5, 0.8, 0.95, 0.99)
    TRACE_Q_FRACTIONS: Final[tuple[float, ...]] = (0.5, 0.8, 0.9, 0.95, 0.99)
    LIMIT_EXPONENTS: Final[tuple[int, ...]] = (1, 2, 3, 4, 5, 6)
    PRECISION_FLOOR: Final[float] = 1e-7
