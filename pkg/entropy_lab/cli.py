import argparse
from collections.abc import Callable, Sequence
from typing import Any

from .config import RunConfig, load_config_file, merge
from .core.config import LAB_CONFIG
from .core.constants import (
    TOOL_VERSION,
    BubbleDefaults,
    Command,
    Observable,
    OutputFormat,
    ScanDefaults,
)
from .core.exceptions import ConfigError, DomainError, EntropyLabError
from .core.reporting import with_metadata, write_records
from .core.utils import build_record
from .inequalities.closedform import a0_constant, extremal_spec, moments
from .inequalities.families import family_by_name
from .inequalities.minimizer import b_lower_trace, minimize_j
from .inequalities.nash import entropy_limit_trace, monotonicity_scan
from .inequalities.radial import (
    RadialFunction,
    RadialProfile,
    evaluate,
    extremal_profile,
    gaussian,
    holder_interpolation_check,
)
from .inequalities.sphere import (
    b_search,
    bubble_curvature_coefficient,
    expansion_fit,
    first_constant_scan,
    sphere_volume,
    zonal_family_by_name,
)
from .logging_config import get_logger, set_run_context, setup_logging
from .models import Params

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FLAGGED = 1
EXIT_INVALID = 2

Records = list[dict[str, Any]]


def q_grid_from_fractions(p: float, fractions: Sequence[float]) -> tuple[float, ...]:
    """q = 1 + f (p - 1) for each fraction f."""
    return tuple(1.0 + f * (p - 1.0) for f in fractions)


def _common(config: RunConfig) -> dict[str, Any]:
    return {"seed": config.seed, "tool_version": TOOL_VERSION}


def _constants(config: RunConfig) -> Records:
    params = Params(config.n, config.p, config.q)
    n, p = params.n, params.p
    spec = extremal_spec(n, p)
    record = build_record(
        n=n,
        p=p,
        q=params.q,
        A0=a0_constant(n, p),
        theta=params.theta if params.q is not None else None,
        p_star=params.p_star,
        s=spec.s,
        a=spec.a,
        b=spec.b,
        literature_prefactor=spec.literature_prefactor,
        sphere_volume=sphere_volume(n),
        curvature_coefficient=bubble_curvature_coefficient(n, p),
        **moments(n, p).as_dict(),
        **_common(config),
    )
    return [record]


NAMED_PROFILES: dict[str, Callable[[int, float], RadialFunction]] = {
    "extremal": extremal_profile,
    "gaussian": lambda n, p: gaussian().normalized(n, p),
}


def _profiles(config: RunConfig) -> list[RadialFunction]:
    """Named profiles or a sampled CSV; both named profiles when none is given."""
    n, p = config.n, config.p
    Params(n, p)
    if not config.profile:
        return [build(n, p) for build in NAMED_PROFILES.values()]
    if config.profile in NAMED_PROFILES:
        return [NAMED_PROFILES[config.profile](n, p)]
    try:
        profile, metadata = RadialProfile.from_csv(config.profile)
    except (OSError, KeyError, ValueError) as e:
        raise ConfigError(f"cannot load profile {config.profile!r}: {e}") from e
    logger.info(f"loaded {config.profile}: {metadata}")
    return [profile]


def _deficit(config: RunConfig) -> Records:
    params = Params(config.n, config.p)
    records = []
    for profile in _profiles(config):
        report = evaluate(profile, params)
        extra: dict[str, Any] = {}
        if report.deficit is not None:
            ent, bound = holder_interpolation_check(profile, params.n, params.p)
            extra = {"holder_bound": bound, "holder_gap": bound - ent}
        records.append(report.to_record(**extra, **_common(config)))
    return records


def _nash_scan(config: RunConfig) -> Records:
    q_grid = config.q_grid or q_grid_from_fractions(config.p, ScanDefaults.NASH_Q_FRACTIONS)
    rows = monotonicity_scan(
        config.n,
        config.p,
        q_grid,
        family_by_name(config.family),
        config.budget,
        workers=config.workers,
    )
    return [row.to_record() for row in rows]


def _limit_trace(config: RunConfig) -> Records:
    p = config.p
    q_sequence = config.q_grid or tuple(p - 10.0**-k for k in ScanDefaults.LIMIT_EXPONENTS)
    records = []
    for profile in _profiles(config):
        trace = entropy_limit_trace(profile, config.n, p, q_sequence)
        label = profile.describe()
        records.extend(
            {**r, "profile": label, "first_order": trace.first_order, "seed": config.seed}
            for r in trace.to_records()
        )
    return records


def _bubble_fit(config: RunConfig) -> Records:
    observables = [config.observable] if config.observable else list(Observable)
    return [
        expansion_fit(config.n, config.p, config.eps_grid, observable, config.delta).to_record(
            seed=config.seed
        )
        for observable in observables
    ]


def _b_search(config: RunConfig) -> Records:
    a_value = config.a_factor * a0_constant(config.n, config.p)
    result = b_search(
        config.n, config.p, a_value, zonal_family_by_name(config.family), config.budget
    )
    return [result.to_record()]


def _minimize(config: RunConfig) -> Records:
    if config.q is None:
        raise DomainError("minimize requires q")
    result = minimize_j(
        config.n, config.p, config.q, config.c_value, budget=config.max_iter, nodes=config.nodes
    )
    return [result.to_record(seed=config.seed)]


def _b_trace(config: RunConfig) -> Records:
    q_grid = config.q_grid or q_grid_from_fractions(config.p, ScanDefaults.TRACE_Q_FRACTIONS)
    nash_family = family_by_name(config.nash_family) if config.nash_family else None
    rows = b_lower_trace(
        config.n,
        config.p,
        q_grid,
        zonal_family_by_name(config.family),
        config.budget,
        nash_family=nash_family,
        max_iter=config.max_iter,
        nodes=config.nodes,
    )
    return [row.to_record() for row in rows]


def _first_constant(config: RunConfig) -> Records:
    rows = first_constant_scan(
        config.n, config.p, config.a_factor, config.b_value, config.eps_grid, config.delta
    )
    return [row.to_record(seed=config.seed) for row in rows]


EXPERIMENTS: dict[Command, Callable[[RunConfig], Records]] = {
    Command.CONSTANTS: _constants,
    Command.DEFICIT: _deficit,
    Command.NASH_SCAN: _nash_scan,
    Command.LIMIT_TRACE: _limit_trace,
    Command.BUBBLE_FIT: _bubble_fit,
    Command.B_SEARCH: _b_search,
    Command.MINIMIZE: _minimize,
    Command.B_TRACE: _b_trace,
    Command.FIRST_CONSTANT: _first_constant,
}


# row order of the multi-row experiments
SORT_KEYS: dict[Command, tuple[str, ...]] = {
    Command.NASH_SCAN: ("q",),
    Command.LIMIT_TRACE: ("profile", "q"),
    Command.BUBBLE_FIT: ("observable",),
    Command.B_TRACE: ("q",),
    Command.FIRST_CONSTANT: ("eps",),
}


def run(config: RunConfig) -> int:
    """Run one experiment and write its rows.

    Returns:
        0 on success, 1 if any row is flagged or a numerical failure occurred,
        2 if the configuration violates a precondition or the output cannot
        be written
    """
    try:
        records = EXPERIMENTS[config.command](config)
    except (DomainError, ConfigError) as e:
        logger.error(f"{config.command}: {e}")
        return EXIT_INVALID
    except EntropyLabError as e:
        logger.error(f"{config.command} failed: {e}")
        return EXIT_FLAGGED

    metadata = {
        "n": config.n,
        "p": config.p,
        "q": config.q,
        "seed": config.seed,
        "tool_version": TOOL_VERSION,
    }
    try:
        flagged = write_records(
            with_metadata(records, metadata),
            config.output,
            config.fmt,
            sort_keys=SORT_KEYS.get(config.command, ()),
        )
    except OSError as e:
        error = ConfigError(f"cannot write {config.output!r}: {e}")
        logger.error(f"{config.command}: {error}")
        return EXIT_INVALID
    if flagged:
        logger.warning(f"{config.command}: {flagged} flagged rows")
        return EXIT_FLAGGED
    return EXIT_OK


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per experiment and shared flags."""
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", type=str, help="Flat key = value config file")
    shared.add_argument("--n", type=int, help="Dimension (default: 3)")
    shared.add_argument("--p", type=float, help="Exponent p in (1, 2] with p < n (default: 2)")
    shared.add_argument("--q", type=float, help="Subcritical exponent 1 ≤ q < p")
    shared.add_argument("--q-grid", type=_float_list, help="Comma-separated q values")
    shared.add_argument("--eps-grid", type=_float_list, help="Comma-separated bubble scales")
    shared.add_argument("--family", type=str, help="Profile family name (default: default)")
    shared.add_argument(
        "--nash-family", type=str, help="Euclidean family for N_ref in b-trace (default: A0)"
    )
    shared.add_argument("--restarts", type=int, help="Search restarts per family member")
    shared.add_argument("--max-evals", type=int, help="Evaluations per restart")
    shared.add_argument("--seed", type=int, help="Base seed (default: 0)")
    shared.add_argument("--output", type=str, help="Output path, '-' for stdout (default: -)")
    shared.add_argument(
        "--format", dest="fmt", choices=[f.value for f in OutputFormat], help="csv or json"
    )
    shared.add_argument(
        "--delta", type=float, help=f"Bubble cutoff radius (default: {BubbleDefaults.DELTA})"
    )
    shared.add_argument("--c", dest="c_value", type=float, help="Penalty constant C")
    shared.add_argument("--a-factor", type=float, help="First constant as a multiple of A0")
    shared.add_argument("--b", dest="b_value", type=float, help="Second constant B")
    shared.add_argument(
        "--observable", choices=[o.value for o in Observable], help="Bubble observable"
    )
    shared.add_argument(
        "--profile", type=str, help="extremal, gaussian or a sampled radial profile CSV"
    )
    shared.add_argument("--workers", type=int, help="Worker processes for scans")
    shared.add_argument("--max-iter", type=int, help="Descent iteration budget")
    shared.add_argument("--nodes", type=int, help="Colatitude nodes of the minimizer grid")
    shared.add_argument(
        "--log-level", type=str, default=None, help="Logging level (default: INFO)"
    )
    shared.add_argument("--log-file", type=str, default=None, help="Path to log file")

    parser = argparse.ArgumentParser(
        prog="entropy-lab",
        description="Numerical experiments on sharp Lp-entropy and Nash inequalities",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for command in Command:
        commands.add_parser(command.value, parents=[shared])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run an experiment with CLI argument support."""
    args = vars(build_parser().parse_args(argv))
    config_path = args.pop("config")
    log_level = args.pop("log_level") or LAB_CONFIG.log_level
    log_file = args.pop("log_file") or LAB_CONFIG.log_file or None

    try:
        setup_logging(level=log_level, include_timestamp=False, log_file=log_file)
    except AttributeError:
        setup_logging(level="INFO", include_timestamp=False)
        logger.error(f"unknown log level {log_level!r}")
        return EXIT_INVALID

    try:
        file_values = load_config_file(config_path) if config_path else {}
        config = RunConfig.from_mapping(merge(file_values, args))
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_INVALID

    set_run_context(config.command, config.seed)
    logger.debug(f"running {config}")
    try:
        return run(config)
    finally:
        set_run_context()


if __name__ == "__main__":
    raise SystemExit(main())
