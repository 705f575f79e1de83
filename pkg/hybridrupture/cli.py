"""
linha de comando: hybridrupture {run, converge, bench, plot, preset}.
"""

import os
import sys
import logging
import argparse
import functools
from typing import Optional, Sequence

from .core.config import RunConfig
from .core.env_handler import EnvHandler
from .core.simulation_handler import SimulationHandler
from .core.harness import scenario_family, converge, bench, hybrid_runner
from .core.plotting import plot, PLOT_KINDS
from .core.scenarios import PRESETS
from .core.utils import Path, dump_json
from .core.messeger import BENCH_WARMUP, BENCH_STEPS, BENCH_HISTORY, CFL_SAFETY
from .exceptions import (
    HybridRuptureBaseExceptions,
    InvalidGridException,
    InvalidMaterialException,
    RegionOutsideStripException,
    InvalidFaultException,
    NucleationOutsideFaultException,
    ZeroNodalMassException,
    InvalidScenarioException,
    InvalidConfigException,
    UnexpectedTypeException,
    UnexpectedValueException,
    UnsupportedMaterialException,
    NonNestedGridsException,
    UnknownPlotKindException,
    InstabilityException,
    NonFiniteFieldException,
    OutputWriteException,
    PathNotFoundException,
    NotFileException,
    NotDirectoryException,
    PathExistsException
)

logger = logging.getLogger("hybridrupture")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_INSTABILITY = 3
EXIT_IO = 4

_VALIDATION = (
    InvalidGridException,
    InvalidMaterialException,
    RegionOutsideStripException,
    InvalidFaultException,
    NucleationOutsideFaultException,
    ZeroNodalMassException,
    InvalidScenarioException,
    InvalidConfigException,
    UnexpectedTypeException,
    UnexpectedValueException,
    UnsupportedMaterialException,
    NonNestedGridsException,
    UnknownPlotKindException
)
_INSTABILITY = (InstabilityException, NonFiniteFieldException)
_IO = (OutputWriteException, PathNotFoundException, NotFileException, NotDirectoryException, PathExistsException, OSError)


def exit_code(error: BaseException) -> int:
    """código de saída da família do erro."""
    if isinstance(error, _VALIDATION):
        return EXIT_VALIDATION
    if isinstance(error, _INSTABILITY):
        return EXIT_INSTABILITY
    if isinstance(error, _IO):
        return EXIT_IO
    return EXIT_FAILURE


def _runner_options(config: RunConfig, env: EnvHandler) -> dict:
    return {
        "provider": config.kernel_provider(),
        "t_max": config.kernels["t_max"],
        "threads": config.effective_threads(env),
        "safety": config.time_step.get("safety", CFL_SAFETY)
    }


def _write_table(table, output: Optional[str], default: Path) -> Path:
    path = Path(output) if output else default
    Path(os.path.dirname(str(path)) or ".").mkdir(exists_ok=True)
    table.save(path)
    print(path)
    return path


def command_run(args: argparse.Namespace, env: EnvHandler) -> int:
    config = RunConfig.load(Path(args.config))
    if args.threads is not None:
        config.threads = args.threads

    handler = SimulationHandler(config, env, Path(args.output) if args.output else None)
    every = max(1, args.progress)

    def progress(step: int, time: float, max_rate: float, extent: tuple[float, float]):
        if step % every == 0:
            logger.debug("step %d t=%.4f s max|v|=%.4g m/s front=(%.0f, %.0f) m", step, time, max_rate, *extent)

    artifacts = handler.run(progress)
    print(artifacts.directory)
    if artifacts.status == "unstable":
        logger.error("%s", artifacts.manifest.get("diagnostic"))
        return EXIT_INSTABILITY
    return EXIT_OK


def command_converge(args: argparse.Namespace, env: EnvHandler) -> int:
    config = RunConfig.load(Path(args.config))
    runner = functools.partial(hybrid_runner, **_runner_options(config, env))
    table = converge(scenario_family(config), args.dx, args.reference, args.time, args.fault, runner)
    _write_table(table, args.output, env.output_root.join("convergence.json"))
    return EXIT_OK


def command_bench(args: argparse.Namespace, env: EnvHandler) -> int:
    table = bench(args.n1n3, args.n2, dx=args.dx, threads=max(1, min(args.threads, env.threads)), warmup=args.warmup, steps=args.steps, history=args.history)
    _write_table(table, args.output, env.output_root.join("bench.json"))
    return EXIT_OK


def command_plot(args: argparse.Namespace, env: EnvHandler) -> int:
    for path in plot(Path(args.artifact), args.kind, Path(args.output) if args.output else None):
        print(path)
    return EXIT_OK


def command_preset(args: argparse.Namespace, env: EnvHandler) -> int:
    options = {key: value for key, value in (("duration", args.duration), ("l2", args.l2)) if value is not None}
    config = RunConfig.from_preset(args.name, args.dx, **options)
    config.resolve_scenario()
    if args.output:
        print(config.save(Path(args.output)))
    else:
        print(dump_json(config.to_dict()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridrupture", description="hybrid finite-element / spectral boundary integral dynamic rupture simulator")
    parser.add_argument("--env", default=".env", help="path of the .env file")
    parser.add_argument("--log-level", default=None, help="overrides HYBRIDRUPTURE_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a configuration and write its artifacts")
    run.add_argument("config", help="run configuration (JSON)")
    run.add_argument("-o", "--output", help="output directory (default HYBRIDRUPTURE_OUTPUT/<scenario>)")
    run.add_argument("--threads", type=int, help="overrides the configured thread count")
    run.add_argument("--progress", type=int, default=100, help="log progress every n steps (DEBUG)")
    run.set_defaults(handler=command_run)

    conv = commands.add_parser("converge", help="grid convergence of the slip field")
    conv.add_argument("config", help="run configuration (JSON)")
    conv.add_argument("--dx", type=float, nargs="+", required=True, help="grid spacings (m)")
    conv.add_argument("--reference", type=float, required=True, help="reference spacing (m)")
    conv.add_argument("--time", type=float, required=True, help="comparison time (s)")
    conv.add_argument("--fault", help="fault compared (default the first)")
    conv.add_argument("-o", "--output", help="table path (JSON)")
    conv.set_defaults(handler=command_converge)

    timing = commands.add_parser("bench", help="per-step timings of the FE strip and the SBI boundary")
    timing.add_argument("--n1n3", type=int, nargs="+", required=True, help="sides N1 = N3")
    timing.add_argument("--n2", type=int, nargs="+", required=True, help="element layers N2")
    timing.add_argument("--dx", type=float, default=100.0)
    timing.add_argument("--threads", type=int, default=1)
    timing.add_argument("--warmup", type=int, default=BENCH_WARMUP)
    timing.add_argument("--steps", type=int, default=BENCH_STEPS)
    timing.add_argument("--history", type=int, default=BENCH_HISTORY)
    timing.add_argument("-o", "--output", help="table path (JSON)")
    timing.set_defaults(handler=command_bench)

    figure = commands.add_parser("plot", help="figures of a run directory or a harness table")
    figure.add_argument("artifact")
    figure.add_argument("--kind", required=True, choices=PLOT_KINDS)
    figure.add_argument("-o", "--output", help="figure directory")
    figure.set_defaults(handler=command_plot)

    preset = commands.add_parser("preset", help="write the configuration of a preset")
    preset.add_argument("name", choices=sorted(PRESETS))
    preset.add_argument("--dx", type=float, required=True)
    preset.add_argument("--duration", type=float)
    preset.add_argument("--l2", type=float)
    preset.add_argument("-o", "--output", help="config path (default stdout)")
    preset.set_defaults(handler=command_preset)

    return parser


def main(argv: Optional[Sequence[str]]=None) -> int:
    args = build_parser().parse_args(argv)
    env = EnvHandler.unique(Path(args.env))
    logging.basicConfig(level=(args.log_level or env.log_level).upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        return args.handler(args, env)
    except (HybridRuptureBaseExceptions, OSError) as error:
        code = exit_code(error)
        logger.error("%s: %s", type(error).__name__, error)
        print(f"error: {error}", file=sys.stderr)
        return code
    except KeyboardInterrupt:
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
