"""Модуль командной строки qepot.

Подкоманды:
    run <config>    — прогон сценария из файла;
    preset <name>   — встроенные сценарии (quartic, morse, double-well);
    sample <config> — выборка Метрополиса против квадратуры;
    check           — приёмочные проверки.

Код возврата 0 только при отсутствии ошибок модулей и нарушенных порогов.
"""

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from app import __version__
from app.config import config
from app.errors import QepotError
from app.logger import setup_logger
from app.scenario.acceptance import format_outcomes, run_checks
from app.scenario.config import load_scenario
from app.scenario.output import report
from app.scenario.presets import PRESET_ALIASES, PRESETS, build_preset
from app.scenario.runner import run_scenario, sample_scenario

# Инициализация логгера
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """Создаёт парсер аргументов с подкомандами."""
    parser = argparse.ArgumentParser(
        prog="qepot", description="Effective classical potentials for 1D quantum statistics"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="Logging level")
    parser.add_argument("--quiet", action="store_true", help="Disable logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a scenario config file")
    run.add_argument("config", type=Path, help="Path to a key = value scenario file")
    run.add_argument("--out", type=Path, default=None, help="Output directory")

    preset = commands.add_parser("preset", help="Run a built-in preset")
    preset.add_argument(
        "name",
        choices=[*sorted(PRESETS), *sorted(PRESET_ALIASES)],
        help="fig1 (quartic), fig2 (morse) or fig3 (double-well)",
    )
    preset.add_argument("--out", type=Path, default=None, help="Output directory")
    preset.add_argument("--policy", choices=["clamp", "continuation"], default=None)
    preset.add_argument(
        "--fh-a2",
        choices=["eq17", "compdetails", "twelfth", "third"],
        default=None,
        help="FH kernel width: eq17 (twelfth, a2 = beta hbar^2/12m) or compdetails (third)",
    )
    preset.add_argument("--seed", type=int, default=None)

    sample = commands.add_parser("sample", help="Metropolis sampling against quadrature")
    sample.add_argument("config", type=Path, help="Scenario file with a sampler section")
    sample.add_argument("--out", type=Path, default=None, help="Output directory")

    check = commands.add_parser("check", help="Run the acceptance suite")
    check.add_argument("--out", type=Path, default=None, help="Directory for the check report")
    check.add_argument("--pins", type=Path, default=None, help="Regression pin file")
    return parser


def _output_dir(explicit: Optional[Path], configured: Optional[str]) -> Path:
    """Каталог результатов: --out, затем output_dir сценария, затем config.OUTPUT_DIR."""
    if explicit is not None:
        return explicit
    return Path(configured or config.OUTPUT_DIR)


async def _run(args: argparse.Namespace) -> int:
    """Выполняет подкоманду и возвращает код возврата."""
    if args.command == "check":
        outcomes = await run_checks(args.pins)
        text = format_outcomes(outcomes)
        sys.stdout.write(text)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "check_report.txt").write_text(text, encoding="utf-8")
        return 0 if all(outcome.passed for outcome in outcomes) else 1

    if args.command == "sample":
        scenario = load_scenario(args.config)
        rows, failures = await sample_scenario(
            scenario, _output_dir(args.out, scenario.output_dir)
        )
        for row in rows:
            sys.stdout.write(
                f"beta={row.label} {row.method}: L1 {row.l1:.4e}, "
                f"x2 {row.second_moment_sampled:.6f} +- {row.second_moment_error:.1e} "
                f"(quadrature {row.second_moment_quadrature:.6f}), "
                f"acceptance {row.acceptance:.3f}\n"
            )
        for failure in failures:
            sys.stdout.write(f"FAILED {failure.describe()}\n")
        return 1 if failures else 0

    if args.command == "run":
        scenarios = [load_scenario(args.config)]
    else:
        scenarios = build_preset(args.name, args.policy, args.fh_a2, args.seed)

    exit_code = 0
    for scenario in scenarios:
        result = await run_scenario(scenario, _output_dir(args.out, scenario.output_dir))
        sys.stdout.write(report(result))
        exit_code = max(exit_code, result.exit_code)
    return exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Разбирает аргументы, настраивает логирование и запускает подкоманду.

    Args:
        argv (Optional[Sequence[str]]): Аргументы без имени программы. Default: sys.argv.

    Returns:
        int: Код возврата.
    """
    args = build_parser().parse_args(argv)
    setup_logger(disable_logging=args.quiet, log_level=args.log_level, log_file=config.LOG_FILE)
    try:
        return asyncio.run(_run(args))
    except QepotError as e:
        logger.error(f"qepot {args.command} failed: {e}")
        sys.stderr.write(f"error: {e}\n")
        return 2
    except OSError as e:
        logger.error(f"I/O error: {e}")
        sys.stderr.write(f"error: {e}\n")
        return 2


def run(argv: Optional[List[str]] = None) -> None:
    """Точка входа консольного скрипта qepot."""
    sys.exit(main(argv))


if __name__ == "__main__":
    run()
