"""Модуль приёмочных проверок.

Набор проверок запускается командой ``qepot check``. Каждая проверка
возвращает CheckOutcome; код возврата ненулевой, если хотя бы одна проверка
не прошла. Проверки гоняют те же сценарии, что и ``qepot run``, на
небольших сетках.

Морзе-проверка закрепляет точные значения в JSON-файле config.REGRESSION_FILE:
первый запуск пишет файл, последующие сравнивают с ним.

Functions:
    run_checks: Запуск всех проверок.
    format_outcomes: Текстовый отчёт.
"""

import asyncio
import json
import logging
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Awaitable, Callable, Dict, List, Optional, Tuple

import numpy as np

from app.config import config as app_config
from app.physics.effective import METHODS
from app.physics.grid import auto_grid
from app.physics.models import DensityProfile, FloatArray, Grid, ThermoState
from app.physics.oracle import converge, expectation, solve_spectrum
from app.physics.potentials import HarmonicQuartic, Morse, morse_levels
from app.physics.statistics import observable_average
from app.scenario.config import (
    DoubleWellBlock,
    GridBlock,
    HarmonicQuarticBlock,
    SamplerBlock,
    ScenarioConfig,
)
from app.scenario.models import ScenarioRun
from app.scenario.presets import build_preset, morse_scenarios
from app.scenario.runner import run_scenario, sample_scenario

# Инициализация логгера
logger = logging.getLogger(__name__)

HARMONIC_TOLERANCE = 1e-8
CLASSICAL_LIMIT_BETA = 0.01
CLASSICAL_LIMIT_L1 = 1e-3
BOUND_SLACK = -1e-9
PURE_QUARTIC_WIDTH_TOLERANCE = 0.25
MORSE_MAX_L1 = 0.05
MORSE_MAX_MEAN_SHIFT = 0.02
PIN_RELATIVE_TOLERANCE = 1e-9
ORACLE_X2_TOLERANCE = 1e-6
MORSE_GAP_TOLERANCE = 0.005
SAMPLER_MAX_L1 = 0.02
SAMPLER_MAX_SIGMAS = 4.0


@dataclass(frozen=True)
class CheckOutcome:
    """Итог одной проверки.

    Attributes:
        name (str): Имя проверки.
        passed (bool): Прошла ли проверка.
        detail (str): Числа, на которых основан итог.
        seconds (float): Время выполнения.
    """

    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _harmonic_block(g: float = 0.0, omega: float = 1.0) -> HarmonicQuarticBlock:
    """Секция potential для mω²x²/2 + g x⁴/4."""
    return HarmonicQuarticBlock(variant="harmonic_quartic", omega=omega, g=g)


def _second_moment(profile: DensityProfile) -> float:
    """⟨x²⟩ по квадратуре."""
    return observable_average(profile, lambda x: x**2).value


def _mean(profile: DensityProfile) -> float:
    """⟨x⟩ по квадратуре."""
    return observable_average(profile, lambda x: x).value


def _require_clean(run: ScenarioRun) -> Optional[str]:
    """Текст первой ошибки модуля или None."""
    return run.failures[0].describe() if run.failures else None


async def check_harmonic_exactness() -> CheckOutcome:
    """Гармонический осциллятор: методы семейства lh точны."""
    details: List[str] = []
    passed = True
    for beta in (0.1, 1.0, 10.0):
        sigma2 = 0.5 / math.tanh(beta / 2.0)
        half_width = 12.0 * math.sqrt(max(sigma2, 1.0 / beta))
        scenario = ScenarioConfig(
            name="harmonic",
            potential=_harmonic_block(),
            betas=[beta],
            methods=["classical", "fh", "fk", "lh-bare", "lh-renorm", "lh-mapped"],
            grid=GridBlock(x_min=-half_width, x_max=half_width, n_points=4001, converge=False),
        )
        run = await run_scenario(scenario)
        error = _require_clean(run)
        if error:
            return CheckOutcome("harmonic_exactness", False, error)
        results = run.temperatures[0].results
        x = run.temperatures[0].grid.points
        gaussian = np.exp(-(x**2) / (2.0 * sigma2)) / math.sqrt(2.0 * math.pi * sigma2)

        log_z = results["lh-bare"].log_z
        assert log_z is not None  # noqa: S101
        z_error = abs(math.exp(log_z) * 2.0 * math.sinh(beta / 2.0) - 1.0)
        pdf_errors = {
            m: float(np.max(np.abs(results[m].profile.values - gaussian)))
            for m in ("lh-renorm", "lh-mapped")
        }
        classical = results["classical"].profile.values
        centroid_errors = {
            m: float(np.max(np.abs(results[m].profile.values - classical))) for m in ("fh", "fk")
        }
        worst = max([z_error, *pdf_errors.values(), *centroid_errors.values()])
        passed &= worst < HARMONIC_TOLERANCE
        details.append(f"beta={beta:g}: Z rel {z_error:.2e}, worst {worst:.2e}")
    return CheckOutcome("harmonic_exactness", passed, "; ".join(details))


async def check_classical_limit() -> CheckOutcome:
    """При β = 0.01 все методы близки к классической плотности."""
    blocks = {
        "harmonic": _harmonic_block(),
        "quartic": _harmonic_block(g=1.0),
        "pure_quartic": _harmonic_block(g=1.0, omega=0.0),
        "double_well": DoubleWellBlock(variant="double_well", omega=1.0, g=0.5),
    }
    details: List[str] = []
    passed = True
    for name, block in blocks.items():
        scenario = ScenarioConfig(
            name=name,
            potential=block,
            betas=[CLASSICAL_LIMIT_BETA],
            methods=list(METHODS),
            grid=GridBlock(converge=False),
        )
        run = await run_scenario(scenario)
        error = _require_clean(run)
        if error:
            return CheckOutcome("classical_limit", False, error)
        temperature = run.temperatures[0]
        classical = temperature.results["classical"].profile
        worst = max(
            temperature.grid.integrate(np.abs(result.profile.values - classical.values))
            for result in temperature.results.values()
        )
        passed &= worst < CLASSICAL_LIMIT_L1
        details.append(f"{name}: worst L1 {worst:.2e}")
    return CheckOutcome("classical_limit", passed, "; ".join(details))


async def check_variational_bounds() -> CheckOutcome:
    """F_FH ≥ F_exact и F_FK ≥ F_exact для квартичного потенциала и двойной ямы."""
    blocks = {
        "quartic_g0.1": _harmonic_block(g=0.1),
        "quartic_g1": _harmonic_block(g=1.0),
        "double_well_g0.1": DoubleWellBlock(variant="double_well", omega=1.0, g=0.1),
        "double_well_g0.5": DoubleWellBlock(variant="double_well", omega=1.0, g=0.5),
    }
    details: List[str] = []
    passed = True
    for name, block in blocks.items():
        scenario = ScenarioConfig(
            name=name,
            potential=block,
            betas=[1.0, 10.0],
            methods=["exact", "fh", "fk"],
            grid=GridBlock(tolerance=1e-8),
        )
        run = await run_scenario(scenario)
        error = _require_clean(run)
        if error:
            return CheckOutcome("variational_bounds", False, error)
        for temperature in run.temperatures:
            thermo = temperature.point.thermo
            f_exact = temperature.results["exact"].free_energy(thermo)
            assert f_exact is not None  # noqa: S101
            for method in ("fh", "fk"):
                f_method = temperature.results[method].free_energy(thermo)
                assert f_method is not None  # noqa: S101
                margin = f_method - f_exact
                passed &= margin >= BOUND_SLACK
                details.append(f"{name} beta={thermo.beta:g} {method}: {margin:.3e}")
    return CheckOutcome("variational_bounds", passed, "; ".join(details))


async def check_quartic_ordering() -> CheckOutcome:
    """lh-mapped ближе к exact, чем classical и fh; ширина чисто квартичной плотности."""
    details: List[str] = []
    passed = True
    for g in (0.1, 1.0):
        scenario = ScenarioConfig(
            name=f"quartic_g{g:g}",
            potential=_harmonic_block(g=g),
            betas=[1.0, 10.0],
            methods=["classical", "exact", "fh", "lh-mapped"],
            grid=GridBlock(tolerance=1e-7),
        )
        run = await run_scenario(scenario)
        error = _require_clean(run)
        if error:
            return CheckOutcome("quartic_ordering", False, error)
        for temperature in run.temperatures:
            l1 = {m: c.l1 for m, c in temperature.comparisons.items()}
            ok = l1["lh-mapped"] < l1["classical"] and l1["lh-mapped"] < l1["fh"]
            passed &= ok
            details.append(
                f"g={g:g} beta={temperature.point.label}: mapped {l1['lh-mapped']:.2e}, "
                f"classical {l1['classical']:.2e}, fh {l1['fh']:.2e}"
            )

    scenario = ScenarioConfig(
        name="pure_quartic",
        potential=_harmonic_block(g=1.0, omega=0.0),
        betas=[1.0, 10.0],
        methods=["classical", "exact", "lh-mapped"],
        grid=GridBlock(tolerance=1e-7),
    )
    run = await run_scenario(scenario)
    error = _require_clean(run)
    if error:
        return CheckOutcome("quartic_ordering", False, error)
    for temperature in run.temperatures:
        exact = _second_moment(temperature.results["exact"].profile)
        mapped = abs(_second_moment(temperature.results["lh-mapped"].profile) / exact - 1.0)
        classical = abs(_second_moment(temperature.results["classical"].profile) / exact - 1.0)
        passed &= mapped < PURE_QUARTIC_WIDTH_TOLERANCE and mapped < classical
        details.append(
            f"pure quartic beta={temperature.point.label}: x2 error mapped {mapped:.2%}, "
            f"classical {classical:.2%}"
        )
    return CheckOutcome("quartic_ordering", passed, "; ".join(details))


def _load_pins(path: Path) -> Optional[Dict[str, Dict[str, float]]]:
    """Закреплённые значения или None, если файла нет."""
    if not path.exists():
        return None
    with path.open(encoding="utf-8") as handle:
        data: Dict[str, Dict[str, float]] = json.load(handle)
    return data


def _save_pins(path: Path, pins: Dict[str, Dict[str, float]]) -> None:
    """Пишет закреплённые значения."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        json.dump(pins, handle, indent=2, sort_keys=True)
        handle.write("\n")
    logger.info(f"Pinned regression values to {path}")


async def check_morse(pin_file: Path) -> CheckOutcome:
    """Морс O–H: lh-mapped близок к exact при всех температурах; точные значения закреплены."""
    scenario = morse_scenarios()[0].model_copy(
        update={"methods": ["classical", "exact", "lh-mapped"]}
    )
    run = await run_scenario(scenario)
    error = _require_clean(run)
    if error:
        return CheckOutcome("morse", False, error)

    details: List[str] = []
    passed = True
    pins: Dict[str, Dict[str, float]] = {}
    for temperature in run.temperatures:
        exact = temperature.results["exact"].profile
        mapped = temperature.results["lh-mapped"].profile
        l1 = temperature.comparisons["lh-mapped"].l1
        shift = abs(_mean(mapped) - _mean(exact))
        passed &= l1 < MORSE_MAX_L1 and shift < MORSE_MAX_MEAN_SHIFT
        key = f"{temperature.point.kelvin:g}K"
        pins[key] = {"mean_exact": _mean(exact), "x2_exact": _second_moment(exact)}
        details.append(f"{key}: L1 {l1:.3e}, |dx| {shift:.3e}")

    stored = _load_pins(pin_file)
    if stored is None:
        _save_pins(pin_file, pins)
        details.append("regression values pinned")
    else:
        for key, values in pins.items():
            for name, value in values.items():
                reference = stored.get(key, {}).get(name)
                if reference is None or not math.isclose(
                    value, reference, rel_tol=PIN_RELATIVE_TOLERANCE
                ):
                    passed = False
                    details.append(f"{key} {name}: {value!r} differs from pinned {reference!r}")
    return CheckOutcome("morse", passed, "; ".join(details))


def _two_highest_maxima(values: FloatArray, grid: Grid) -> List[float]:
    """Положения двух наибольших внутренних локальных максимумов, по возрастанию x."""
    interior = (values[1:-1] > values[:-2]) & (values[1:-1] >= values[2:])
    indices = np.flatnonzero(interior) + 1
    top = sorted(indices, key=lambda i: values[i], reverse=True)[:2]
    return sorted(float(grid.points[i]) for i in top)


async def check_double_well() -> CheckOutcome:
    """Двойная яма при β = 10: положение максимумов lh-mapped против exact.

    Допуск на положение максимума равен шагу базовой сетки auto_grid, а не
    шагу сгущённой сетки эталона.
    """
    details: List[str] = []
    passed = True
    for g in (0.1, 0.5):
        scenario = ScenarioConfig(
            name=f"double_well_g{g:g}",
            potential=DoubleWellBlock(variant="double_well", omega=1.0, g=g),
            betas=[10.0],
            methods=["exact", "lh-mapped"],
            grid=GridBlock(tolerance=1e-7),
        )
        run = await run_scenario(scenario)
        error = _require_clean(run)
        if error:
            return CheckOutcome("double_well", False, error)
        temperature = run.temperatures[0]
        grid = temperature.grid
        spacing = auto_grid(scenario.build_potential(), temperature.point.thermo).spacing
        exact = _two_highest_maxima(temperature.results["exact"].profile.values, grid)
        mapped = _two_highest_maxima(temperature.results["lh-mapped"].profile.values, grid)
        l1 = temperature.comparisons["lh-mapped"].l1
        if g == 0.1:
            located = len(mapped) == 2 and len(exact) == 2 and all(
                abs(a - b) <= spacing * (1.0 + 1e-9) for a, b in zip(mapped, exact)
            )
            passed &= located
            details.append(
                f"g=0.1: maxima mapped {mapped}, exact {exact} (spacing {spacing:.3g}), "
                f"L1 {l1:.3e}"
            )
        else:
            details.append(f"g=0.5 (recorded): maxima mapped {mapped}, exact {exact}, L1 {l1:.3e}")
    return CheckOutcome("double_well", passed, "; ".join(details))


async def check_oracle() -> CheckOutcome:
    """⟨x²⟩ гармонического осциллятора при β = 1 и первый интервал спектра Морса."""

    def compute() -> Tuple[float, float]:
        """Относительные ошибки эталона."""
        thermo = ThermoState(beta=1.0)
        converged = converge(HarmonicQuartic(), thermo, tolerance=1e-8)
        x2 = expectation(converged.profile, lambda x: x**2)
        x2_error = abs(x2 - 0.5 / math.tanh(0.5))

        scenario = morse_scenarios()[0]
        morse = scenario.build_potential()
        assert isinstance(morse, Morse)  # noqa: S101
        point = scenario.temperature_points()[-1]
        grid = auto_grid(morse, point.thermo).refined().refined()
        spectrum = solve_spectrum(morse, point.thermo, grid, min_states=2)
        levels = morse_levels(morse, point.thermo.mass, 2, point.thermo.hbar)
        numeric_gap = spectrum.eigenvalues[1] - spectrum.eigenvalues[0]
        analytic_gap = levels[1] - levels[0]
        return x2_error, abs(numeric_gap / analytic_gap - 1.0)

    x2_error, gap_error = await asyncio.to_thread(compute)
    passed = x2_error < ORACLE_X2_TOLERANCE and gap_error < MORSE_GAP_TOLERANCE
    return CheckOutcome(
        "oracle", passed, f"harmonic x2 abs error {x2_error:.2e}; Morse gap rel {gap_error:.2e}"
    )


async def check_sampler() -> CheckOutcome:
    """Выборка по V_LH (lh-mapped) для g = 1, β = 1 совпадает с квадратурой."""
    scenario = ScenarioConfig(
        name="sampler",
        potential=_harmonic_block(g=1.0),
        betas=[1.0],
        methods=["lh-mapped"],
        grid=GridBlock(converge=False),
        sampler=SamplerBlock(method="lh-mapped"),
    )
    rows, failures = await sample_scenario(scenario)
    if failures:
        return CheckOutcome("sampler", False, failures[0].describe())
    row = rows[0]
    sigmas = row.second_moment_sigmas
    passed = row.l1 < SAMPLER_MAX_L1 and sigmas < SAMPLER_MAX_SIGMAS
    return CheckOutcome(
        "sampler",
        passed,
        f"L1 {row.l1:.3e}, x2 {row.second_moment_sampled:.5f} vs "
        f"{row.second_moment_quadrature:.5f} ({sigmas:.2f} sigma), "
        f"acceptance {row.acceptance:.3f}",
    )


async def check_determinism(preset: str = "fig1") -> CheckOutcome:
    """Два прогона пресета дают побайтно одинаковые CSV и manifest.

    Args:
        preset (str): Имя пресета. Default: fig1.

    Returns:
        CheckOutcome: Итог сравнения файлов.
    """
    scenarios = build_preset(preset)
    with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
        for target in (Path(first), Path(second)):
            for scenario in scenarios:
                run = await run_scenario(scenario, target)
                error = _require_clean(run)
                if error:
                    return CheckOutcome("determinism", False, error)
        names = sorted(path.name for path in Path(first).iterdir())
        differing = [
            name
            for name in names
            if (Path(first) / name).read_bytes() != (Path(second) / name).read_bytes()
        ]
    passed = bool(names) and not differing
    detail = f"{len(names)} files compared" + (f", differing: {differing}" if differing else "")
    return CheckOutcome("determinism", passed, detail)


CheckFactory = Callable[[], Awaitable[CheckOutcome]]


async def run_checks(pin_file: Optional[Path] = None) -> List[CheckOutcome]:
    """Запускает все проверки по очереди.

    Проверки выполняются последовательно: внутри каждой сценарный раннер
    уже распараллеливает задания.

    Args:
        pin_file (Optional[Path]): Файл закреплённых значений. Default: config.REGRESSION_FILE.

    Returns:
        List[CheckOutcome]: Итоги в порядке запуска.
    """
    pins = pin_file if pin_file is not None else Path(app_config.REGRESSION_FILE)
    checks: List[Tuple[str, CheckFactory]] = [
        ("harmonic_exactness", check_harmonic_exactness),
        ("classical_limit", check_classical_limit),
        ("variational_bounds", check_variational_bounds),
        ("quartic_ordering", check_quartic_ordering),
        ("morse", lambda: check_morse(pins)),
        ("double_well", check_double_well),
        ("oracle", check_oracle),
        ("sampler", check_sampler),
        ("determinism", check_determinism),
    ]
    outcomes: List[CheckOutcome] = []
    for name, factory in checks:
        logger.info(f"Running check {name}")
        started = time.perf_counter()
        try:
            outcome = await factory()
        except Exception as e:
            logger.error(f"Check {name} raised: {e}", exc_info=True)
            outcome = CheckOutcome(name, False, f"raised {type(e).__name__}: {e}")
        seconds = time.perf_counter() - started
        outcomes.append(CheckOutcome(outcome.name, outcome.passed, outcome.detail, seconds))
        logger.info(f"Check {name}: {'passed' if outcome.passed else 'FAILED'} in {seconds:.1f}s")
    return outcomes


def format_outcomes(outcomes: List[CheckOutcome]) -> str:
    """Текстовый отчёт по проверкам."""
    lines = [
        f"{'PASS' if o.passed else 'FAIL'} {o.name} ({o.seconds:.1f}s): {o.detail}" for o in outcomes
    ]
    failed = sum(not o.passed for o in outcomes)
    lines.append(f"{len(outcomes) - failed}/{len(outcomes)} checks passed")
    return "\n".join(lines) + "\n"
