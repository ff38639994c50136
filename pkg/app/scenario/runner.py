"""Модуль запуска сценариев.

Для каждой температуры строится общая сетка (сходящаяся по P_QM, если в
сценарии есть exact), затем задания (β, метод) выполняются параллельно в
потоках под семафором с ограничением config.THREADS. Ошибки заданий не
прерывают сценарий: они собираются в список отказов с контекстом, а
частичные результаты записываются.

Functions:
    prepare_grid: Общая сетка для одной температуры.
    evaluate_thresholds: Проверка порогов приёмки сценария.
    run_scenario: Полный прогон сценария.
    sample_scenario: Выборка Метрополиса против квадратуры.
"""

import asyncio
import logging
import math
from pathlib import Path
from typing import Any, Callable, List, Optional, Tuple, TypeVar, Union

from app.config import config as app_config
from app.errors import ConfigError, QepotError
from app.physics.effective import MethodKey, MethodResult, build_method
from app.physics.grid import auto_grid
from app.physics.models import Grid
from app.physics.oracle import RefinementStep, converge, exact_effective_potential
from app.physics.potentials import BasePotential
from app.physics.sampling import sample_metropolis
from app.physics.statistics import compare, observable_average
from app.scenario.config import ScenarioConfig, TemperaturePoint
from app.scenario.models import Failure, SamplingRow, ScenarioRun, TemperatureRun
from app.scenario.output import write_outputs, write_sampling

# Инициализация логгера
logger = logging.getLogger(__name__)

T = TypeVar("T")


def prepare_grid(
    config: ScenarioConfig, potential: BasePotential, point: TemperaturePoint
) -> Tuple[Grid, Optional[MethodResult], List[RefinementStep]]:
    """Общая сетка для одной температуры.

    Если в сценарии есть exact и включена сходимость, сетка сгущается до
    сходимости P_QM, и результат exact берётся с финальной сетки. Иначе
    используется явная сетка или auto_grid.

    Args:
        config (ScenarioConfig): Сценарий.
        potential (BasePotential): Потенциал.
        point (TemperaturePoint): Температура.

    Returns:
        Tuple[Grid, Optional[MethodResult], List[RefinementStep]]: Сетка, готовый
        результат exact (если посчитан) и журнал сгущения.
    """
    thermo = point.thermo
    explicit = config.grid.explicit
    if "exact" in config.methods and config.grid.converge:
        converged = converge(
            potential,
            thermo,
            coverage=config.grid.coverage,
            tolerance=config.grid.tolerance,
            grid=explicit,
        )
        profile = converged.profile
        exact = MethodResult(
            "exact",
            exact_effective_potential(profile, thermo),
            profile,
            profile.log_norm,
            {"refinement_steps": float(len(converged.log))},
        )
        return converged.solution.grid, exact, list(converged.log)
    if explicit is not None:
        return explicit, None, []
    return auto_grid(potential, thermo, config.grid.coverage), None, []


def evaluate_thresholds(scenario: ScenarioRun) -> List[str]:
    """Проверяет пороги acceptance.* на температурах с β ≥ min_beta.

    Отсутствующее сравнение считается нарушением порога.

    Args:
        scenario (ScenarioRun): Результат сценария.

    Returns:
        List[str]: Описания нарушенных порогов.
    """
    acceptance = scenario.config.acceptance
    failed: List[str] = []
    for run in scenario.temperatures:
        if run.point.thermo.beta < acceptance.min_beta:
            continue
        beta = run.point.label
        for method, limit in sorted(acceptance.max_l1.items()):
            comparison = run.comparisons.get(method)
            if comparison is None:
                failed.append(f"beta={beta} {method}: no comparison against exact")
            elif not comparison.l1 < limit:
                failed.append(f"beta={beta} {method}: L1 {comparison.l1:.4e} >= {limit:.4e}")
        for method in acceptance.beats_classical:
            candidate = run.comparisons.get(method)
            classical = run.comparisons.get("classical")
            if candidate is None or classical is None:
                failed.append(f"beta={beta} {method}: no comparison with classical")
            elif not candidate.l1 < classical.l1:
                failed.append(
                    f"beta={beta} {method}: L1 {candidate.l1:.4e} "
                    f"not below classical {classical.l1:.4e}"
                )
    return failed


def _failure(stage: str, point: TemperaturePoint, grid: Optional[Grid], error: Exception) -> Failure:
    """Отказ с контекстом температуры и сетки."""
    return Failure(
        stage=stage,
        label=point.label,
        beta=point.thermo.beta,
        x_min=grid.x_min if grid else math.nan,
        x_max=grid.x_max if grid else math.nan,
        message=str(error),
    )


async def run_scenario(config: ScenarioConfig, out_dir: Optional[Path] = None) -> ScenarioRun:
    """Прогоняет сценарий и при необходимости пишет файлы.

    Args:
        config (ScenarioConfig): Сценарий.
        out_dir (Optional[Path]): Каталог результатов; None — ничего не писать.

    Returns:
        ScenarioRun: Результаты, отказы и нарушенные пороги.
    """
    logger.info(f"Running scenario {config.name} with methods {', '.join(config.methods)}")
    potential = config.build_potential()
    options = config.method_options()
    semaphore = asyncio.Semaphore(app_config.THREADS)

    async def in_thread(func: Callable[..., T], *args: Any) -> T:
        """Выполняет вычисление в потоке под общим семафором."""
        async with semaphore:
            return await asyncio.to_thread(func, *args)

    async def prepare(point: TemperaturePoint) -> Union[TemperatureRun, Failure]:
        """Готовит сетку одной температуры.

        Args:
            point (TemperaturePoint): Температура.

        Returns:
            Union[TemperatureRun, Failure]: Заготовка результатов или отказ.
        """
        try:
            grid, exact, log = await in_thread(prepare_grid, config, potential, point)
        except QepotError as e:
            logger.error(f"Grid preparation failed at beta={point.thermo.beta:.6g}: {e}")
            return _failure("grid", point, None, e)
        run = TemperatureRun(point=point, grid=grid, refinement=log)
        if exact is not None:
            run.results["exact"] = exact
        return run

    async def build(run: TemperatureRun, method: MethodKey) -> Union[MethodResult, Failure]:
        """Строит один метод на сетке температуры.

        Args:
            run (TemperatureRun): Температура и сетка.
            method (MethodKey): Метод.

        Returns:
            Union[MethodResult, Failure]: Результат или отказ.
        """
        try:
            return await in_thread(
                build_method, method, potential, run.point.thermo, run.grid, options
            )
        except QepotError as e:
            return _failure(method, run.point, run.grid, e)

    scenario = ScenarioRun(config=config)
    prepared = await asyncio.gather(*(prepare(point) for point in config.temperature_points()))
    for item in prepared:
        if isinstance(item, Failure):
            scenario.failures.append(item)
        else:
            scenario.temperatures.append(item)

    jobs = [
        (run, method)
        for run in scenario.temperatures
        for method in config.methods
        if method not in run.results
    ]
    outcomes = await asyncio.gather(*(build(run, method) for run, method in jobs))
    for (run, method), outcome in zip(jobs, outcomes):
        if isinstance(outcome, Failure):
            scenario.failures.append(outcome)
        else:
            run.results[method] = outcome

    for run in scenario.temperatures:
        exact = run.results.get("exact")
        if exact is None:
            continue
        for method in run.ordered_methods():
            if method != "exact":
                run.comparisons[method] = compare(
                    exact.profile, run.results[method].profile, potential
                )

    scenario.threshold_failures = evaluate_thresholds(scenario)
    for failure in scenario.failures:
        logger.error(f"Scenario {config.name}: {failure.describe()}")
    if out_dir is not None:
        await asyncio.to_thread(write_outputs, scenario, out_dir)
    logger.info(
        f"Scenario {config.name} finished: {len(scenario.failures)} failures, "
        f"{len(scenario.threshold_failures)} threshold violations"
    )
    return scenario


def _sample_one(
    config: ScenarioConfig, potential: BasePotential, point: TemperaturePoint, index: int
) -> SamplingRow:
    """Выборка и квадратура для одной температуры."""
    sampler = config.sampler
    assert sampler is not None  # noqa: S101
    base_seed = sampler.seed if "seed" in sampler.model_fields_set else config.seed
    chain = sampler.model_copy(update={"seed": base_seed + index * sampler.n_chains})

    grid, _, _ = prepare_grid(
        config.model_copy(update={"methods": [sampler.method]}), potential, point
    )
    result = build_method(sampler.method, potential, point.thermo, grid, config.method_options())
    sampled = sample_metropolis(result.v_eff, grid, point.thermo, chain)

    def second_moment(x: Any) -> Any:
        """Наблюдаемая x²."""
        return x**2

    def position(x: Any) -> Any:
        """Наблюдаемая x."""
        return x

    mean_q = observable_average(result.profile, position)
    mean_s = observable_average(sampled, position)
    x2_q = observable_average(result.profile, second_moment)
    x2_s = observable_average(sampled, second_moment)
    return SamplingRow(
        label=point.label,
        beta=point.thermo.beta,
        method=sampler.method,
        l1=compare(result.profile, sampled.histogram).l1,
        mean_quadrature=mean_q.value,
        mean_sampled=mean_s.value,
        mean_error=mean_s.error,
        second_moment_quadrature=x2_q.value,
        second_moment_sampled=x2_s.value,
        second_moment_error=x2_s.error,
        acceptance=sampled.pooled_acceptance,
        warnings=len(sampled.diagnostics),
    )


async def sample_scenario(
    config: ScenarioConfig, out_dir: Optional[Path] = None
) -> Tuple[List[SamplingRow], List[Failure]]:
    """Сравнивает выборку Метрополиса по V_eff с квадратурой той же плотности.

    Args:
        config (ScenarioConfig): Сценарий с секцией sampler.
        out_dir (Optional[Path]): Каталог результатов; None — ничего не писать.

    Returns:
        Tuple[List[SamplingRow], List[Failure]]: Строки сравнения и отказы.

    Raises:
        ConfigError: Если в сценарии нет секции sampler.
    """
    if config.sampler is None:
        raise ConfigError("Sampling requires a sampler section", key="sampler")
    potential = config.build_potential()
    semaphore = asyncio.Semaphore(app_config.THREADS)

    async def one(index: int, point: TemperaturePoint) -> Union[SamplingRow, Failure]:
        """Выборка при одной температуре.

        Args:
            index (int): Номер температуры; задаёт смещение зёрен.
            point (TemperaturePoint): Температура.

        Returns:
            Union[SamplingRow, Failure]: Строка сравнения или отказ.
        """
        async with semaphore:
            try:
                return await asyncio.to_thread(_sample_one, config, potential, point, index)
            except QepotError as e:
                logger.error(f"Sampling failed at beta={point.thermo.beta:.6g}: {e}")
                return _failure("sample", point, None, e)

    outcomes = await asyncio.gather(
        *(one(i, point) for i, point in enumerate(config.temperature_points()))
    )
    rows = [item for item in outcomes if isinstance(item, SamplingRow)]
    failures = [item for item in outcomes if isinstance(item, Failure)]
    if out_dir is not None:
        await asyncio.to_thread(write_sampling, config.name, rows, out_dir)
    return rows, failures
