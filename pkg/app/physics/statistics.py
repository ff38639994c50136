"""Модуль нормировки и сравнения плотностей.

Functions:
    normalize: Нормировка неотрицательной табулированной функции.
    normalize_log: Нормировка по логарифмам весов.
    compare: Метрики расхождения двух плотностей на одной сетке.
    histogram_density: Гистограмма выборки как плотность на сетке.
    observable_average: Среднее наблюдаемой по плотности или по выборке.
"""

import logging
from functools import singledispatch
from typing import Any, Callable, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.errors import GridMismatchError, NormalizationError, SamplingError
from app.physics.models import DensityProfile, FloatArray, Grid, SamplingResult
from app.physics.potentials import BasePotential

# Инициализация логгера
logger = logging.getLogger(__name__)

# Нижняя граница кандидата в логарифме KL
KL_FLOOR: float = 1e-300

# Число пакетов на цепочку в оценке ошибки
BATCHES_PER_CHAIN: int = 10

Observable = Callable[[FloatArray], FloatArray]


class Estimate(NamedTuple):
    """Оценка среднего с погрешностью (ноль для квадратуры)."""

    value: float
    error: float


class ComparisonReport(BaseModel):
    """Расхождение плотности-кандидата с эталоном.

    Attributes:
        l1 (float): ∫|P − Q|, в пределах [0, 2].
        kl (float): KL(P‖Q) ≥ 0.
        js (float): Дивергенция Йенсена–Шеннона, в пределах [0, ln 2].
        delta_mean (float): ⟨x⟩_Q − ⟨x⟩_P.
        delta_second_moment (float): ⟨x²⟩_Q − ⟨x²⟩_P.
        delta_potential (Optional[float]): ⟨V⟩_Q − ⟨V⟩_P, если потенциал передан.
    """

    model_config = ConfigDict(frozen=True)

    l1: float
    kl: float
    js: float
    delta_mean: float
    delta_second_moment: float
    delta_potential: Optional[float] = None


def _check_shape(values: FloatArray, grid: Grid) -> None:
    """Значения должны совпадать с сеткой по длине."""
    if values.shape != (grid.n_points,):
        raise NormalizationError(
            f"Expected {grid.n_points} values, got array of shape {values.shape}"
        )


def _finish(weights: FloatArray, log_shift: float, grid: Grid) -> DensityProfile:
    """Нормирует неотрицательные веса с максимумом 1 и проверяет ширину носителя."""
    integral = grid.integrate(weights)
    if not integral > 0:
        raise NormalizationError("Function has no positive mass on the grid")
    # Носитель уже двух шагов сетки означает дельтаобразную форму
    if integral / float(np.max(weights)) < 2.0 * grid.spacing:
        logger.error(f"Support width {integral:.3e} below two grid spacings")
        raise NormalizationError("Function is too narrow to be integrated on this grid")
    return DensityProfile(
        grid=grid, values=weights / integral, log_norm=float(log_shift + np.log(integral))
    )


def normalize(raw: FloatArray, grid: Grid) -> DensityProfile:
    """Нормирует неотрицательную функцию по формуле трапеций.

    Args:
        raw (FloatArray): Значения в узлах сетки.
        grid (Grid): Сетка.

    Returns:
        DensityProfile: Плотность с интегралом 1 и log_norm = ln ∫raw.

    Raises:
        NormalizationError: Нулевая, отрицательная, неконечная или слишком узкая функция.
    """
    values = np.asarray(raw, dtype=float)
    _check_shape(values, grid)
    if not np.all(np.isfinite(values)):
        raise NormalizationError("Function contains non-finite values")
    if np.any(values < 0):
        raise NormalizationError("Function contains negative values")
    peak = float(np.max(values))
    if not peak > 0:
        raise NormalizationError("Function is identically zero")
    return _finish(values / peak, float(np.log(peak)), grid)


def normalize_log(log_raw: FloatArray, grid: Grid) -> DensityProfile:
    """Нормирует функцию, заданную логарифмами значений.

    Значение −inf означает нулевой вес; NaN и +inf отвергаются.

    Args:
        log_raw (FloatArray): ln f в узлах сетки.
        grid (Grid): Сетка.

    Returns:
        DensityProfile: Плотность с log_norm = ln ∫f.
    """
    logs = np.asarray(log_raw, dtype=float)
    _check_shape(logs, grid)
    if np.any(np.isnan(logs)) or np.any(logs == np.inf):
        raise NormalizationError("Log-weights contain NaN or +inf")
    shift = float(np.max(logs))
    if shift == -np.inf:
        raise NormalizationError("Function is identically zero")
    return _finish(np.exp(logs - shift), shift, grid)


def _check_same_grid(reference: DensityProfile, candidate: DensityProfile) -> None:
    """Профили должны быть заданы на одной сетке."""
    if reference.grid != candidate.grid:
        logger.error(f"Grid mismatch: {reference.grid} vs {candidate.grid}")
        raise GridMismatchError("Profiles are tabulated on different grids")


def _kl(p: FloatArray, q: FloatArray, grid: Grid) -> float:
    """KL(p‖q) с маской нулевых бинов p."""
    mask = p > 0
    integrand = np.zeros_like(p)
    integrand[mask] = p[mask] * np.log(p[mask] / np.maximum(q[mask], KL_FLOOR))
    return max(grid.integrate(integrand), 0.0)


def compare(
    reference: DensityProfile,
    candidate: DensityProfile,
    potential: Optional[BasePotential] = None,
) -> ComparisonReport:
    """Сравнивает кандидата с эталоном.

    Args:
        reference (DensityProfile): Эталонная плотность P.
        candidate (DensityProfile): Плотность-кандидат Q.
        potential (Optional[BasePotential]): Потенциал для ⟨V⟩. Default: None.

    Returns:
        ComparisonReport: L1, KL, JS и разности моментов.

    Raises:
        GridMismatchError: Если сетки различаются.
    """
    _check_same_grid(reference, candidate)
    grid = reference.grid
    p, q = reference.values, candidate.values

    l1 = float(np.clip(grid.integrate(np.abs(p - q)), 0.0, 2.0))
    kl = _kl(p, q, grid)
    mixture = 0.5 * (p + q)
    js = float(np.clip(0.5 * _kl(p, mixture, grid) + 0.5 * _kl(q, mixture, grid), 0.0, np.log(2.0)))

    x = grid.points
    delta_potential = None
    if potential is not None:
        v = potential.value(x)
        delta_potential = grid.integrate(v * (q - p))
    return ComparisonReport(
        l1=l1,
        kl=kl,
        js=js,
        delta_mean=grid.integrate(x * (q - p)),
        delta_second_moment=grid.integrate(x**2 * (q - p)),
        delta_potential=delta_potential,
    )


def histogram_density(samples: FloatArray, grid: Grid) -> DensityProfile:
    """Гистограмма с бинами, центрированными на узлах сетки.

    Крайние бины имеют половинную ширину, поэтому интеграл по трапециям
    равен единице точно.

    Args:
        samples (FloatArray): Выборка координат внутри сетки.
        grid (Grid): Сетка.

    Returns:
        DensityProfile: Плотность на узлах сетки.
    """
    x = grid.points
    edges = np.concatenate(([grid.x_min], 0.5 * (x[1:] + x[:-1]), [grid.x_max]))
    counts, _ = np.histogram(np.asarray(samples, dtype=float), bins=edges)
    total = counts.sum()
    if total == 0:
        raise NormalizationError("No samples fall inside the grid")
    return DensityProfile(grid=grid, values=counts / (total * grid.weights))


@singledispatch
def observable_average(source: Any, observable: Observable) -> Estimate:
    """Среднее наблюдаемой.

    Для DensityProfile используется квадратура (погрешность 0), для
    SamplingResult — среднее по выборке с погрешностью по методу пакетных средних.

    Args:
        source (Any): DensityProfile или SamplingResult.
        observable (Observable): Наблюдаемая O(x).

    Returns:
        Estimate: Значение и погрешность.
    """
    raise TypeError(f"Unsupported source type {type(source).__name__}")


@observable_average.register
def _(source: DensityProfile, observable: Observable) -> Estimate:
    """Квадратура по нормированной плотности."""
    grid = source.grid
    values = np.broadcast_to(np.asarray(observable(grid.points), dtype=float), grid.points.shape)
    return Estimate(grid.integrate(values * source.values), 0.0)


@observable_average.register
def _(source: SamplingResult, observable: Observable) -> Estimate:
    """Пакетные средние по всем цепочкам."""
    if len(source.chains) < 2:
        raise SamplingError(
            f"Error estimate requires at least 2 chains, got {len(source.chains)}"
        )
    batch_means = []
    total, count = 0.0, 0
    for chain in source.chains:
        values = np.asarray(observable(chain), dtype=float)
        total += float(values.sum())
        count += values.size
        batch_means.extend(np.mean(batch) for batch in np.array_split(values, BATCHES_PER_CHAIN))
    means = np.asarray(batch_means)
    error = float(np.std(means, ddof=1) / np.sqrt(means.size))
    return Estimate(total / count, error)
