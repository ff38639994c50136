"""Тесты нормировки, сравнения плотностей и средних наблюдаемых."""

import numpy as np
import pytest

from app.errors import GridMismatchError, NormalizationError, SamplingError
from app.physics.models import Grid, SamplingResult
from app.physics.potentials import HarmonicQuartic
from app.physics.statistics import (
    compare,
    histogram_density,
    normalize,
    normalize_log,
    observable_average,
)


def _gaussian(grid: Grid, center: float = 0.0, width: float = 1.0) -> np.ndarray:
    """Ненормированная гауссиана на сетке."""
    return np.exp(-((grid.points - center) ** 2) / (2.0 * width**2))


def test_normalize_integrates_to_one(small_grid: Grid) -> None:
    """Тестирует нормировку и логарифм интеграла.

    Args:
        small_grid (Grid): Сетка [−6, 6].

    Asserts:
        - Интеграл плотности равен 1.
        - log_norm = ln(3·sqrt(2π)) для гауссианы с амплитудой 3.
    """
    profile = normalize(3.0 * _gaussian(small_grid), small_grid)
    assert small_grid.integrate(profile.values) == pytest.approx(1.0)  # noqa: S101
    expected = np.log(3.0 * np.sqrt(2.0 * np.pi))
    assert profile.log_norm == pytest.approx(expected, rel=1e-6)  # noqa: S101


def test_normalize_log_matches_normalize(small_grid: Grid) -> None:
    """Тестирует нормировку по логарифмам весов с большим сдвигом.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        ln f = −x²/2 + 800 даёт ту же плотность, что и exp(−x²/2).
    """
    direct = normalize(_gaussian(small_grid), small_grid)
    shifted = normalize_log(-0.5 * small_grid.points**2 + 800.0, small_grid)
    assert np.allclose(direct.values, shifted.values)  # noqa: S101
    assert shifted.log_norm == pytest.approx(direct.log_norm + 800.0)  # noqa: S101


@pytest.mark.parametrize(
    "raw",
    [
        np.zeros(241),
        np.full(241, -1.0),
        np.full(241, np.nan),
        np.ones(240),
    ],
    ids=["zero", "negative", "nan", "wrong-shape"],
)
def test_normalize_rejects_bad_input(small_grid: Grid, raw: np.ndarray) -> None:
    """Тестирует отказ нормировки.

    Args:
        small_grid (Grid): Сетка из 241 узла.
        raw (np.ndarray): Недопустимые значения.

    Asserts:
        NormalizationError.
    """
    with pytest.raises(NormalizationError):
        normalize(raw, small_grid)


def test_normalize_rejects_delta_spike(small_grid: Grid) -> None:
    """Тестирует отказ для функции уже двух шагов сетки.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        Единичный пик вызывает NormalizationError.
    """
    spike = np.zeros(small_grid.n_points)
    spike[120] = 1.0
    with pytest.raises(NormalizationError):
        normalize(spike, small_grid)


def test_compare_identical_and_disjoint(small_grid: Grid) -> None:
    """Тестирует границы метрик расхождения.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        - Для одинаковых плотностей все метрики равны нулю.
        - Для далёких гауссиан L1 близко к 2, JS к ln 2.
    """
    left = normalize(_gaussian(small_grid, -4.0, 0.3), small_grid)
    right = normalize(_gaussian(small_grid, 4.0, 0.3), small_grid)

    same = compare(left, left)
    assert same.l1 == pytest.approx(0.0, abs=1e-15)  # noqa: S101
    assert same.kl == pytest.approx(0.0, abs=1e-15)  # noqa: S101
    assert same.js == pytest.approx(0.0, abs=1e-15)  # noqa: S101

    apart = compare(left, right)
    assert apart.l1 == pytest.approx(2.0, abs=1e-6)  # noqa: S101
    assert apart.js == pytest.approx(np.log(2.0), abs=1e-6)  # noqa: S101
    assert apart.delta_mean == pytest.approx(8.0, rel=1e-6)  # noqa: S101


def test_compare_potential_difference(small_grid: Grid) -> None:
    """Тестирует разность ⟨V⟩ при переданном потенциале.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        Для V = x²/2 разность ⟨V⟩ равна половине разности ⟨x²⟩.
    """
    narrow = normalize(_gaussian(small_grid, 0.0, 0.7), small_grid)
    wide = normalize(_gaussian(small_grid, 0.0, 1.2), small_grid)
    report = compare(narrow, wide, HarmonicQuartic())
    assert report.delta_potential is not None  # noqa: S101
    assert report.delta_potential == pytest.approx(0.5 * report.delta_second_moment)  # noqa: S101


def test_compare_grid_mismatch(small_grid: Grid, wide_grid: Grid) -> None:
    """Тестирует отказ при разных сетках.

    Args:
        small_grid (Grid): Первая сетка.
        wide_grid (Grid): Вторая сетка.

    Asserts:
        GridMismatchError.
    """
    with pytest.raises(GridMismatchError):
        compare(
            normalize(_gaussian(small_grid), small_grid),
            normalize(_gaussian(wide_grid), wide_grid),
        )


def test_histogram_density_integral(small_grid: Grid) -> None:
    """Тестирует гистограмму с полубинами на краях.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        Интеграл по трапециям равен 1, включая выборку на самых краях сетки.
    """
    rng = np.random.default_rng(7)
    samples = np.concatenate([rng.normal(size=5000), [small_grid.x_min, small_grid.x_max]])
    profile = histogram_density(samples, small_grid)
    assert small_grid.integrate(profile.values) == pytest.approx(1.0)  # noqa: S101


def test_observable_average_quadrature(small_grid: Grid) -> None:
    """Тестирует среднее по плотности.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        ⟨x²⟩ = 1 для стандартной гауссианы, погрешность 0.
    """
    estimate = observable_average(normalize(_gaussian(small_grid), small_grid), lambda x: x**2)
    assert estimate.value == pytest.approx(1.0, rel=1e-6)  # noqa: S101
    assert estimate.error == 0.0  # noqa: S101


def _sampling_result(grid: Grid, n_chains: int) -> SamplingResult:
    """Собирает SamplingResult из независимых нормальных выборок."""
    rng = np.random.default_rng(11)
    chains = [rng.normal(size=2000) for _ in range(n_chains)]
    return SamplingResult(
        grid=grid,
        chains=chains,
        acceptance=[0.4] * n_chains,
        step_sizes=[1.0] * n_chains,
        histogram=histogram_density(np.concatenate(chains), grid),
    )


def test_observable_average_samples(small_grid: Grid) -> None:
    """Тестирует среднее по выборке с пакетной погрешностью.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        - Среднее x в пределах пяти погрешностей от нуля.
        - Погрешность положительна.
    """
    estimate = observable_average(_sampling_result(small_grid, 4), lambda x: x)
    assert estimate.error > 0.0  # noqa: S101
    assert abs(estimate.value) < 5.0 * estimate.error  # noqa: S101


def test_observable_average_needs_two_chains(small_grid: Grid) -> None:
    """Тестирует отказ оценки погрешности по одной цепочке.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        SamplingError.
    """
    with pytest.raises(SamplingError):
        observable_average(_sampling_result(small_grid, 1), lambda x: x)


def test_observable_average_unsupported_source() -> None:
    """Тестирует отказ для неподдерживаемого источника.

    Asserts:
        TypeError.
    """
    with pytest.raises(TypeError):
        observable_average([1.0, 2.0], lambda x: x)
