"""Тесты метрополисовой выборки по табулированному потенциалу."""

import numpy as np
import pytest
from pydantic import ValidationError

from app.errors import SamplingError
from app.physics.models import Grid, ThermoState
from app.physics.sampling import ChainConfig, sample_metropolis
from app.physics.statistics import observable_average


@pytest.fixture
def harmonic_table(small_grid: Grid) -> np.ndarray:
    """Таблица V = x²/2 на сетке [−6, 6].

    Args:
        small_grid (Grid): Сетка.

    Returns:
        np.ndarray: Значения потенциала.
    """
    return 0.5 * small_grid.points**2


def test_sampler_reproduces_gaussian(small_grid: Grid, harmonic_table: np.ndarray) -> None:
    """Тестирует выборку из exp(−x²/2) при β = 1.

    Args:
        small_grid (Grid): Сетка.
        harmonic_table (np.ndarray): Таблица x²/2.

    Asserts:
        - ⟨x²⟩ ≈ 1 в пределах пяти погрешностей.
        - Гистограмма нормирована, доля принятия в окне.
    """
    chain = ChainConfig(n_steps=20_000, burn_in=2_000, seed=3, n_chains=2)
    result = sample_metropolis(harmonic_table, small_grid, ThermoState(beta=1.0), chain)
    second = observable_average(result, lambda x: x**2)
    assert abs(second.value - 1.0) < 5.0 * second.error + 0.02  # noqa: S101
    assert small_grid.integrate(result.histogram.values) == pytest.approx(1.0)  # noqa: S101
    assert 0.1 <= result.pooled_acceptance <= 0.9  # noqa: S101
    assert not result.diagnostics  # noqa: S101


def test_sampler_is_deterministic(small_grid: Grid, harmonic_table: np.ndarray) -> None:
    """Тестирует воспроизводимость при одинаковом зерне.

    Args:
        small_grid (Grid): Сетка.
        harmonic_table (np.ndarray): Таблица x²/2.

    Asserts:
        - Одинаковое зерно даёт побитово одинаковые цепочки.
        - Другое зерно даёт другую выборку.
    """
    thermo = ThermoState(beta=1.0)
    chain = ChainConfig(n_steps=3_000, burn_in=500, seed=42, n_chains=2)
    first = sample_metropolis(harmonic_table, small_grid, thermo, chain)
    second = sample_metropolis(harmonic_table, small_grid, thermo, chain)
    other = sample_metropolis(
        harmonic_table, small_grid, thermo, chain.model_copy(update={"seed": 43})
    )
    for a, b in zip(first.chains, second.chains):
        assert np.array_equal(a, b)  # noqa: S101
    assert first.step_sizes == second.step_sizes  # noqa: S101
    assert not np.array_equal(first.chains[0], other.chains[0])  # noqa: S101


def test_sampler_stays_on_grid(small_grid: Grid) -> None:
    """Тестирует отражение предложений от краёв сетки.

    Плоский потенциал делает все предложения принятыми.

    Args:
        small_grid (Grid): Сетка.

    Asserts:
        Все точки лежат внутри [x_min, x_max].
    """
    flat = np.zeros(small_grid.n_points)
    chain = ChainConfig(n_steps=5_000, burn_in=100, step_size=3.0, seed=1, n_chains=1)
    result = sample_metropolis(flat, small_grid, ThermoState(beta=1.0), chain)
    samples = result.chains[0]
    assert samples.min() >= small_grid.x_min  # noqa: S101
    assert samples.max() <= small_grid.x_max  # noqa: S101


@pytest.mark.parametrize(
    "table",
    [np.zeros(10), np.full(241, np.inf)],
    ids=["wrong-shape", "non-finite"],
)
def test_sampler_rejects_bad_table(small_grid: Grid, table: np.ndarray) -> None:
    """Тестирует отказ для некорректной таблицы.

    Args:
        small_grid (Grid): Сетка из 241 узла.
        table (np.ndarray): Недопустимая таблица.

    Asserts:
        SamplingError.
    """
    with pytest.raises(SamplingError):
        sample_metropolis(
            table, small_grid, ThermoState(beta=1.0), ChainConfig(n_steps=10, burn_in=0)
        )


def test_chain_config_burn_in_shorter_than_chain() -> None:
    """Тестирует проверку длины прогрева.

    Asserts:
        burn_in ≥ n_steps вызывает ValidationError.
    """
    with pytest.raises(ValidationError):
        ChainConfig(n_steps=100, burn_in=100)
