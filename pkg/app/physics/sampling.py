"""Модуль метрополисовой выборки по табулированному эффективному потенциалу.

Целевое распределение ∝ exp(−βV_eff(x)), V_eff линейно интерполируется между
узлами сетки, предложения, вышедшие за сетку, отражаются от её краёв. Шаг
настраивается на прогреве к доле принятия 40% и затем фиксируется. Цепочка i
использует собственный поток PCG64 с зерном seed + i.
"""

import logging
import math
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.errors import SamplingError
from app.physics.models import FloatArray, Grid, SamplingResult, ThermoState
from app.physics.statistics import histogram_density

# Инициализация логгера
logger = logging.getLogger(__name__)

TARGET_ACCEPTANCE: float = 0.4
ACCEPTANCE_WINDOW: Tuple[float, float] = (0.1, 0.9)

# Окно подстройки шага на прогреве и размер блока случайных чисел
_TUNE_WINDOW: int = 100
_BLOCK: int = 65536


class ChainConfig(BaseModel):
    """Параметры цепочек Метрополиса.

    Attributes:
        n_steps (int): Шагов на цепочку, включая прогрев.
        burn_in (int): Шагов прогрева.
        step_size (float): Начальный шаг, бор.
        seed (int): Базовое зерно; цепочка i использует seed + i.
        n_chains (int): Число цепочек.
    """

    model_config = ConfigDict(frozen=True)

    n_steps: int = Field(default=1_000_000, gt=0)
    burn_in: int = Field(default=10_000, ge=0)
    step_size: float = Field(default=0.5, gt=0)
    seed: int = Field(default=20240601, ge=0)
    n_chains: int = Field(default=4, ge=1)

    @model_validator(mode="after")
    def _check_burn_in(self) -> "ChainConfig":
        """Прогрев короче цепочки."""
        if not self.n_steps > self.burn_in:
            raise ValueError(f"n_steps ({self.n_steps}) must exceed burn_in ({self.burn_in})")
        return self


class _Interpolant:
    """Кусочно-линейная интерполяция таблицы на равномерной сетке."""

    def __init__(self, values: FloatArray, grid: Grid) -> None:
        """Сохраняет таблицу как список для быстрого доступа в цикле."""
        self.values: List[float] = [float(v) for v in values]
        self.x_min = grid.x_min
        self.x_max = grid.x_max
        self.inverse_spacing = 1.0 / grid.spacing
        self.last = grid.n_points - 1

    def __call__(self, x: float) -> float:
        """Значение в точке x внутри сетки."""
        position = (x - self.x_min) * self.inverse_spacing
        index = min(int(position), self.last - 1)
        fraction = position - index
        left = self.values[index]
        return left + fraction * (self.values[index + 1] - left)

    def reflect(self, x: float) -> float:
        """Отражает точку от краёв сетки."""
        while x < self.x_min or x > self.x_max:
            if x < self.x_min:
                x = 2.0 * self.x_min - x
            else:
                x = 2.0 * self.x_max - x
        return x


def _run_chain(
    table: _Interpolant,
    beta: float,
    start: float,
    chain: ChainConfig,
    seed: int,
    step_bounds: Tuple[float, float],
) -> Tuple[FloatArray, float, float]:
    """Одна цепочка: прогрев с подстройкой шага, затем измерение.

    Returns:
        Tuple[FloatArray, float, float]: Выборка, доля принятия, зафиксированный шаг.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    x, energy = start, table(start)
    step = chain.step_size
    samples = np.empty(chain.n_steps - chain.burn_in)
    accepted = window_accepted = 0

    done = 0
    while done < chain.n_steps:
        block = min(_BLOCK, chain.n_steps - done)
        normals = rng.standard_normal(block).tolist()
        log_uniforms = np.log1p(-rng.random(block)).tolist()
        for z, log_u in zip(normals, log_uniforms):
            proposal = table.reflect(x + step * z)
            proposal_energy = table(proposal)
            if log_u < -beta * (proposal_energy - energy):
                x, energy = proposal, proposal_energy
                if done >= chain.burn_in:
                    accepted += 1
                else:
                    window_accepted += 1
            if done < chain.burn_in:
                if (done + 1) % _TUNE_WINDOW == 0:
                    rate = window_accepted / _TUNE_WINDOW
                    step *= math.exp(rate - TARGET_ACCEPTANCE)
                    step = min(max(step, step_bounds[0]), step_bounds[1])
                    window_accepted = 0
            else:
                samples[done - chain.burn_in] = x
            done += 1

    return samples, accepted / samples.size, step


def sample_metropolis(
    v_eff: FloatArray, grid: Grid, thermo: ThermoState, chain: ChainConfig
) -> SamplingResult:
    """Выборка Метрополиса из exp(−βV_eff) на сетке.

    Args:
        v_eff (FloatArray): Эффективный потенциал в узлах сетки.
        grid (Grid): Сетка.
        thermo (ThermoState): Состояние (β).
        chain (ChainConfig): Параметры цепочек.

    Returns:
        SamplingResult: Выборки, доли принятия, шаги, объединённая гистограмма
        и предупреждения.

    Raises:
        SamplingError: Если таблица не конечна или не совпадает с сеткой.
    """
    table_values = np.asarray(v_eff, dtype=float)
    if table_values.shape != (grid.n_points,) or not np.all(np.isfinite(table_values)):
        logger.error("Effective potential table is not finite or does not match the grid")
        raise SamplingError("Effective potential table must be finite and match the grid")

    table = _Interpolant(table_values, grid)
    start = float(grid.points[int(np.argmin(table_values))])
    step_bounds = (0.1 * grid.spacing, 0.5 * (grid.x_max - grid.x_min))

    chains: List[FloatArray] = []
    acceptance: List[float] = []
    steps: List[float] = []
    diagnostics: Dict[str, str] = {}
    for i in range(chain.n_chains):
        logger.info(f"Running Metropolis chain {i} (seed {chain.seed + i}, {chain.n_steps} steps)")
        samples, rate, step = _run_chain(
            table, thermo.beta, start, chain, chain.seed + i, step_bounds
        )
        chains.append(samples)
        acceptance.append(rate)
        steps.append(step)
        low, high = ACCEPTANCE_WINDOW
        if not low <= rate <= high:
            message = f"acceptance {rate:.3f} outside [{low}, {high}]"
            logger.warning(f"Chain {i}: {message}")
            diagnostics[f"chain_{i}"] = message

    histogram = histogram_density(np.concatenate(chains), grid)
    return SamplingResult(
        grid=grid,
        chains=chains,
        acceptance=acceptance,
        step_sizes=steps,
        histogram=histogram,
        diagnostics=diagnostics,
    )
