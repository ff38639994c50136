"""Модуль общих типов данных расчётного ядра.

Содержит термодинамическое состояние, равномерную сетку и табулированные
плотности, которыми обмениваются все расчётные модули.

Classes:
    ThermoState: Обратная температура, масса и ħ во внутренних единицах.
    Grid: Равномерная сетка координат.
    DensityProfile: Нормированная плотность на сетке.
    SamplingResult: Результат метрополисовой выборки.
"""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import trapezoid

from app.physics.units import UNITS

FloatArray = npt.NDArray[np.float64]
BoolArray = npt.NDArray[np.bool_]


class ThermoState(BaseModel):
    """Термодинамическое состояние частицы в одномерном потенциале.

    Attributes:
        beta (float): Обратная температура, 1/Хартри.
        mass (float): Масса в массах электрона.
        hbar (float): Постоянная Планка; в атомных единицах равна 1.
    """

    model_config = ConfigDict(frozen=True)

    beta: float = Field(gt=0)
    mass: float = Field(default=1.0, gt=0)
    hbar: float = Field(default=1.0, gt=0)

    @classmethod
    def from_kelvin(cls, temperature: float, mass: float = 1.0) -> "ThermoState":
        """Создаёт состояние по температуре в кельвинах.

        Args:
            temperature (float): Температура, K.
            mass (float): Масса в массах электрона. Default: 1.0.

        Returns:
            ThermoState: Состояние с β = 1/(k_B T).
        """
        return cls(beta=UNITS.beta_from_kelvin(temperature), mass=mass)

    @property
    def thermal_length(self) -> float:
        """Тепловая длина ħ·sqrt(β/m): ширина свободного кольцевого пути."""
        return self.hbar * float(np.sqrt(self.beta / self.mass))

    @property
    def classical_prefactor(self) -> float:
        """Множитель sqrt(m / 2πβħ²) классической статсуммы."""
        return float(np.sqrt(self.mass / (2.0 * np.pi * self.beta * self.hbar**2)))


class Grid(BaseModel):
    """Равномерная сетка координат (боры).

    Attributes:
        x_min (float): Левая граница.
        x_max (float): Правая граница.
        n_points (int): Число узлов (не меньше 3, предпочтительно нечётное).
    """

    model_config = ConfigDict(frozen=True)

    x_min: float
    x_max: float
    n_points: int = Field(ge=3)

    @model_validator(mode="after")
    def _check_extent(self) -> "Grid":
        """Проверяет, что сетка строго возрастает."""
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        return self

    @property
    def spacing(self) -> float:
        """Шаг сетки h."""
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> FloatArray:
        """Узлы сетки."""
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def weights(self) -> FloatArray:
        """Веса формулы трапеций (h внутри, h/2 на краях)."""
        weights = np.full(self.n_points, self.spacing)
        weights[[0, -1]] *= 0.5
        return weights

    def integrate(self, values: FloatArray) -> float:
        """Интеграл табулированной функции по формуле трапеций."""
        return float(trapezoid(values, dx=self.spacing))

    def refined(self) -> "Grid":
        """Сетка вдвое мельче; старые узлы входят в неё через один."""
        return Grid(x_min=self.x_min, x_max=self.x_max, n_points=2 * self.n_points - 1)

    def extended(self, fraction: float) -> "Grid":
        """Расширяет сетку на долю fraction протяжённости с каждой стороны, сохраняя шаг."""
        extra = max(1, int(np.ceil(fraction * (self.n_points - 1))))
        pad = extra * self.spacing
        return Grid(
            x_min=self.x_min - pad, x_max=self.x_max + pad, n_points=self.n_points + 2 * extra
        )


@dataclass(frozen=True)
class DensityProfile:
    """Нормированная неотрицательная функция на сетке.

    Attributes:
        grid (Grid): Сетка табуляции.
        values (FloatArray): Значения плотности; интеграл по трапециям равен 1.
        log_norm (float): Логарифм нормировочного интеграла исходной функции.
    """

    grid: Grid
    values: FloatArray
    log_norm: float = 0.0

    def __post_init__(self) -> None:
        """Делает массив значений неизменяемым."""
        self.values.setflags(write=False)


@dataclass(frozen=True)
class SamplingResult:
    """Результат метрополисовой выборки по нескольким цепочкам.

    Attributes:
        grid (Grid): Сетка, на которой задан эффективный потенциал и гистограмма.
        chains (List[FloatArray]): Выборки каждой цепочки после прогрева.
        acceptance (List[float]): Доля принятых шагов каждой цепочки.
        step_sizes (List[float]): Зафиксированный после прогрева шаг каждой цепочки.
        histogram (DensityProfile): Объединённая гистограмма как плотность на grid.
        diagnostics (Dict[str, str]): Предупреждения (например, о доле принятия).
    """

    grid: Grid
    chains: List[FloatArray]
    acceptance: List[float]
    step_sizes: List[float]
    histogram: DensityProfile
    diagnostics: Dict[str, str] = field(default_factory=dict)

    @property
    def pooled_acceptance(self) -> float:
        """Доля принятых шагов по всем цепочкам."""
        sizes = np.array([chain.size for chain in self.chains], dtype=float)
        return float(np.dot(sizes, self.acceptance) / sizes.sum())

    @property
    def chain_means(self) -> List[float]:
        """Среднее координаты по каждой цепочке."""
        return [float(np.mean(chain)) for chain in self.chains]
