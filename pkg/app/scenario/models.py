"""Модуль моделей результатов сценария.

Classes:
    Failure: Ошибка одного задания с контекстом (метод, β, границы сетки).
    TemperatureRun: Результаты всех методов при одной температуре.
    ScenarioRun: Результат сценария целиком.
    SamplingRow: Сравнение выборки Метрополиса с квадратурой при одном β.
    Manifest: Метаданные прогона для manifest-файла.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from app.physics.effective import METHODS, MethodKey, MethodResult
from app.physics.models import Grid
from app.physics.oracle import RefinementStep
from app.physics.statistics import ComparisonReport
from app.scenario.config import ScenarioConfig, TemperaturePoint


@dataclass(frozen=True)
class Failure:
    """Ошибка задания.

    Attributes:
        stage (str): Этап: grid, метод или sample.
        label (str): Метка температуры.
        beta (float): Обратная температура.
        x_min (float): Левая граница сетки или NaN, если сетки нет.
        x_max (float): Правая граница сетки или NaN.
        message (str): Текст ошибки.
    """

    stage: str
    label: str
    beta: float
    x_min: float
    x_max: float
    message: str

    def describe(self) -> str:
        """Строка для лога и отчёта."""
        return (
            f"{self.stage} failed at beta={self.beta:.6g} on "
            f"[{self.x_min:.6g}, {self.x_max:.6g}]: {self.message}"
        )


@dataclass
class TemperatureRun:
    """Результаты при одной температуре на общей сетке."""

    point: TemperaturePoint
    grid: Grid
    results: Dict[MethodKey, MethodResult] = field(default_factory=dict)
    comparisons: Dict[MethodKey, ComparisonReport] = field(default_factory=dict)
    refinement: List[RefinementStep] = field(default_factory=list)

    def ordered_methods(self) -> List[MethodKey]:
        """Методы в каноническом порядке столбцов."""
        return [method for method in METHODS if method in self.results]


@dataclass
class ScenarioRun:
    """Результат сценария.

    Attributes:
        config (ScenarioConfig): Конфигурация.
        temperatures (List[TemperatureRun]): Результаты по возрастанию β.
        failures (List[Failure]): Ошибки модулей.
        threshold_failures (List[str]): Нарушенные пороги приёмки.
    """

    config: ScenarioConfig
    temperatures: List[TemperatureRun] = field(default_factory=list)
    failures: List[Failure] = field(default_factory=list)
    threshold_failures: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        """0, только если нет ни ошибок модулей, ни нарушенных порогов."""
        return 1 if self.failures or self.threshold_failures else 0


@dataclass(frozen=True)
class SamplingRow:
    """Выборка против квадратуры по той же плотности.

    Attributes:
        label (str): Метка температуры.
        beta (float): Обратная температура.
        method (MethodKey): Метод, задавший V_eff.
        l1 (float): L1 между гистограммой и квадратурной плотностью.
        mean_quadrature (float): ⟨x⟩ по квадратуре.
        mean_sampled (float): ⟨x⟩ по выборке.
        mean_error (float): Стандартная ошибка ⟨x⟩.
        second_moment_quadrature (float): ⟨x²⟩ по квадратуре.
        second_moment_sampled (float): ⟨x²⟩ по выборке.
        second_moment_error (float): Стандартная ошибка ⟨x²⟩.
        acceptance (float): Доля принятия по всем цепочкам.
        warnings (int): Число предупреждений о доле принятия.
    """

    label: str
    beta: float
    method: MethodKey
    l1: float
    mean_quadrature: float
    mean_sampled: float
    mean_error: float
    second_moment_quadrature: float
    second_moment_sampled: float
    second_moment_error: float
    acceptance: float
    warnings: int

    @property
    def second_moment_sigmas(self) -> float:
        """Расхождение ⟨x²⟩ в единицах стандартной ошибки."""
        delta = abs(self.second_moment_sampled - self.second_moment_quadrature)
        if self.second_moment_error == 0.0:
            return 0.0 if delta == 0.0 else math.inf
        return delta / self.second_moment_error


class ManifestTemperature(BaseModel):
    """Запись температуры в manifest."""

    model_config = ConfigDict(frozen=True)

    label: str
    beta: float
    kelvin: Optional[float] = None
    x_min: float
    x_max: float
    n_points: int
    partition_functions: Dict[str, Optional[float]]
    diagnostics: Dict[str, Dict[str, float]]
    refinement_steps: int


class Manifest(BaseModel):
    """Метаданные прогона; без отметок времени, чтобы повторный прогон совпадал побайтно."""

    model_config = ConfigDict(frozen=True)

    scenario: str
    version: str
    units: Dict[str, str]
    conventions: Dict[str, object]
    seeds: Dict[str, int]
    potential: Dict[str, object]
    methods: List[str]
    temperatures: List[ManifestTemperature]
    comparisons: Optional[Dict[str, Dict[str, Dict[str, Optional[float]]]]] = None
    failures: List[str]
    threshold_failures: List[str]
    notes: List[str]
