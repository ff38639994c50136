"""Модуль тестовых фикстур для расчётного ядра и сценариев.

Содержит набор фикстур, используемых при тестировании компонентов:
- потенциалы (гармонический, квартичный, двойная яма, Морс);
- термодинамические состояния и сетки умеренного размера;
- тексты сценариев и временные каталоги для записи результатов.

Фикстуры подобраны так, чтобы тесты выполнялись быстро: сетки явные и
содержат сотни или несколько тысяч узлов.
"""

from pathlib import Path
from typing import Callable

import pytest

from app.physics.models import Grid, ThermoState
from app.physics.potentials import DoubleWell, HarmonicQuartic, Morse


@pytest.fixture
def harmonic() -> HarmonicQuartic:
    """Гармонический осциллятор m = ω = 1.

    Returns:
        HarmonicQuartic: Потенциал x²/2.
    """
    return HarmonicQuartic()


@pytest.fixture
def quartic() -> HarmonicQuartic:
    """Гармонический осциллятор с квартичной добавкой g = 1.

    Returns:
        HarmonicQuartic: Потенциал x²/2 + x⁴/4.
    """
    return HarmonicQuartic(g=1.0)


@pytest.fixture
def double_well() -> DoubleWell:
    """Двойная яма ω = 1, g = 0.1 с минимумами в ±sqrt(10).

    Returns:
        DoubleWell: Потенциал со сдвигом m²ω⁴/(4g) = 2.5.
    """
    return DoubleWell(g=0.1)


@pytest.fixture
def morse() -> Morse:
    """Потенциал Морса с умеренной глубиной во внутренних единицах.

    Returns:
        Morse: D = 0.2, α = 1, x_e = 1.5.
    """
    return Morse(depth=0.2, alpha=1.0, x_e=1.5)


@pytest.fixture
def thermo_unit() -> ThermoState:
    """Состояние β = 1, m = ħ = 1.

    Returns:
        ThermoState: Термодинамическое состояние.
    """
    return ThermoState(beta=1.0)


@pytest.fixture
def wide_grid() -> Grid:
    """Симметричная сетка [−10, 10] с шагом 0.005.

    Returns:
        Grid: 4001 узел.
    """
    return Grid(x_min=-10.0, x_max=10.0, n_points=4001)


@pytest.fixture
def small_grid() -> Grid:
    """Грубая сетка [−6, 6] из 241 узла для быстрых сценариев.

    Returns:
        Grid: Сетка с шагом 0.05.
    """
    return Grid(x_min=-6.0, x_max=6.0, n_points=241)


@pytest.fixture
def scenario_text() -> Callable[..., str]:
    """Фабрика текста сценария с гармонико-квартичным потенциалом.

    Returns:
        Callable[..., str]: Функция, принимающая список методов и дополнительные
        строки и возвращающая текст файла сценария.
    """

    def build(methods: str = "classical, exact, lh-mapped", extra: str = "") -> str:
        """Собирает текст сценария.

        Args:
            methods (str): Значение ключа methods.
            extra (str): Дополнительные строки в конце файла.

        Returns:
            str: Текст сценария.
        """
        return (
            "# квартичный осциллятор\n"
            "name = unit_quartic\n"
            "potential.variant = harmonic_quartic\n"
            "potential.omega = 1.0\n"
            "potential.g = 1.0\n"
            "betas = 1.0, 10.0\n"
            f"methods = {methods}\n"
            "grid.x_min = -6\n"
            "grid.x_max = 6\n"
            "grid.n_points = 241\n"
            "grid.converge = false\n"
            f"{extra}"
        )

    return build


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    """Временный каталог результатов.

    Args:
        tmp_path (Path): Встроенная фикстура pytest.

    Returns:
        Path: Каталог внутри tmp_path.
    """
    return tmp_path / "results"
