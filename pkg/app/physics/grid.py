"""Модуль автоматического построения сетки.

Протяжённость сетки определяется энергетическим порогом E_cap над минимумом
потенциала, шаг определяется меньшей из двух длин: тепловой длиной
ħ·sqrt(β/m) и длиной нулевых колебаний в окрестности минимума.
"""

import logging
from typing import List

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm

from app.config import config
from app.errors import GridError
from app.physics.models import Grid, ThermoState
from app.physics.potentials import BasePotential

# Инициализация логгера
logger = logging.getLogger(__name__)

# Нижняя граница кривизны при оценке характерной частоты
CURVATURE_FLOOR: float = 1e-12

# Узлов на длину нулевых колебаний и на тепловую длину
POINTS_PER_ZERO_POINT_LENGTH: int = 8
POINTS_PER_THERMAL_LENGTH: int = 2

MIN_GRID_POINTS: int = 101

# Доля глубины ямы, выше которой сетка не продолжается для потенциалов с плато
PLATEAU_FRACTION: float = 0.95

_SEARCH_LIMIT: float = 1e6


def _energy_above_minimum(potential: BasePotential, x: float, v_min: float) -> float:
    """V(x) − V_min для скалярного x."""
    return float(potential.value(np.asarray(x, dtype=float))) - v_min


def _reach(
    potential: BasePotential, origin: float, direction: float, v_min: float, e_cap: float
) -> float:
    """Расстояние от origin вдоль direction до точки, где V − V_min = e_cap.

    Raises:
        GridError: Если потенциал опускается ниже V_min или не достигает e_cap.
    """
    tolerance = 1e-9 * max(1.0, abs(v_min), e_cap)
    previous, step = 0.0, 0.05
    while step < _SEARCH_LIMIT:
        excess = _energy_above_minimum(potential, origin + direction * step, v_min)
        if excess < -tolerance:
            logger.error(f"Potential drops below its minimum at x={origin + direction * step:.6g}")
            raise GridError(
                f"Potential is unbounded below near x={origin + direction * step:.6g}"
            )
        if excess >= e_cap:
            return float(
                brentq(
                    lambda r: _energy_above_minimum(potential, origin + direction * r, v_min)
                    - e_cap,
                    previous,
                    step,
                )
            )
        previous, step = step, 2.0 * step
    logger.error(f"Potential never exceeds E_cap={e_cap:.6g} within the search window")
    raise GridError("Potential does not rise above the energy cap within the search window")


def zero_point_length(potential: BasePotential, thermo: ThermoState) -> float:
    """Длина ℓ, на которой V(x_0 ± ℓ) − V_min = ħ²/(2mℓ²).

    Для гармонического осциллятора ℓ² = ħ/(mω), то есть ℓ = √2·σ основного
    состояния. Возвращается меньшее из значений по двум сторонам.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Масса и ħ.

    Returns:
        float: Длина нулевых колебаний.
    """
    origin = potential.equilibrium()
    v_min = float(potential.value(np.asarray(origin)))
    kinetic = thermo.hbar**2 / (2.0 * thermo.mass)

    lengths: List[float] = []
    for direction in (-1.0, 1.0):

        def balance(r: float, direction: float = direction) -> float:
            """Разность потенциальной и кинетической оценок энергии."""
            return _energy_above_minimum(potential, origin + direction * r, v_min) - kinetic / r**2

        low, high = 1e-8, 1e-3
        while balance(high) < 0.0 and high < _SEARCH_LIMIT:
            low, high = high, 2.0 * high
        if balance(high) < 0.0:
            continue
        lengths.append(float(brentq(balance, low, high)))

    if not lengths:
        raise GridError("Unable to determine the zero-point length of the potential")
    return min(lengths)


def energy_cap(potential: BasePotential, thermo: ThermoState) -> float:
    """Порог E_cap = max(20/β, 10·ħω_char), ограниченный плато потенциала.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.

    Returns:
        float: Энергетический порог над минимумом.
    """
    origin = potential.equilibrium()
    v_min = float(potential.value(np.asarray(origin)))
    curvature = float(potential.curvature(np.asarray(origin)))
    omega_char = float(np.sqrt(max(curvature, CURVATURE_FLOOR) / thermo.mass))
    cap = max(20.0 / thermo.beta, 10.0 * thermo.hbar * omega_char)

    limit = potential.dissociation_limit
    if limit is not None and cap > PLATEAU_FRACTION * (limit - v_min):
        clipped = PLATEAU_FRACTION * (limit - v_min)
        logger.warning(f"Energy cap {cap:.6g} clipped to {clipped:.6g} below the plateau")
        cap = clipped
    return cap


def auto_grid(
    potential: BasePotential, thermo: ThermoState, coverage: float = 0.999999
) -> Grid:
    """Строит сетку, покрывающую тепловую и основную плотность.

    Протяжённость содержит все x с V(x) − V_min ≤ E_cap, а также все
    критические точки полиномиальных потенциалов ниже порога. Затем сетка
    расширяется до z·σ основного состояния, где z — квантиль нормального
    распределения для заданного покрытия. Классическая плотность покрыта
    самим порогом: E_cap ≥ 20/β.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        coverage (float): Требуемая доля массы внутри сетки, 0 < coverage < 1.

    Returns:
        Grid: Равномерная сетка с нечётным числом узлов.

    Raises:
        GridError: Если покрытие вне (0, 1) или потенциал не ограничен снизу.
    """
    if not 0.0 < coverage < 1.0:
        raise GridError(f"Coverage must lie in (0, 1), got {coverage}")

    origin = potential.equilibrium()
    v_min = float(potential.value(np.asarray(origin)))
    cap = energy_cap(potential, thermo)

    # Все минимумы ниже порога должны оказаться внутри сетки
    seeds = [origin]
    polynomial = potential.as_polynomial()
    if polynomial is not None:
        roots = polynomial.deriv(1).roots()
        real = np.real(roots[np.abs(np.imag(roots)) < 1e-10])
        seeds.extend(float(r) for r in real if polynomial(r) - v_min <= cap)
    left_seed, right_seed = min(seeds), max(seeds)

    x_min = left_seed - _reach(potential, left_seed, -1.0, v_min, cap)
    x_max = right_seed + _reach(potential, right_seed, 1.0, v_min, cap)

    ell = zero_point_length(potential, thermo)
    z = float(norm.isf((1.0 - coverage) / 2.0))
    half_width = 1.1 * z * ell / np.sqrt(2.0)
    x_min = min(x_min, origin - half_width)
    x_max = max(x_max, origin + half_width)
    if potential.is_even:
        x_max = max(abs(x_min), abs(x_max))
        x_min = -x_max

    spacing = min(
        ell / POINTS_PER_ZERO_POINT_LENGTH,
        thermo.thermal_length / POINTS_PER_THERMAL_LENGTH,
    )
    n_points = int(np.ceil((x_max - x_min) / spacing)) + 1
    n_points = max(n_points, MIN_GRID_POINTS)
    if n_points % 2 == 0:
        n_points += 1
    if n_points > config.MAX_GRID_POINTS:
        logger.warning(
            f"Grid of {n_points} points capped at MAX_GRID_POINTS={config.MAX_GRID_POINTS}"
        )
        n_points = config.MAX_GRID_POINTS - (1 - config.MAX_GRID_POINTS % 2)

    grid = Grid(x_min=x_min, x_max=x_max, n_points=n_points)
    logger.debug(
        f"Auto grid [{grid.x_min:.6g}, {grid.x_max:.6g}] with {grid.n_points} points "
        f"(E_cap={cap:.6g}, l={ell:.4g})"
    )
    return grid
