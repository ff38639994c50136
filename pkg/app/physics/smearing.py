"""Модуль гауссова сглаживания потенциалов.

Сглаженный потенциал V_{a²}(x̄) — свёртка V с нормальным ядром дисперсии a².
Для полиномов свёртка берётся в замкнутом виде: каждый моном xⁿ переходит в
Σ_p C(n, 2p)(2p−1)!! a^{2p} x̄^{n−2p}. Для прочих потенциалов используется
квадратура Гаусса–Эрмита с удвоением числа узлов до стабилизации результата.

Classes:
    SmearKernel: Дисперсия и способ сглаживания.

Functions:
    smear_polynomial: Сглаженный полином в замкнутом виде.
    smear: Значение V_{a²}(x̄).
    smear_second_derivative: Вторая производная ∂²V_{a²}/∂x̄².
    smear_field: Сглаживание с дисперсией, своей для каждой точки.
"""

import logging
from functools import lru_cache
from typing import Callable, Literal, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite import hermgauss
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import comb, factorial2

from app.errors import SmearingError
from app.physics.models import FloatArray
from app.physics.potentials import BasePotential

# Инициализация логгера
logger = logging.getLogger(__name__)

SmearMode = Literal["analytic", "gauss_hermite"]

# Критерий стабильности квадратуры при удвоении узлов
QUADRATURE_TOLERANCE: float = 1e-10
MAX_NODE_DOUBLINGS: int = 4


class SmearKernel(BaseModel):
    """Гауссово ядро сглаживания.

    Attributes:
        a2 (float): Дисперсия ядра a², бор²; ноль означает тождественное сглаживание.
        mode (SmearMode): analytic для полиномов или gauss_hermite.
        n_nodes (int): Начальное число узлов Гаусса–Эрмита.
    """

    model_config = ConfigDict(frozen=True)

    a2: float = Field(ge=0)
    mode: SmearMode = "gauss_hermite"
    n_nodes: int = Field(default=40, ge=40)

    @classmethod
    def auto(cls, potential: BasePotential, a2: float) -> "SmearKernel":
        """Выбирает аналитический режим для полиномов и квадратуру для остальных.

        Args:
            potential (BasePotential): Сглаживаемый потенциал.
            a2 (float): Дисперсия ядра.

        Returns:
            SmearKernel: Ядро с подходящим режимом.
        """
        mode: SmearMode = "analytic" if potential.as_polynomial() is not None else "gauss_hermite"
        return cls(a2=a2, mode=mode)


def _odd_double_factorial(p: int) -> int:
    """(2p−1)!! с соглашением (−1)!! = 1."""
    if p == 0:
        return 1
    return int(factorial2(2 * p - 1, exact=True))


def smear_polynomial(polynomial: Polynomial, a2: float) -> Polynomial:
    """Сглаживает полином гауссовым ядром дисперсии a2 в замкнутом виде.

    Args:
        polynomial (Polynomial): Исходный полином.
        a2 (float): Дисперсия ядра, ≥ 0.

    Returns:
        Polynomial: Сглаженный полином той же степени.
    """
    coef = np.asarray(polynomial.coef, dtype=float)
    smeared = np.zeros_like(coef)
    for n, c_n in enumerate(coef):
        if c_n == 0.0:
            continue
        for p in range(n // 2 + 1):
            smeared[n - 2 * p] += (
                c_n * comb(n, 2 * p, exact=True) * _odd_double_factorial(p) * a2**p
            )
    return Polynomial(smeared)


def _smear_polynomial_field(polynomial: Polynomial, a2: FloatArray, x: FloatArray) -> FloatArray:
    """Поточечное сглаживание полинома, когда a2 своя в каждой точке."""
    coef = np.asarray(polynomial.coef, dtype=float)
    result = np.zeros(np.broadcast(a2, x).shape)
    for n, c_n in enumerate(coef):
        if c_n == 0.0:
            continue
        for p in range(n // 2 + 1):
            weight = c_n * comb(n, 2 * p, exact=True) * _odd_double_factorial(p)
            result += weight * a2**p * x ** (n - 2 * p)
    return result


@lru_cache(maxsize=16)
def _hermite_rule(n_nodes: int) -> Tuple[FloatArray, FloatArray]:
    """Узлы и веса Гаусса–Эрмита для математического ожидания по N(0, 1)."""
    knots, weights = hermgauss(n_nodes)
    return knots * np.sqrt(2.0), weights / np.sqrt(np.pi)


def _gauss_hermite(
    func: Callable[[FloatArray], FloatArray], a2: FloatArray, x: FloatArray, n_nodes: int
) -> FloatArray:
    """E[func(x + a·z)], z ~ N(0, 1), с удвоением узлов до стабилизации.

    Raises:
        SmearingError: Если результат не стабилизировался за MAX_NODE_DOUBLINGS удвоений.
    """
    width = np.sqrt(a2)[..., None]
    shifted = np.asarray(x, dtype=float)[..., None]

    def integrate(n: int) -> FloatArray:
        """Квадратура с n узлами."""
        knots, weights = _hermite_rule(n)
        return np.asarray(func(shifted + width * knots) @ weights, dtype=float)

    current = integrate(n_nodes)
    for _ in range(MAX_NODE_DOUBLINGS):
        n_nodes *= 2
        refined = integrate(n_nodes)
        scale = np.maximum(np.abs(refined), 1.0)
        change = float(np.max(np.abs(refined - current) / scale)) if refined.size else 0.0
        logger.debug(f"Gauss-Hermite {n_nodes // 2}->{n_nodes} nodes: change {change:.2e}")
        if change < QUADRATURE_TOLERANCE:
            return refined
        current = refined

    logger.error(f"Gauss-Hermite quadrature unstable at {n_nodes} nodes (change {change:.2e})")
    raise SmearingError(f"Gauss-Hermite smearing did not converge with {n_nodes} nodes")


def smear_field(
    potential: BasePotential,
    a2: Union[float, FloatArray],
    x: FloatArray,
    mode: SmearMode,
    n_nodes: int = 40,
    derivative: int = 0,
) -> FloatArray:
    """Сглаживание V (derivative=0) или V'' (derivative=2) с поточечной дисперсией.

    Args:
        potential (BasePotential): Потенциал.
        a2 (Union[float, FloatArray]): Дисперсия, число или массив формы x.
        x (FloatArray): Центры сглаживания.
        mode (SmearMode): Режим сглаживания.
        n_nodes (int): Начальное число узлов квадратуры. Default: 40.
        derivative (int): 0 для V_{a²}, 2 для ∂²V_{a²}/∂x̄². Default: 0.

    Returns:
        FloatArray: Значения в точках x.

    Raises:
        SmearingError: Несовместимый режим или несходящаяся квадратура.
    """
    points = np.asarray(x, dtype=float)
    variance = np.broadcast_to(np.asarray(a2, dtype=float), points.shape)
    if np.any(variance < 0):
        raise SmearingError("Smearing variance must be non-negative")
    if derivative not in (0, 2):
        raise SmearingError(f"Unsupported smearing derivative order {derivative}")

    if mode == "analytic":
        polynomial = potential.as_polynomial()
        if polynomial is None:
            logger.error(f"Analytic smearing requested for {type(potential).__name__}")
            raise SmearingError(
                f"Analytic smearing requires a polynomial potential, got {type(potential).__name__}"
            )
        return _smear_polynomial_field(polynomial.deriv(derivative), variance, points)

    func = potential.value if derivative == 0 else potential.curvature
    if not np.any(variance > 0):
        return np.asarray(func(points), dtype=float)
    return _gauss_hermite(func, variance, points, n_nodes)


def smear(potential: BasePotential, kernel: SmearKernel, x: FloatArray) -> FloatArray:
    """Сглаженный потенциал V_{a²}(x̄).

    Args:
        potential (BasePotential): Потенциал.
        kernel (SmearKernel): Ядро сглаживания.
        x (FloatArray): Точки x̄.

    Returns:
        FloatArray: V_{a²} в точках x̄.
    """
    if kernel.mode == "analytic":
        polynomial = potential.as_polynomial()
        if polynomial is None:
            raise SmearingError(
                f"Analytic smearing requires a polynomial potential, got {type(potential).__name__}"
            )
        return np.asarray(smear_polynomial(polynomial, kernel.a2)(x), dtype=float)
    return smear_field(potential, kernel.a2, x, kernel.mode, kernel.n_nodes)


def smear_second_derivative(
    potential: BasePotential, kernel: SmearKernel, x: FloatArray
) -> FloatArray:
    """Кривизна сглаженного потенциала ∂²V_{a²}/∂x̄².

    В аналитическом режиме дифференцируется сглаженный полином, в режиме
    квадратуры сглаживается V'', так как ядро зависит только от x − x̄.

    Args:
        potential (BasePotential): Потенциал.
        kernel (SmearKernel): Ядро сглаживания.
        x (FloatArray): Точки x̄.

    Returns:
        FloatArray: Кривизна в точках x̄.
    """
    if kernel.mode == "analytic":
        polynomial = potential.as_polynomial()
        if polynomial is None:
            raise SmearingError(
                f"Analytic smearing requires a polynomial potential, got {type(potential).__name__}"
            )
        return np.asarray(smear_polynomial(polynomial, kernel.a2).deriv(2)(x), dtype=float)
    return smear_field(potential, kernel.a2, x, kernel.mode, kernel.n_nodes, derivative=2)
