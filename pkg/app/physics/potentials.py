"""Модуль аналитических одномерных потенциалов.

Каждый вариант потенциала вычисляет значение, первую и вторую производные
в замкнутом виде и векторизован по numpy-массивам координат. Полиномиальные
варианты умеют представлять себя как numpy.polynomial.Polynomial, что нужно
для аналитического гауссова сглаживания.

Classes:
    BasePotential: Общий интерфейс потенциалов.
    HarmonicQuartic: V = mω²x²/2 + g x⁴/4.
    DoubleWell: V = −mω²x²/2 + g x⁴/4 + m²ω⁴/(4g), минимум равен нулю.
    Morse: V = D (1 − exp(−α(x − x_e)))².
    MonomialSum: Произвольная сумма мономов.

Functions:
    evaluate: Значение и две производные потенциала.
    build_morse_from_spectroscopy: Потенциал Морса по ω_e, ω_eχ_e, x_e, μ.
    morse_levels: Аналитический спектр потенциала Морса.
"""

import logging
from abc import ABC, abstractmethod
from typing import Annotated, Dict, Literal, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.errors import PotentialError
from app.physics.models import FloatArray
from app.physics.units import UNITS

# Инициализация логгера
logger = logging.getLogger(__name__)

ArrayLike = Union[float, FloatArray]


class BasePotential(BaseModel, ABC):
    """Общий интерфейс аналитического потенциала."""

    model_config = ConfigDict(frozen=True)

    @abstractmethod
    def value(self, x: FloatArray) -> FloatArray:
        """Значение V(x)."""

    @abstractmethod
    def gradient(self, x: FloatArray) -> FloatArray:
        """Первая производная V'(x)."""

    @abstractmethod
    def curvature(self, x: FloatArray) -> FloatArray:
        """Вторая производная V''(x)."""

    @abstractmethod
    def equilibrium(self) -> float:
        """Положение глобального минимума."""

    def as_polynomial(self) -> Optional[Polynomial]:
        """Полиномиальное представление или None для неполиномиальных вариантов."""
        return None

    @property
    def dissociation_limit(self) -> Optional[float]:
        """Асимптотическое значение на бесконечности, если потенциал его имеет."""
        return None

    @property
    def is_even(self) -> bool:
        """Чётен ли потенциал относительно x = 0."""
        return False


class _PolynomialPotential(BasePotential):
    """Потенциал, целиком заданный полиномом."""

    @abstractmethod
    def as_polynomial(self) -> Polynomial:
        """Полиномиальное представление."""

    def value(self, x: FloatArray) -> FloatArray:
        """Значение V(x)."""
        return np.asarray(self.as_polynomial()(x), dtype=float)

    def gradient(self, x: FloatArray) -> FloatArray:
        """Первая производная V'(x)."""
        return np.asarray(self.as_polynomial().deriv(1)(x), dtype=float)

    def curvature(self, x: FloatArray) -> FloatArray:
        """Вторая производная V''(x)."""
        return np.asarray(self.as_polynomial().deriv(2)(x), dtype=float)

    def equilibrium(self) -> float:
        """Глобальный минимум среди вещественных критических точек."""
        polynomial = self.as_polynomial()
        roots = polynomial.deriv(1).roots()
        real = np.real(roots[np.abs(np.imag(roots)) < 1e-10])
        if real.size == 0:
            raise PotentialError("Polynomial potential has no critical point")
        return float(real[np.argmin(polynomial(real))])

    @property
    def is_even(self) -> bool:
        """Чётен ли полином (все нечётные коэффициенты равны нулю)."""
        return bool(np.all(self.as_polynomial().coef[1::2] == 0.0))


class HarmonicQuartic(_PolynomialPotential):
    """Гармонический осциллятор с квартичным возмущением.

    Attributes:
        mass (float): Масса в слагаемом mω²x²/2.
        omega (float): Гармоническая частота (ω = 0 даёт чисто квартичный потенциал).
        g (float): Сила квартичного возмущения.
    """

    variant: Literal["harmonic_quartic"] = "harmonic_quartic"
    mass: float = Field(default=1.0, gt=0)
    omega: float = Field(default=1.0, ge=0)
    g: float = Field(default=0.0, ge=0)

    def as_polynomial(self) -> Polynomial:
        """Полином mω²x²/2 + g x⁴/4."""
        return Polynomial([0.0, 0.0, 0.5 * self.mass * self.omega**2, 0.0, 0.25 * self.g])

    def equilibrium(self) -> float:
        """Минимум в нуле."""
        return 0.0


class DoubleWell(_PolynomialPotential):
    """Симметричная двойная яма −mω²x²/2 + g x⁴/4 + m²ω⁴/(4g).

    Attributes:
        mass (float): Масса в слагаемом −mω²x²/2.
        omega (float): Частота перевёрнутой параболы в нуле.
        g (float): Квартичный коэффициент, > 0.
    """

    variant: Literal["double_well"] = "double_well"
    mass: float = Field(default=1.0, gt=0)
    omega: float = Field(default=1.0, gt=0)
    g: float = Field(gt=0)

    @property
    def offset(self) -> float:
        """Постоянный сдвиг m²ω⁴/(4g), при котором V в минимумах равен нулю."""
        return self.mass**2 * self.omega**4 / (4.0 * self.g)

    def as_polynomial(self) -> Polynomial:
        """Полином двойной ямы с постоянным сдвигом."""
        return Polynomial(
            [self.offset, 0.0, -0.5 * self.mass * self.omega**2, 0.0, 0.25 * self.g]
        )

    def equilibrium(self) -> float:
        """Правый минимум sqrt(mω²/g)."""
        return float(np.sqrt(self.mass * self.omega**2 / self.g))


class MonomialSum(_PolynomialPotential):
    """Сумма мономов Σ c_n xⁿ.

    Attributes:
        coefficients (Dict[int, float]): Коэффициенты по степеням.
    """

    variant: Literal["monomial_sum"] = "monomial_sum"
    coefficients: Dict[int, float]

    @field_validator("coefficients")
    @classmethod
    def _check_powers(cls, value: Dict[int, float]) -> Dict[int, float]:
        """Степени должны быть неотрицательными, а сумма непустой."""
        if not value:
            raise ValueError("at least one monomial is required")
        if min(value) < 0:
            raise ValueError("powers must be non-negative")
        return value

    def as_polynomial(self) -> Polynomial:
        """Полином по словарю коэффициентов."""
        coef = np.zeros(max(self.coefficients) + 1)
        for power, c in self.coefficients.items():
            coef[power] = c
        return Polynomial(coef)


class Morse(BasePotential):
    """Потенциал Морса D (1 − exp(−α(x − x_e)))².

    Attributes:
        depth (float): Глубина ямы D, Хартри.
        alpha (float): Обратная ширина α, 1/бор.
        x_e (float): Равновесное расстояние, бор.
    """

    variant: Literal["morse"] = "morse"
    depth: float = Field(gt=0)
    alpha: float = Field(gt=0)
    x_e: float = 0.0

    def _decay(self, x: FloatArray) -> FloatArray:
        """exp(−α(x − x_e))."""
        return np.exp(-self.alpha * (np.asarray(x, dtype=float) - self.x_e))

    def value(self, x: FloatArray) -> FloatArray:
        """Значение V(x)."""
        e = self._decay(x)
        return self.depth * (1.0 - e) ** 2

    def gradient(self, x: FloatArray) -> FloatArray:
        """Первая производная 2Dα e (1 − e)."""
        e = self._decay(x)
        return 2.0 * self.depth * self.alpha * e * (1.0 - e)

    def curvature(self, x: FloatArray) -> FloatArray:
        """Вторая производная 2Dα² e (2e − 1)."""
        e = self._decay(x)
        return 2.0 * self.depth * self.alpha**2 * e * (2.0 * e - 1.0)

    def equilibrium(self) -> float:
        """Минимум в x_e."""
        return self.x_e

    @property
    def dissociation_limit(self) -> Optional[float]:
        """Предел диссоциации D."""
        return self.depth


PotentialSpec = Annotated[
    Union[HarmonicQuartic, DoubleWell, Morse, MonomialSum],
    Field(discriminator="variant"),
]


def evaluate(potential: BasePotential, x: ArrayLike) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Возвращает (V, V', V'') в точке или на массиве точек.

    Args:
        potential (BasePotential): Потенциал.
        x (ArrayLike): Координата (число или массив), бор.

    Returns:
        Tuple[ArrayLike, ArrayLike, ArrayLike]: Значение и производные той же формы,
        что и x; для скалярного x возвращаются числа.
    """
    points = np.asarray(x, dtype=float)
    result = (potential.value(points), potential.gradient(points), potential.curvature(points))
    if points.ndim == 0:
        return tuple(float(part) for part in result)  # type: ignore[return-value]
    return result


def build_morse_from_spectroscopy(
    omega_e: float, omega_e_chi_e: float, x_e: float, mu: float
) -> Morse:
    """Строит потенциал Морса по спектроскопическим постоянным.

    D = ω_e²/(4 ω_eχ_e), α = sqrt(2μ ω_eχ_e)/ħ; все величины переводятся
    во внутренние единицы.

    Args:
        omega_e (float): Гармоническая частота ω_e, см⁻¹.
        omega_e_chi_e (float): Ангармоничность ω_eχ_e, см⁻¹.
        x_e (float): Равновесное расстояние, Å.
        mu (float): Приведённая масса, а.е.м.

    Returns:
        Morse: Потенциал во внутренних единицах.

    Raises:
        PotentialError: Если хотя бы один параметр не положителен.
    """
    for name, value in {
        "omega_e": omega_e,
        "omega_e_chi_e": omega_e_chi_e,
        "x_e": x_e,
        "mu": mu,
    }.items():
        if not value > 0:
            logger.error(f"Spectroscopic parameter {name}={value} is not positive")
            raise PotentialError(f"{name} must be positive, got {value}")

    depth = UNITS.wavenumber_to_hartree(omega_e**2 / (4.0 * omega_e_chi_e))
    anharmonicity = UNITS.wavenumber_to_hartree(omega_e_chi_e)
    alpha = float(np.sqrt(2.0 * UNITS.amu_to_electron_mass(mu) * anharmonicity))
    morse = Morse(depth=depth, alpha=alpha, x_e=UNITS.angstrom_to_bohr(x_e))
    logger.debug(f"Built Morse potential D={morse.depth:.6g} Eh, alpha={morse.alpha:.6g}")
    return morse


def morse_levels(morse: Morse, mass: float, count: int, hbar: float = 1.0) -> FloatArray:
    """Аналитические уровни Морса E_n = ħω₀(n+½) − (ħω₀)²(n+½)²/(4D).

    Args:
        morse (Morse): Потенциал.
        mass (float): Масса частицы (масс электрона).
        count (int): Число нижних уровней.
        hbar (float): Постоянная Планка. Default: 1.0.

    Returns:
        FloatArray: Энергии уровней, Хартри.
    """
    omega0 = morse.alpha * np.sqrt(2.0 * morse.depth / mass)
    n = np.arange(count) + 0.5
    quantum = hbar * omega0
    return quantum * n - quantum**2 * n**2 / (4.0 * morse.depth)
