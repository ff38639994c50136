"""Тесты аналитических потенциалов и перевода единиц.

Проверяются значения и производные вариантов потенциала, сдвиг двойной ямы,
построение потенциала Морса по спектроскопическим постоянным и его
аналитический спектр.
"""

import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError

from app.errors import PotentialError
from app.physics.potentials import (
    DoubleWell,
    HarmonicQuartic,
    MonomialSum,
    Morse,
    PotentialSpec,
    build_morse_from_spectroscopy,
    evaluate,
    morse_levels,
)
from app.physics.units import HYDROGEN_MASS_AMU, OXYGEN_MASS_AMU, UNITS, reduced_mass


def test_harmonic_quartic_values() -> None:
    """Тестирует значение и производные x²/2 + g x⁴/4 при x = 1.

    Asserts:
        (V, V', V'') = (0.75, 2, 4) для g = 1.
    """
    value, gradient, curvature = evaluate(HarmonicQuartic(g=1.0), 1.0)
    assert value == pytest.approx(0.75)  # noqa: S101
    assert gradient == pytest.approx(2.0)  # noqa: S101
    assert curvature == pytest.approx(4.0)  # noqa: S101


def test_double_well_offset(double_well: DoubleWell) -> None:
    """Тестирует сдвиг и высоту барьера двойной ямы.

    Args:
        double_well (DoubleWell): Двойная яма g = 0.1.

    Asserts:
        - V(0) = m²ω⁴/(4g) = 2.5, V'(0) = 0, V''(0) = −1.
        - V в минимумах ±sqrt(10) равен нулю, ниже нуля потенциал не опускается.
    """
    assert evaluate(double_well, 0.0) == pytest.approx((2.5, 0.0, -1.0))  # noqa: S101
    minimum = double_well.equilibrium()
    assert minimum == pytest.approx(np.sqrt(10.0))  # noqa: S101
    for x in (minimum, -minimum):
        assert float(double_well.value(np.asarray(x))) == pytest.approx(0.0, abs=1e-12)  # noqa: S101
    x = np.linspace(-6.0, 6.0, 1201)
    assert double_well.value(x).min() >= -1e-12  # noqa: S101


def test_pure_quartic_equilibrium_and_parity() -> None:
    """Тестирует чисто квартичный потенциал.

    Asserts:
        - Минимум в нуле.
        - Потенциал чётный, Морс — нет.
    """
    pure = HarmonicQuartic(omega=0.0, g=1.0)
    assert pure.equilibrium() == pytest.approx(0.0, abs=1e-6)  # noqa: S101
    assert pure.is_even  # noqa: S101
    assert not Morse(depth=0.2, alpha=1.0).is_even  # noqa: S101


def test_monomial_sum_matches_polynomial() -> None:
    """Тестирует сумму мономов против явного выражения.

    Asserts:
        V(x) = 0.5x² − 0.1x³ + 0.25x⁴ на массиве точек.
    """
    potential = MonomialSum(coefficients={2: 0.5, 3: -0.1, 4: 0.25})
    x = np.linspace(-2.0, 2.0, 9)
    expected = 0.5 * x**2 - 0.1 * x**3 + 0.25 * x**4
    assert np.allclose(potential.value(x), expected)  # noqa: S101


def test_monomial_sum_rejects_negative_power() -> None:
    """Тестирует отказ от отрицательных степеней.

    Asserts:
        Создание MonomialSum с ключом −1 вызывает ValidationError.
    """
    with pytest.raises(ValidationError):
        MonomialSum(coefficients={-1: 1.0})


def test_potential_spec_discriminator() -> None:
    """Тестирует выбор варианта по полю variant.

    Asserts:
        Словарь с variant = morse превращается в Morse.
    """
    adapter: TypeAdapter[object] = TypeAdapter(PotentialSpec)
    potential = adapter.validate_python({"variant": "morse", "depth": 0.1, "alpha": 1.2})
    assert isinstance(potential, Morse)  # noqa: S101


def test_morse_derivatives_at_minimum(morse: Morse) -> None:
    """Тестирует Морс в минимуме.

    Args:
        morse (Morse): Потенциал Морса.

    Asserts:
        V(x_e) = 0, V'(x_e) = 0, V''(x_e) = 2Dα².
    """
    value, gradient, curvature = evaluate(morse, morse.x_e)
    assert value == pytest.approx(0.0, abs=1e-15)  # noqa: S101
    assert gradient == pytest.approx(0.0, abs=1e-15)  # noqa: S101
    assert curvature == pytest.approx(2.0 * morse.depth * morse.alpha**2)  # noqa: S101


def test_morse_from_spectroscopy_recovers_constants() -> None:
    """Тестирует построение Морса O–H по ω_e, ω_eχ_e и x_e.

    Asserts:
        - D = ω_e²/(4ω_eχ_e) в см⁻¹.
        - Аналитический интервал E₁ − E₀ равен ω_e − 2ω_eχ_e.
    """
    mu = reduced_mass(OXYGEN_MASS_AMU, HYDROGEN_MASS_AMU)
    morse = build_morse_from_spectroscopy(3737.76, 84.881, 0.9697, mu)
    depth_cm = UNITS.hartree_to_wavenumber(morse.depth)
    assert depth_cm == pytest.approx(3737.76**2 / (4.0 * 84.881), rel=1e-10)  # noqa: S101

    levels = morse_levels(morse, UNITS.amu_to_electron_mass(mu), 2)
    gap_cm = UNITS.hartree_to_wavenumber(float(levels[1] - levels[0]))
    assert gap_cm == pytest.approx(3737.76 - 2.0 * 84.881, rel=1e-8)  # noqa: S101


def test_morse_from_spectroscopy_rejects_non_positive() -> None:
    """Тестирует отказ от неположительных параметров.

    Asserts:
        Нулевая приведённая масса вызывает PotentialError.
    """
    with pytest.raises(PotentialError):
        build_morse_from_spectroscopy(3737.76, 84.881, 0.9697, 0.0)


def test_kelvin_conversion() -> None:
    """Тестирует перевод температуры в β.

    Asserts:
        β·k_B·T = 1 при T = 300 K.
    """
    beta = UNITS.beta_from_kelvin(300.0)
    assert beta * UNITS.kelvin_to_hartree(300.0) == pytest.approx(1.0)  # noqa: S101
    assert UNITS.hartree_to_kelvin(UNITS.kelvin_to_hartree(300.0)) == pytest.approx(  # noqa: S101
        300.0
    )
