"""Модуль единиц измерения.

Внутренние расчёты ведутся в атомных единицах (Хартри, бор, масса электрона,
ħ = 1). Спектроскопические параметры потенциала Морса задаются в см⁻¹ и Å,
температуры в кельвинах, массы в а.е.м.; UnitTable переводит их во внутренние
единицы и обратно. Константы берутся из CODATA через scipy.constants.
"""

from pydantic import BaseModel, ConfigDict
from scipy.constants import physical_constants

_HARTREE_PER_INVERSE_METRE: float = physical_constants["hartree-inverse meter relationship"][0]
_BOHR_RADIUS_M: float = physical_constants["Bohr radius"][0]
_ATOMIC_MASS_KG: float = physical_constants["atomic mass constant"][0]
_ELECTRON_MASS_KG: float = physical_constants["electron mass"][0]
_KELVIN_HARTREE: float = physical_constants["kelvin-hartree relationship"][0]


class UnitTable(BaseModel):
    """Таблица коэффициентов перевода во внутренние атомные единицы.

    Attributes:
        wavenumber_per_hartree (float): Число см⁻¹ в одном Хартри.
        angstrom_per_bohr (float): Число Å в одном боре.
        electron_masses_per_amu (float): Число масс электрона в одной а.е.м.
        hartree_per_kelvin (float): Энергия k_B·1 K в Хартри.
    """

    model_config = ConfigDict(frozen=True)

    wavenumber_per_hartree: float = _HARTREE_PER_INVERSE_METRE / 100.0
    angstrom_per_bohr: float = _BOHR_RADIUS_M * 1e10
    electron_masses_per_amu: float = _ATOMIC_MASS_KG / _ELECTRON_MASS_KG
    hartree_per_kelvin: float = _KELVIN_HARTREE

    def wavenumber_to_hartree(self, value: float) -> float:
        """Переводит см⁻¹ в Хартри."""
        return value / self.wavenumber_per_hartree

    def hartree_to_wavenumber(self, value: float) -> float:
        """Переводит Хартри в см⁻¹."""
        return value * self.wavenumber_per_hartree

    def angstrom_to_bohr(self, value: float) -> float:
        """Переводит Å в боры."""
        return value / self.angstrom_per_bohr

    def bohr_to_angstrom(self, value: float) -> float:
        """Переводит боры в Å."""
        return value * self.angstrom_per_bohr

    def amu_to_electron_mass(self, value: float) -> float:
        """Переводит а.е.м. в массы электрона."""
        return value * self.electron_masses_per_amu

    def electron_mass_to_amu(self, value: float) -> float:
        """Переводит массы электрона в а.е.м."""
        return value / self.electron_masses_per_amu

    def kelvin_to_hartree(self, value: float) -> float:
        """Переводит температуру в кельвинах в энергию k_B·T в Хартри."""
        return value * self.hartree_per_kelvin

    def hartree_to_kelvin(self, value: float) -> float:
        """Переводит энергию в Хартри в температуру в кельвинах."""
        return value / self.hartree_per_kelvin

    def beta_from_kelvin(self, temperature: float) -> float:
        """Возвращает обратную температуру β = 1/(k_B T) в 1/Хартри.

        Args:
            temperature (float): Температура в кельвинах, > 0.

        Returns:
            float: β во внутренних единицах.
        """
        return 1.0 / self.kelvin_to_hartree(temperature)


def reduced_mass(mass_a: float, mass_b: float) -> float:
    """Приведённая масса двух атомов (в тех же единицах, что и аргументы)."""
    return mass_a * mass_b / (mass_a + mass_b)


# Массы O и H для связи OH (а.е.м.); в манифест попадают как принятое соглашение
OXYGEN_MASS_AMU: float = 15.999
HYDROGEN_MASS_AMU: float = 1.008

# Единственный экземпляр таблицы единиц
UNITS: UnitTable = UnitTable()
