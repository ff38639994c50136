"""Модуль встроенных сценариев.

Functions:
    quartic_scenarios: Гармонический осциллятор с квартичной добавкой и чисто квартичный.
    morse_scenarios: Потенциал Морса связи O–H.
    double_well_scenarios: Двойная яма.
    build_preset: Сценарии пресета по имени с переопределениями из командной строки.
"""

from typing import Callable, Dict, List, Optional

from app.physics.effective import METHODS, CurvatureMode, CurvaturePolicy
from app.physics.units import HYDROGEN_MASS_AMU, OXYGEN_MASS_AMU
from app.scenario.config import (
    FH_CONVENTION_ALIASES,
    AcceptanceBlock,
    DoubleWellBlock,
    HarmonicQuarticBlock,
    MorseBlock,
    ScenarioConfig,
)

PRESET_BETAS = [0.1, 1.0, 10.0]
MORSE_TEMPERATURES_K = [50.0, 100.0, 300.0, 1000.0]

# Спектроскопические постоянные O–H: см⁻¹ и Å
OH_OMEGA_E_CM = 3737.76
OH_OMEGA_E_CHI_E_CM = 84.881
OH_X_E_ANGSTROM = 0.9697


def quartic_scenarios() -> List[ScenarioConfig]:
    """mω²x²/2 + g x⁴/4 при g ∈ {0, 0.1, 1} и чисто квартичный случай ω = 0, g = 1."""
    scenarios = []
    for g, label in ((0.0, "0"), (0.1, "0.1"), (1.0, "1")):
        if g == 0.0:
            acceptance = AcceptanceBlock(max_l1={"lh-mapped": 1e-6, "lh-renorm": 1e-6})
        else:
            acceptance = AcceptanceBlock(beats_classical=["lh-mapped"], min_beta=10.0)
        scenarios.append(
            ScenarioConfig(
                name=f"quartic_g{label}",
                potential=HarmonicQuarticBlock(variant="harmonic_quartic", omega=1.0, g=g),
                betas=PRESET_BETAS,
                methods=list(METHODS),
                acceptance=acceptance,
            )
        )
    scenarios.append(
        ScenarioConfig(
            name="pure_quartic",
            potential=HarmonicQuarticBlock(variant="harmonic_quartic", omega=0.0, g=1.0),
            betas=PRESET_BETAS,
            methods=list(METHODS),
        )
    )
    return scenarios


def morse_scenarios() -> List[ScenarioConfig]:
    """Морс O–H по спектроскопическим постоянным при 50, 100, 300 и 1000 K."""
    return [
        ScenarioConfig(
            name="morse_oh",
            potential=MorseBlock(
                variant="morse",
                omega_e_cm=OH_OMEGA_E_CM,
                omega_e_chi_e_cm=OH_OMEGA_E_CHI_E_CM,
                x_e_angstrom=OH_X_E_ANGSTROM,
                mass_a_amu=OXYGEN_MASS_AMU,
                mass_b_amu=HYDROGEN_MASS_AMU,
            ),
            temperatures_k=MORSE_TEMPERATURES_K,
            methods=list(METHODS),
            acceptance=AcceptanceBlock(max_l1={"lh-mapped": 0.05}),
            notes=["temperatures 50, 100, 300, 1000 K are an implementation default"],
        )
    ]


def double_well_scenarios() -> List[ScenarioConfig]:
    """Двойная яма при g ∈ {0.1, 0.5}; пороги не задаются."""
    return [
        ScenarioConfig(
            name=f"double_well_g{g:g}",
            potential=DoubleWellBlock(variant="double_well", omega=1.0, g=g),
            betas=PRESET_BETAS,
            methods=list(METHODS),
        )
        for g in (0.1, 0.5)
    ]


PRESETS: Dict[str, Callable[[], List[ScenarioConfig]]] = {
    "fig1": quartic_scenarios,
    "fig2": morse_scenarios,
    "fig3": double_well_scenarios,
}

# Описательные имена пресетов
PRESET_ALIASES: Dict[str, str] = {"quartic": "fig1", "morse": "fig2", "double-well": "fig3"}


def build_preset(
    name: str,
    policy: Optional[CurvatureMode] = None,
    fh_convention: Optional[str] = None,
    seed: Optional[int] = None,
) -> List[ScenarioConfig]:
    """Сценарии пресета с переопределениями.

    Args:
        name (str): fig1, fig2, fig3 или описательное имя quartic, morse,
            double-well.
        policy (Optional[CurvatureMode]): Правило кривизны. Default: None.
        fh_convention (Optional[str]): Ширина ядра FH: eq17, compdetails, twelfth
            или third. Default: None.
        seed (Optional[int]): Базовое зерно. Default: None.

    Returns:
        List[ScenarioConfig]: Сценарии пресета.

    Raises:
        KeyError: Неизвестное имя пресета.
    """
    scenarios = PRESETS[PRESET_ALIASES.get(name, name)]()
    update: Dict[str, object] = {}
    if policy is not None:
        update["policy"] = CurvaturePolicy(mode=policy)
    if fh_convention is not None:
        update["fh_a2_convention"] = FH_CONVENTION_ALIASES.get(fh_convention, fh_convention)
    if seed is not None:
        update["seed"] = seed
    defaults = [key for key in ("policy", "fh_a2_convention", "seed") if key not in update]
    result = []
    for scenario in scenarios:
        notes = list(scenario.notes)
        if defaults:
            notes.append(f"preset defaults used for: {', '.join(defaults)}")
        result.append(scenario.model_copy(update={**update, "notes": notes}))
    return result
