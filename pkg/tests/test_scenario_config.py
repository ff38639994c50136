"""Тесты разбора конфигурации сценариев."""

from pathlib import Path
from typing import Callable

import pytest

from app.errors import ConfigError
from app.physics.potentials import HarmonicQuartic, MonomialSum, Morse
from app.physics.units import UNITS
from app.scenario.config import load_scenario, parse_flat, parse_scenario


def test_parse_flat_types_and_lines() -> None:
    """Тестирует разбор строк, списков, логических значений и комментариев.

    Asserts:
        - Комментарии и пустые строки пропускаются.
        - betas всегда список, true/false — bool.
        - Номер строки сохраняется.
    """
    entries = parse_flat("# заголовок\n\nname = demo  # имя\nbetas = 2\ngrid.converge = false\n")
    assert entries["name"] == ("demo", 3)  # noqa: S101
    assert entries["betas"] == (["2"], 4)  # noqa: S101
    assert entries["grid.converge"] == (False, 5)  # noqa: S101


@pytest.mark.parametrize(
    ("text", "key", "line"),
    [
        ("name = a\njust text\n", "just text", 2),
        ("name = a\nname = b\n", "name", 1),
        ("name =\n", "name", 1),
        ("bad key! = 1\n", "bad key!", 1),
    ],
    ids=["no-equals", "duplicate", "empty", "malformed"],
)
def test_parse_flat_errors(text: str, key: str, line: int) -> None:
    """Тестирует ошибки построчного разбора.

    Args:
        text (str): Текст конфигурации.
        key (str): Ожидаемый ключ в ошибке.
        line (int): Ожидаемая строка.

    Asserts:
        ConfigError с ключом и номером строки.
    """
    with pytest.raises(ConfigError) as info:
        parse_flat(text)
    assert info.value.key == key  # noqa: S101
    assert info.value.line == line  # noqa: S101


def test_parse_scenario(scenario_text: Callable[..., str]) -> None:
    """Тестирует разбор полного сценария.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        - Потенциал, методы и явная сетка разобраны.
        - Температуры упорядочены по β и помечены.
    """
    config = parse_scenario(scenario_text())
    assert config.name == "unit_quartic"  # noqa: S101
    assert config.methods == ["classical", "exact", "lh-mapped"]  # noqa: S101
    assert isinstance(config.build_potential(), HarmonicQuartic)  # noqa: S101
    grid = config.grid.explicit
    assert grid is not None and grid.n_points == 241  # noqa: S101
    assert not config.grid.converge  # noqa: S101
    assert [point.label for point in config.temperature_points()] == ["1", "10"]  # noqa: S101


def test_unknown_key_reports_line(scenario_text: Callable[..., str]) -> None:
    """Тестирует запрет неизвестных ключей.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        ConfigError указывает ключ grid.spacing и строку 12.
    """
    with pytest.raises(ConfigError) as info:
        parse_scenario(scenario_text(extra="grid.spacing = 0.1\n"))
    assert info.value.key == "grid.spacing"  # noqa: S101
    assert info.value.line == 12  # noqa: S101


def test_unknown_method_rejected(scenario_text: Callable[..., str]) -> None:
    """Тестирует отказ для неизвестного метода.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        ConfigError по ключу methods.
    """
    with pytest.raises(ConfigError) as info:
        parse_scenario(scenario_text(methods="classical, wigner"))
    assert info.value.key == "methods"  # noqa: S101
    assert info.value.line == 7  # noqa: S101


def test_repeated_methods_rejected(scenario_text: Callable[..., str]) -> None:
    """Тестирует отказ для повторяющихся методов.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        ConfigError.
    """
    with pytest.raises(ConfigError):
        parse_scenario(scenario_text(methods="fh, fh"))


def test_missing_temperatures_rejected() -> None:
    """Тестирует требование хотя бы одной температуры.

    Asserts:
        ConfigError.
    """
    with pytest.raises(ConfigError):
        parse_scenario("potential.variant = harmonic_quartic\nmethods = classical\n")


def test_non_positive_beta_rejected(scenario_text: Callable[..., str]) -> None:
    """Тестирует отказ для неположительной β.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        ConfigError.
    """
    text = scenario_text().replace("betas = 1.0, 10.0", "betas = 1.0, -2")
    with pytest.raises(ConfigError):
        parse_scenario(text)


def test_morse_spectroscopic_block() -> None:
    """Тестирует Морс по спектроскопическим постоянным и температурам в кельвинах.

    Asserts:
        - Потенциал — Морс, масса частицы — приведённая масса в массах электрона.
        - β получена из температуры.
    """
    text = (
        "name = oh\n"
        "potential.variant = morse\n"
        "potential.omega_e_cm = 3737.76\n"
        "potential.omega_e_chi_e_cm = 84.881\n"
        "potential.x_e_angstrom = 0.9697\n"
        "potential.mu_amu = 0.948\n"
        "temperatures_k = 300\n"
        "methods = classical, lh-mapped\n"
    )
    config = parse_scenario(text)
    assert isinstance(config.build_potential(), Morse)  # noqa: S101
    assert config.particle_mass == pytest.approx(UNITS.amu_to_electron_mass(0.948))  # noqa: S101
    (point,) = config.temperature_points()
    assert point.kelvin == 300.0  # noqa: S101
    assert point.thermo.beta == pytest.approx(UNITS.beta_from_kelvin(300.0))  # noqa: S101


def test_morse_block_needs_mass() -> None:
    """Тестирует отказ спектроскопического Морса без приведённой массы.

    Asserts:
        ConfigError в секции potential.
    """
    text = (
        "potential.variant = morse\n"
        "potential.omega_e_cm = 3737.76\n"
        "potential.omega_e_chi_e_cm = 84.881\n"
        "potential.x_e_angstrom = 0.9697\n"
        "betas = 1\n"
        "methods = classical\n"
    )
    with pytest.raises(ConfigError) as info:
        parse_scenario(text)
    assert info.value.key.startswith("potential")  # noqa: S101


def test_monomial_sum_coefficients() -> None:
    """Тестирует коэффициенты суммы мономов по степеням.

    Asserts:
        Ключи potential.coefficients.<n> превращаются в словарь степеней.
    """
    text = (
        "potential.variant = monomial_sum\n"
        "potential.coefficients.2 = 0.5\n"
        "potential.coefficients.4 = 0.1\n"
        "betas = 1\n"
        "methods = classical, fh\n"
    )
    potential = parse_scenario(text).build_potential()
    assert isinstance(potential, MonomialSum)  # noqa: S101
    assert potential.coefficients == {2: 0.5, 4: 0.1}  # noqa: S101


def test_sampler_and_policy_sections(scenario_text: Callable[..., str]) -> None:
    """Тестирует секции sampler и policy.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        Значения секций доходят до моделей, seed в model_fields_set.
    """
    extra = (
        "policy.mode = continuation\n"
        "policy.cap = 1.2\n"
        "sampler.n_steps = 5000\n"
        "sampler.burn_in = 500\n"
        "sampler.seed = 9\n"
        "sampler.method = fh\n"
    )
    config = parse_scenario(scenario_text(extra=extra))
    assert config.policy.mode == "continuation"  # noqa: S101
    assert config.method_options().policy.cap == 1.2  # noqa: S101
    assert config.sampler is not None  # noqa: S101
    assert config.sampler.method == "fh"  # noqa: S101
    assert "seed" in config.sampler.model_fields_set  # noqa: S101


def test_load_scenario(tmp_path: Path, scenario_text: Callable[..., str]) -> None:
    """Тестирует чтение файла сценария.

    Args:
        tmp_path (Path): Временный каталог.
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        Файл UTF-8 с кириллическим комментарием читается.
    """
    path = tmp_path / "scenario.cfg"
    path.write_text(scenario_text(), encoding="utf-8")
    assert load_scenario(path).name == "unit_quartic"  # noqa: S101


@pytest.mark.parametrize(
    ("name", "expected"),
    [("eq17", "twelfth"), ("compdetails", "third"), ("third", "third")],
)
def test_fh_convention_names(
    name: str, expected: str, scenario_text: Callable[..., str]
) -> None:
    """Тестирует канонические и внутренние имена ширины ядра FH.

    Args:
        name (str): Значение fh_a2_convention в файле.
        expected (str): Ожидаемое внутреннее имя.
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        Имя из файла переводится во внутреннее обозначение.
    """
    config = parse_scenario(scenario_text(extra=f"fh_a2_convention = {name}\n"))
    assert config.fh_a2_convention == expected  # noqa: S101
