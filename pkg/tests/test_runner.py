"""Тесты сценарного раннера.

Сценарии используют явную сетку из 241 узла без сгущения, чтобы прогон
занимал доли секунды.
"""

import json
from pathlib import Path
from typing import Callable

import pytest

from app.errors import ConfigError
from app.scenario.config import parse_scenario
from app.scenario.runner import prepare_grid, run_scenario, sample_scenario


@pytest.mark.asyncio
async def test_run_scenario_compares_against_exact(scenario_text: Callable[..., str]) -> None:
    """Тестирует полный прогон с exact.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        - Две температуры, все методы построены.
        - Сравнения есть для всех методов, кроме exact.
        - Код возврата 0.
    """
    scenario = await run_scenario(parse_scenario(scenario_text()))
    assert len(scenario.temperatures) == 2  # noqa: S101
    for run in scenario.temperatures:
        assert run.ordered_methods() == ["classical", "exact", "lh-mapped"]  # noqa: S101
        assert sorted(run.comparisons) == ["classical", "lh-mapped"]  # noqa: S101
    assert scenario.failures == []  # noqa: S101
    assert scenario.exit_code == 0  # noqa: S101


@pytest.mark.asyncio
async def test_mapped_beats_classical_threshold(scenario_text: Callable[..., str]) -> None:
    """Тестирует порог beats_classical на квартичном осцилляторе.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        При β ≥ 10 lh-mapped ближе к exact, чем классическая плотность.
    """
    extra = "acceptance.beats_classical = lh-mapped\nacceptance.min_beta = 10\n"
    scenario = await run_scenario(parse_scenario(scenario_text(extra=extra)))
    assert scenario.threshold_failures == []  # noqa: S101


@pytest.mark.asyncio
async def test_threshold_violation_sets_exit_code(scenario_text: Callable[..., str]) -> None:
    """Тестирует нарушение порога max_l1.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        - Порог 1e-12 для classical нарушен при обеих температурах.
        - Код возврата 1 без ошибок модулей.
    """
    extra = "acceptance.max_l1.classical = 1e-12\n"
    scenario = await run_scenario(parse_scenario(scenario_text(extra=extra)))
    assert len(scenario.threshold_failures) == 2  # noqa: S101
    assert scenario.failures == []  # noqa: S101
    assert scenario.exit_code == 1  # noqa: S101


@pytest.mark.asyncio
async def test_threshold_without_exact_fails(scenario_text: Callable[..., str]) -> None:
    """Тестирует порог при отсутствии exact.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        Порог без сравнения считается нарушенным.
    """
    extra = "acceptance.max_l1.fh = 0.5\n"
    scenario = await run_scenario(
        parse_scenario(scenario_text(methods="classical, fh", extra=extra))
    )
    assert scenario.temperatures[0].comparisons == {}  # noqa: S101
    assert scenario.exit_code == 1  # noqa: S101


@pytest.mark.asyncio
async def test_failures_are_collected(out_dir: Path) -> None:
    """Тестирует сбор ошибок модулей без прерывания сценария.

    На сетке [−10, 0] из трёх узлов вес exp(−βV) сосредоточен в одном узле,
    и нормировка отказывает для обоих методов.

    Args:
        out_dir (Path): Каталог результатов.

    Asserts:
        - Каждая ошибка собрана как отказ с контекстом.
        - Сводка и manifest записаны, код возврата 1.
    """
    text = (
        "name = broken\n"
        "potential.variant = morse\n"
        "potential.depth = 0.2\n"
        "potential.alpha = 1.0\n"
        "betas = 1.0\n"
        "methods = classical, fh\n"
        "grid.x_min = -10\n"
        "grid.x_max = 0\n"
        "grid.n_points = 3\n"
        "grid.converge = false\n"
    )
    scenario = await run_scenario(parse_scenario(text), out_dir)
    assert scenario.exit_code == 1  # noqa: S101
    assert sorted(failure.stage for failure in scenario.failures) == ["classical", "fh"]  # noqa: S101
    assert (out_dir / "summary_broken.txt").exists()  # noqa: S101
    manifest = json.loads((out_dir / "manifest_broken.json").read_text(encoding="utf-8"))
    assert manifest["failures"]  # noqa: S101
    assert "comparisons" not in manifest  # noqa: S101


def test_prepare_grid_converges_with_exact(scenario_text: Callable[..., str]) -> None:
    """Тестирует сгущение сетки при наличии exact.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        - Сетка не грубее исходной, журнал сгущения не пуст.
        - Результат exact посчитан на итоговой сетке.
    """
    text = scenario_text(extra="grid.tolerance = 1e-5\n").replace(
        "grid.converge = false", "grid.converge = true"
    )
    config = parse_scenario(text)
    point = config.temperature_points()[0]
    grid, exact, log = prepare_grid(config, config.build_potential(), point)
    assert grid.n_points >= 241  # noqa: S101
    assert log  # noqa: S101
    assert exact is not None and exact.profile.grid == grid  # noqa: S101


@pytest.mark.asyncio
async def test_sample_scenario(scenario_text: Callable[..., str], out_dir: Path) -> None:
    """Тестирует выборку по lh-mapped против квадратуры.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.
        out_dir (Path): Каталог результатов.

    Asserts:
        - По строке на температуру, L1 гистограммы мало.
        - Файл sampling_<имя>.csv записан.
    """
    extra = "sampler.n_steps = 40000\nsampler.burn_in = 4000\nsampler.n_chains = 2\n"
    rows, failures = await sample_scenario(parse_scenario(scenario_text(extra=extra)), out_dir)
    assert failures == []  # noqa: S101
    assert [row.label for row in rows] == ["1", "10"]  # noqa: S101
    for row in rows:
        assert row.l1 < 0.2  # noqa: S101
        assert row.second_moment_sigmas < 6.0  # noqa: S101
    assert (out_dir / "sampling_unit_quartic.csv").exists()  # noqa: S101


@pytest.mark.asyncio
async def test_sample_scenario_requires_sampler(scenario_text: Callable[..., str]) -> None:
    """Тестирует отказ выборки без секции sampler.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        ConfigError по ключу sampler.
    """
    with pytest.raises(ConfigError) as info:
        await sample_scenario(parse_scenario(scenario_text()))
    assert info.value.key == "sampler"  # noqa: S101
