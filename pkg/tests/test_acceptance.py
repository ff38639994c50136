"""Тесты приёмочных проверок.

Полные проверки помечены slow и запускаются задачей test-all.
"""

from pathlib import Path

import pytest

from app.scenario.acceptance import (
    CheckOutcome,
    check_determinism,
    check_double_well,
    check_harmonic_exactness,
    check_morse,
    check_oracle,
    format_outcomes,
    run_checks,
)


def test_format_outcomes() -> None:
    """Тестирует текстовый отчёт.

    Asserts:
        Строки PASS/FAIL и итоговый счётчик.
    """
    text = format_outcomes(
        [CheckOutcome("a", True, "ok", 0.5), CheckOutcome("b", False, "bad", 1.0)]
    )
    assert "PASS a (0.5s): ok" in text  # noqa: S101
    assert "FAIL b (1.0s): bad" in text  # noqa: S101
    assert text.endswith("1/2 checks passed\n")  # noqa: S101


@pytest.mark.slow
@pytest.mark.asyncio
async def test_harmonic_exactness_check() -> None:
    """Тестирует проверку точности на гармоническом осцилляторе.

    Asserts:
        Проверка проходит.
    """
    outcome = await check_harmonic_exactness()
    assert outcome.passed, outcome.detail  # noqa: S101


@pytest.mark.slow
@pytest.mark.asyncio
async def test_oracle_check() -> None:
    """Тестирует проверку точного эталона.

    Asserts:
        Проверка проходит.
    """
    outcome = await check_oracle()
    assert outcome.passed, outcome.detail  # noqa: S101


@pytest.mark.slow
@pytest.mark.asyncio
async def test_determinism_check() -> None:
    """Тестирует проверку воспроизводимости.

    Asserts:
        Проверка проходит.
    """
    outcome = await check_determinism()
    assert outcome.passed, outcome.detail  # noqa: S101


@pytest.mark.slow
@pytest.mark.asyncio
async def test_morse_pins_written_then_matched(tmp_path: Path) -> None:
    """Тестирует закрепление значений морзе-пресета.

    Args:
        tmp_path (Path): Временный каталог.

    Asserts:
        - Первый запуск пишет файл.
        - Второй запуск совпадает с записанными значениями.
    """
    pins = tmp_path / "pins.json"
    first = await check_morse(pins)
    assert pins.exists(), first.detail  # noqa: S101
    assert "regression values pinned" in first.detail  # noqa: S101
    second = await check_morse(pins)
    assert "differs from pinned" not in second.detail, second.detail  # noqa: S101


@pytest.mark.slow
@pytest.mark.asyncio
async def test_double_well_check() -> None:
    """Тестирует положение максимумов lh-mapped в двойной яме g = 0.1.

    Asserts:
        Проверка проходит.
    """
    outcome = await check_double_well()
    assert outcome.passed, outcome.detail  # noqa: S101


@pytest.mark.slow
@pytest.mark.asyncio
async def test_run_checks_completes(tmp_path: Path) -> None:
    """Тестирует полный прогон проверок.

    Args:
        tmp_path (Path): Временный каталог для закреплённых значений.

    Asserts:
        - Выполнены все девять проверок, ни одна не завершилась исключением.
        - Точность, эталон, двойная яма и воспроизводимость проходят.
    """
    outcomes = await run_checks(tmp_path / "pins.json")
    by_name = {outcome.name: outcome for outcome in outcomes}
    assert sorted(by_name) == [  # noqa: S101
        "classical_limit",
        "determinism",
        "double_well",
        "harmonic_exactness",
        "morse",
        "oracle",
        "quartic_ordering",
        "sampler",
        "variational_bounds",
    ]
    for outcome in outcomes:
        assert not outcome.detail.startswith("raised"), outcome.detail  # noqa: S101
    for name in ("harmonic_exactness", "oracle", "double_well", "determinism"):
        assert by_name[name].passed, by_name[name].detail  # noqa: S101
