"""Тесты записи результатов сценария."""

import json
from pathlib import Path
from typing import Callable

import pytest

from app.scenario.config import parse_scenario
from app.scenario.output import build_manifest, format_float, report
from app.scenario.runner import run_scenario


def test_format_float_round_trips() -> None:
    """Тестирует запись чисел с 17 значащими цифрами.

    Asserts:
        - 0.1 пишется так, что читается обратно без потерь.
        - None превращается в пустую строку.
    """
    assert float(format_float(0.1)) == 0.1  # noqa: S101
    assert format_float(0.1) == "0.10000000000000001"  # noqa: S101
    assert format_float(None) == ""  # noqa: S101


@pytest.mark.asyncio
async def test_written_files(scenario_text: Callable[..., str], out_dir: Path) -> None:
    """Тестирует набор файлов, заголовки и переводы строк.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.
        out_dir (Path): Каталог результатов.

    Asserts:
        - Файлы на каждую температуру и сводки записаны.
        - Заголовок таблицы: x и методы в каноническом порядке с подчёркиваниями.
        - Строки заканчиваются LF, число строк равно числу узлов плюс заголовок.
    """
    await run_scenario(parse_scenario(scenario_text()), out_dir)
    names = sorted(path.name for path in out_dir.iterdir())
    assert names == [  # noqa: S101
        "manifest_unit_quartic.json",
        "pdf_unit_quartic_b1.csv",
        "pdf_unit_quartic_b10.csv",
        "summary_unit_quartic.csv",
        "summary_unit_quartic.txt",
        "veff_unit_quartic_b1.csv",
        "veff_unit_quartic_b10.csv",
    ]
    data = (out_dir / "pdf_unit_quartic_b1.csv").read_bytes()
    assert b"\r\n" not in data  # noqa: S101
    lines = data.decode("utf-8").splitlines()
    assert lines[0] == "x,classical,exact,lh_mapped"  # noqa: S101
    assert len(lines) == 242  # noqa: S101
    assert lines[1].split(",")[0] == "-6"  # noqa: S101

    summary = (out_dir / "summary_unit_quartic.csv").read_text(encoding="utf-8").splitlines()
    assert summary[0] == "beta,method,l1,kl,js,delta_mean,delta_x2,log_z"  # noqa: S101
    assert len(summary) == 1 + 2 * 3  # noqa: S101


@pytest.mark.asyncio
async def test_manifest_content(scenario_text: Callable[..., str], out_dir: Path) -> None:
    """Тестирует содержимое manifest.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.
        out_dir (Path): Каталог результатов.

    Asserts:
        - Есть блок comparisons с метками температур.
        - Записаны зерно, соглашения и сетка.
    """
    await run_scenario(parse_scenario(scenario_text()), out_dir)
    manifest = json.loads((out_dir / "manifest_unit_quartic.json").read_text(encoding="utf-8"))
    assert manifest["scenario"] == "unit_quartic"  # noqa: S101
    assert manifest["seeds"] == {"scenario": 20240601}  # noqa: S101
    assert manifest["conventions"]["fh_a2_convention"] == "twelfth"  # noqa: S101
    assert sorted(manifest["comparisons"]) == ["1", "10"]  # noqa: S101
    assert "lh-mapped" in manifest["comparisons"]["10"]  # noqa: S101
    assert manifest["temperatures"][0]["n_points"] == 241  # noqa: S101


@pytest.mark.asyncio
async def test_manifest_without_exact(scenario_text: Callable[..., str]) -> None:
    """Тестирует manifest без exact.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.

    Asserts:
        Блок comparisons отсутствует, а сводка не содержит метрик.
    """
    scenario = await run_scenario(parse_scenario(scenario_text(methods="classical, fh")))
    assert build_manifest(scenario).comparisons is None  # noqa: S101
    text = report(scenario)
    assert "status ok" in text  # noqa: S101


@pytest.mark.asyncio
async def test_reruns_are_byte_identical(
    scenario_text: Callable[..., str], tmp_path: Path
) -> None:
    """Тестирует побайтовую воспроизводимость файлов.

    Args:
        scenario_text (Callable[..., str]): Фабрика текста сценария.
        tmp_path (Path): Временный каталог.

    Asserts:
        Два прогона одного сценария дают одинаковые файлы.
    """
    config = parse_scenario(scenario_text(methods="classical, fh, fk, lh-mapped, exact"))
    first, second = tmp_path / "first", tmp_path / "second"
    await run_scenario(config, first)
    await run_scenario(config, second)
    for path in sorted(first.iterdir()):
        assert path.read_bytes() == (second / path.name).read_bytes()  # noqa: S101
