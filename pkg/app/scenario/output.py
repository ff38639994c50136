"""Модуль записи результатов сценария.

Файлы на температуру: ``pdf_<сценарий>_b<β>.csv`` и ``veff_<сценарий>_b<β>.csv``
со столбцами x и методами в каноническом порядке. На сценарий:
``summary_<сценарий>.csv``, ``summary_<сценарий>.txt`` и
``manifest_<сценарий>.json``. Числа пишутся с 17 значащими цифрами, строки
заканчиваются LF, кодировка UTF-8.

Functions:
    format_float: Число с 17 значащими цифрами.
    report: Текстовая сводка сравнений.
    build_manifest: Метаданные прогона.
    write_outputs: Запись всех файлов сценария.
    write_sampling: Запись сводки выборки.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from app import __version__
from app.config import config as app_config
from app.physics.effective import MethodKey
from app.physics.units import HYDROGEN_MASS_AMU, OXYGEN_MASS_AMU, UNITS
from app.scenario.models import (
    Manifest,
    ManifestTemperature,
    SamplingRow,
    ScenarioRun,
    TemperatureRun,
)

# Инициализация логгера
logger = logging.getLogger(__name__)

SUMMARY_HEADER = ("beta", "method", "l1", "kl", "js", "delta_mean", "delta_x2", "log_z")


def format_float(value: Optional[float]) -> str:
    """Число с 17 значащими цифрами; None — пустая строка."""
    if value is None:
        return ""
    return format(float(value), ".17g")


def column_name(method: MethodKey) -> str:
    """Имя столбца метода: дефисы заменены подчёркиваниями."""
    return method.replace("-", "_")


@retry(
    retry=retry_if_exception_type(OSError),
    wait=wait_exponential(multiplier=1, min=2, max=10),
    stop=stop_after_attempt(app_config.IO_RETRIES),
    reraise=True,
)
def _write_text(path: Path, text: str) -> None:
    """Записывает текст в файл UTF-8 с LF."""
    try:
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.debug(f"Wrote {path}")
    except OSError as e:
        logger.error(f"Failed to write {path}: {e}")
        raise


def _csv_text(header: Sequence[str], rows: List[List[str]]) -> str:
    """CSV в памяти с разделителем строк LF."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _table(run: TemperatureRun, kind: str) -> str:
    """Таблица плотностей (kind='pdf') или потенциалов (kind='veff')."""
    methods = run.ordered_methods()
    columns = [
        run.results[m].profile.values if kind == "pdf" else run.results[m].v_eff for m in methods
    ]
    x = run.grid.points
    rows = [
        [format_float(x[i])] + [format_float(column[i]) for column in columns]
        for i in range(x.size)
    ]
    return _csv_text(["x"] + [column_name(m) for m in methods], rows)


def _summary_rows(scenario: ScenarioRun) -> List[List[str]]:
    """Строки сводки по (β, метод), отсортированные по β и порядку методов."""
    rows: List[List[str]] = []
    for run in scenario.temperatures:
        for method in run.ordered_methods():
            comparison = run.comparisons.get(method)
            rows.append(
                [
                    run.point.label,
                    method,
                    format_float(comparison.l1 if comparison else None),
                    format_float(comparison.kl if comparison else None),
                    format_float(comparison.js if comparison else None),
                    format_float(comparison.delta_mean if comparison else None),
                    format_float(comparison.delta_second_moment if comparison else None),
                    format_float(run.results[method].log_z),
                ]
            )
    return rows


def report(scenario: ScenarioRun) -> str:
    """Текстовая сводка: L1, KL и Δ⟨x²⟩ по (β, метод) и итог порогов.

    Args:
        scenario (ScenarioRun): Результат сценария.

    Returns:
        str: Сводка для stdout и файла.
    """
    lines = [f"scenario {scenario.config.name}"]
    lines.append(f"{'beta':>12} {'method':>10} {'L1':>12} {'KL':>12} {'dx2':>12}")
    for run in scenario.temperatures:
        for method in run.ordered_methods():
            comparison = run.comparisons.get(method)
            if comparison is None:
                lines.append(f"{run.point.label:>12} {method:>10} {'-':>12} {'-':>12} {'-':>12}")
                continue
            lines.append(
                f"{run.point.label:>12} {method:>10} {comparison.l1:>12.4e} "
                f"{comparison.kl:>12.4e} {comparison.delta_second_moment:>12.4e}"
            )
    for failure in scenario.failures:
        lines.append(f"FAILED {failure.describe()}")
    for message in scenario.threshold_failures:
        lines.append(f"THRESHOLD {message}")
    lines.append("status ok" if scenario.exit_code == 0 else "status failed")
    return "\n".join(lines) + "\n"


def build_manifest(scenario: ScenarioRun) -> Manifest:
    """Собирает метаданные прогона.

    Блок comparisons присутствует, только если среди методов есть exact.

    Args:
        scenario (ScenarioRun): Результат сценария.

    Returns:
        Manifest: Метаданные.
    """
    config = scenario.config
    temperatures = []
    comparisons: Dict[str, Dict[str, Dict[str, Optional[float]]]] = {}
    for run in scenario.temperatures:
        temperatures.append(
            ManifestTemperature(
                label=run.point.label,
                beta=run.point.thermo.beta,
                kelvin=run.point.kelvin,
                x_min=run.grid.x_min,
                x_max=run.grid.x_max,
                n_points=run.grid.n_points,
                partition_functions={
                    m: run.results[m].partition_function for m in run.ordered_methods()
                },
                diagnostics={m: dict(run.results[m].diagnostics) for m in run.ordered_methods()},
                refinement_steps=len(run.refinement),
            )
        )
        if run.comparisons:
            comparisons[run.point.label] = {
                m: report_.model_dump() for m, report_ in sorted(run.comparisons.items())
            }

    return Manifest(
        scenario=config.name,
        version=__version__,
        units={"energy": "hartree", "length": "bohr", "mass": "electron_mass", "hbar": "1"},
        conventions={
            "fh_a2_convention": config.fh_a2_convention,
            "policy": config.policy.mode,
            "policy_cap": config.policy.cap,
            "oh_masses_amu": {"O": OXYGEN_MASS_AMU, "H": HYDROGEN_MASS_AMU},
            "amu_in_electron_masses": UNITS.amu_to_electron_mass(1.0),
            "particle_mass": config.particle_mass,
        },
        seeds={"scenario": config.seed},
        potential=config.build_potential().model_dump(),
        methods=list(config.methods),
        temperatures=temperatures,
        comparisons=comparisons if "exact" in config.methods else None,
        failures=[failure.describe() for failure in scenario.failures],
        threshold_failures=list(scenario.threshold_failures),
        notes=list(config.notes),
    )


def write_outputs(scenario: ScenarioRun, out_dir: Path) -> List[Path]:
    """Пишет таблицы, сводку и manifest сценария.

    Частичные результаты пишутся и при ошибках модулей.

    Args:
        scenario (ScenarioRun): Результат сценария.
        out_dir (Path): Каталог результатов.

    Returns:
        List[Path]: Записанные файлы.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    name = scenario.config.name
    written: List[Path] = []
    for run in scenario.temperatures:
        if not run.results:
            continue
        for kind in ("pdf", "veff"):
            path = out_dir / f"{kind}_{name}_b{run.point.label}.csv"
            _write_text(path, _table(run, kind))
            written.append(path)

    summary = out_dir / f"summary_{name}.csv"
    _write_text(summary, _csv_text(SUMMARY_HEADER, _summary_rows(scenario)))
    text = out_dir / f"summary_{name}.txt"
    _write_text(text, report(scenario))
    manifest = out_dir / f"manifest_{name}.json"
    payload = build_manifest(scenario).model_dump_json(indent=2, exclude_none=True)
    _write_text(manifest, payload + "\n")
    written.extend([summary, text, manifest])
    logger.info(f"Wrote {len(written)} files for scenario {name} to {out_dir}")
    return written


def write_sampling(name: str, rows: List[SamplingRow], out_dir: Path) -> Path:
    """Пишет сводку выборки ``sampling_<сценарий>.csv``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    header = (
        "beta",
        "method",
        "l1",
        "mean_quadrature",
        "mean_sampled",
        "mean_error",
        "x2_quadrature",
        "x2_sampled",
        "x2_error",
        "acceptance",
        "warnings",
    )
    body = [
        [
            row.label,
            row.method,
            format_float(row.l1),
            format_float(row.mean_quadrature),
            format_float(row.mean_sampled),
            format_float(row.mean_error),
            format_float(row.second_moment_quadrature),
            format_float(row.second_moment_sampled),
            format_float(row.second_moment_error),
            format_float(row.acceptance),
            str(row.warnings),
        ]
        for row in rows
    ]
    path = out_dir / f"sampling_{name}.csv"
    _write_text(path, _csv_text(header, body))
    return path

