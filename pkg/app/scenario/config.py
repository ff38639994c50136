"""Модуль конфигурации сценариев.

Сценарий описывается плоским текстом ``ключ = значение``: ключи с точками
задают вложенные секции (``potential.variant``, ``sampler.n_steps``), списки
перечисляются через запятую, логические значения пишутся как true/false,
комментарии начинаются с ``#``. Разобранный текст проверяется строгой
pydantic-моделью ScenarioConfig: неизвестные ключи и некорректные значения
превращаются в ConfigError с именем ключа и номером строки.

Classes:
    ScenarioConfig: Полная конфигурация сценария.

Functions:
    parse_flat: Разбор текста в словарь ключ → (значение, строка).
    parse_scenario: Разбор текста в ScenarioConfig.
    load_scenario: Чтение и разбор файла сценария.
"""

import logging
import re
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from app.errors import ConfigError
from app.physics.effective import CurvaturePolicy, FHConvention, MethodKey, MethodOptions
from app.physics.models import Grid, ThermoState
from app.physics.potentials import (
    BasePotential,
    DoubleWell,
    HarmonicQuartic,
    MonomialSum,
    Morse,
    build_morse_from_spectroscopy,
)
from app.physics.sampling import ChainConfig
from app.physics.units import UNITS, reduced_mass

# Инициализация логгера
logger = logging.getLogger(__name__)

# Ключи, значения которых всегда читаются как списки
LIST_KEYS = frozenset({"betas", "temperatures_k", "methods", "acceptance.beats_classical"})

# Альтернативные имена ширины ядра FH
FH_CONVENTION_ALIASES: Dict[str, FHConvention] = {"eq17": "twelfth", "compdetails": "third"}

_KEY_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*(\.[A-Za-z0-9_\-]+)*$")

FlatValue = Union[str, bool, List[str]]


class _Strict(BaseModel):
    """Базовая модель секции: неизвестные ключи запрещены."""

    model_config = ConfigDict(extra="forbid", frozen=True)


class HarmonicQuarticBlock(_Strict):
    """Секция potential для mω²x²/2 + g x⁴/4."""

    variant: Literal["harmonic_quartic"]
    omega: float = Field(default=1.0, ge=0)
    g: float = Field(default=0.0, ge=0)

    def build(self, mass: float) -> BasePotential:
        """Создаёт потенциал."""
        return HarmonicQuartic(mass=mass, omega=self.omega, g=self.g)


class DoubleWellBlock(_Strict):
    """Секция potential для двойной ямы."""

    variant: Literal["double_well"]
    omega: float = Field(default=1.0, gt=0)
    g: float = Field(gt=0)

    def build(self, mass: float) -> BasePotential:
        """Создаёт потенциал."""
        return DoubleWell(mass=mass, omega=self.omega, g=self.g)


class MonomialSumBlock(_Strict):
    """Секция potential для суммы мономов (potential.coefficients.<степень>)."""

    variant: Literal["monomial_sum"]
    coefficients: Dict[int, float]

    def build(self, mass: float) -> BasePotential:
        """Создаёт потенциал."""
        return MonomialSum(coefficients=self.coefficients)


class MorseBlock(_Strict):
    """Секция potential для потенциала Морса.

    Задаётся либо во внутренних единицах (depth, alpha, x_e), либо
    спектроскопическими постоянными в см⁻¹ и Å; приведённая масса — mu_amu
    или пара масс mass_a_amu/mass_b_amu.
    """

    variant: Literal["morse"]
    depth: Optional[float] = Field(default=None, gt=0)
    alpha: Optional[float] = Field(default=None, gt=0)
    x_e: float = 0.0
    omega_e_cm: Optional[float] = None
    omega_e_chi_e_cm: Optional[float] = None
    x_e_angstrom: Optional[float] = None
    mu_amu: Optional[float] = Field(default=None, gt=0)
    mass_a_amu: Optional[float] = Field(default=None, gt=0)
    mass_b_amu: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_parameters(self) -> "MorseBlock":
        """Нужен полный набор внутренних или спектроскопических параметров."""
        internal = self.depth is not None and self.alpha is not None
        spectroscopic = None not in (self.omega_e_cm, self.omega_e_chi_e_cm, self.x_e_angstrom)
        if internal == spectroscopic:
            raise ValueError(
                "give either depth and alpha or omega_e_cm, omega_e_chi_e_cm and x_e_angstrom"
            )
        if spectroscopic and self.reduced_mass_amu is None:
            raise ValueError(
                "spectroscopic Morse parameters require mu_amu or mass_a_amu/mass_b_amu"
            )
        return self

    @property
    def reduced_mass_amu(self) -> Optional[float]:
        """Приведённая масса в а.е.м., если задана."""
        if self.mu_amu is not None:
            return self.mu_amu
        if self.mass_a_amu is not None and self.mass_b_amu is not None:
            return reduced_mass(self.mass_a_amu, self.mass_b_amu)
        return None

    def build(self, mass: float) -> BasePotential:
        """Создаёт потенциал."""
        if self.depth is not None and self.alpha is not None:
            return Morse(depth=self.depth, alpha=self.alpha, x_e=self.x_e)
        assert self.omega_e_cm is not None and self.omega_e_chi_e_cm is not None  # noqa: S101
        assert self.x_e_angstrom is not None and self.reduced_mass_amu is not None  # noqa: S101
        return build_morse_from_spectroscopy(
            self.omega_e_cm, self.omega_e_chi_e_cm, self.x_e_angstrom, self.reduced_mass_amu
        )


PotentialBlock = Annotated[
    Union[HarmonicQuarticBlock, DoubleWellBlock, MorseBlock, MonomialSumBlock],
    Field(discriminator="variant"),
]


class GridBlock(_Strict):
    """Секция grid: явная сетка или параметры автоматической."""

    x_min: Optional[float] = None
    x_max: Optional[float] = None
    n_points: Optional[int] = Field(default=None, ge=3)
    coverage: float = Field(default=0.999999, gt=0, lt=1)
    converge: bool = True
    tolerance: float = Field(default=1e-7, gt=0)

    @property
    def explicit(self) -> Optional[Grid]:
        """Явная сетка, если заданы все три параметра."""
        if self.x_min is None or self.x_max is None or self.n_points is None:
            return None
        return Grid(x_min=self.x_min, x_max=self.x_max, n_points=self.n_points)


class SamplerBlock(ChainConfig):
    """Секция sampler: параметры цепочек и метод, по потенциалу которого идёт выборка."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    method: MethodKey = "lh-mapped"


class AcceptanceBlock(_Strict):
    """Секция acceptance: пороги, определяющие код возврата.

    Attributes:
        max_l1 (Dict[MethodKey, float]): Максимально допустимое L1 против exact.
        beats_classical (List[MethodKey]): Методы, чьё L1 должно быть ниже классического.
        min_beta (float): Пороги действуют только при β ≥ min_beta.
    """

    max_l1: Dict[MethodKey, float] = Field(default_factory=dict)
    beats_classical: List[MethodKey] = Field(default_factory=list)
    min_beta: float = Field(default=0.0, ge=0)


class TemperaturePoint(BaseModel):
    """Одна температура сценария."""

    model_config = ConfigDict(frozen=True)

    label: str
    thermo: ThermoState
    kelvin: Optional[float] = None


class ScenarioConfig(_Strict):
    """Конфигурация сценария.

    Attributes:
        name (str): Имя сценария; входит в имена файлов.
        seed (int): Базовое зерно выборки.
        mass (float): Масса частицы (масс электрона) для немолекулярных потенциалов.
        potential (PotentialBlock): Потенциал.
        betas (List[float]): Обратные температуры.
        temperatures_k (List[float]): Температуры в кельвинах.
        methods (List[MethodKey]): Методы.
        grid (GridBlock): Параметры сетки.
        policy (CurvaturePolicy): Правило кривизны.
        fh_a2_convention (FHConvention): Ширина ядра Фейнмана–Хибса (twelfth/eq17 или
            third/compdetails).
        sampler (Optional[SamplerBlock]): Параметры выборки.
        output_dir (Optional[str]): Каталог результатов.
        acceptance (AcceptanceBlock): Пороги приёмки.
        notes (List[str]): Пометки о выборе значений по умолчанию.
    """

    name: str = Field(default="scenario", pattern=r"^[A-Za-z0-9_.\-]+$")
    seed: int = Field(default=20240601, ge=0)
    mass: float = Field(default=1.0, gt=0)
    potential: PotentialBlock
    betas: List[float] = Field(default_factory=list)
    temperatures_k: List[float] = Field(default_factory=list)
    methods: List[MethodKey] = Field(min_length=1)
    grid: GridBlock = GridBlock()
    policy: CurvaturePolicy = CurvaturePolicy()
    fh_a2_convention: FHConvention = "twelfth"
    sampler: Optional[SamplerBlock] = None
    output_dir: Optional[str] = None
    acceptance: AcceptanceBlock = AcceptanceBlock()
    notes: List[str] = Field(default_factory=list)

    @field_validator("fh_a2_convention", mode="before")
    @classmethod
    def _resolve_fh_alias(cls, value: Any) -> Any:
        """eq17 и compdetails означают twelfth и third."""
        if isinstance(value, str):
            return FH_CONVENTION_ALIASES.get(value, value)
        return value

    @model_validator(mode="after")
    def _check_lists(self) -> "ScenarioConfig":
        """Нужна хотя бы одна температура; методы без повторов; значения положительны."""
        if not self.betas and not self.temperatures_k:
            raise ValueError("at least one of betas or temperatures_k is required")
        if any(b <= 0 for b in self.betas) or any(t <= 0 for t in self.temperatures_k):
            raise ValueError("betas and temperatures must be positive")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must not repeat")
        return self

    @property
    def particle_mass(self) -> float:
        """Масса частицы: приведённая масса для спектроскопического Морса, иначе mass."""
        if isinstance(self.potential, MorseBlock) and self.potential.reduced_mass_amu is not None:
            return UNITS.amu_to_electron_mass(self.potential.reduced_mass_amu)
        return self.mass

    def build_potential(self) -> BasePotential:
        """Создаёт потенциал сценария."""
        return self.potential.build(self.mass)

    def temperature_points(self) -> List[TemperaturePoint]:
        """Температуры сценария, упорядоченные по возрастанию β."""
        mass = self.particle_mass
        points = [
            TemperaturePoint(label=f"{beta:.6g}", thermo=ThermoState(beta=beta, mass=mass))
            for beta in self.betas
        ]
        for kelvin in self.temperatures_k:
            thermo = ThermoState.from_kelvin(kelvin, mass=mass)
            points.append(
                TemperaturePoint(label=f"{thermo.beta:.6g}", thermo=thermo, kelvin=kelvin)
            )
        return sorted(points, key=lambda point: point.thermo.beta)

    def method_options(self) -> MethodOptions:
        """Параметры построения методов."""
        return MethodOptions(policy=self.policy, fh_convention=self.fh_a2_convention)


def _convert(key: str, raw: str) -> FlatValue:
    """Строка значения → строка, bool или список строк."""
    if key in LIST_KEYS or "," in raw:
        return [item.strip() for item in raw.split(",") if item.strip()]
    if raw in ("true", "false"):
        return raw == "true"
    return raw


def parse_flat(text: str) -> Dict[str, Tuple[FlatValue, int]]:
    """Разбирает текст ``ключ = значение`` построчно.

    Args:
        text (str): Содержимое файла сценария.

    Returns:
        Dict[str, Tuple[FlatValue, int]]: Ключ → (значение, номер строки).

    Raises:
        ConfigError: Строка без '=', некорректный или повторный ключ, пустое значение.
    """
    entries: Dict[str, Tuple[FlatValue, int]] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError("Expected 'key = value'", key=content, line=number)
        key, raw = (part.strip() for part in content.split("=", 1))
        if not _KEY_PATTERN.match(key):
            raise ConfigError("Malformed key", key=key, line=number)
        if key in entries:
            raise ConfigError("Duplicate key", key=key, line=entries[key][1])
        if not raw:
            raise ConfigError("Empty value", key=key, line=number)
        entries[key] = (_convert(key, raw), number)
    return entries


def _nest(entries: Dict[str, Tuple[FlatValue, int]]) -> Dict[str, Any]:
    """Превращает ключи с точками во вложенные словари."""
    tree: Dict[str, Any] = {}
    for key, (value, number) in entries.items():
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError("Key is both a value and a section", key=key, line=number)
            node = child
        if isinstance(node.get(parts[-1]), dict):
            raise ConfigError("Key is both a value and a section", key=key, line=number)
        node[parts[-1]] = value
    return tree


_UNION_TAGS = frozenset({"harmonic_quartic", "double_well", "morse", "monomial_sum"})


def _locate(
    loc: Tuple[Union[int, str], ...], entries: Dict[str, Tuple[FlatValue, int]]
) -> Tuple[str, Optional[int]]:
    """Ключ и строка по пути ошибки pydantic."""
    parts = [str(part) for part in loc if str(part) not in _UNION_TAGS]
    while parts:
        key = ".".join(parts)
        if key in entries:
            return key, entries[key][1]
        if parts[-1].isdigit() and ".".join(parts[:-1]) in entries:
            key = ".".join(parts[:-1])
            return key, entries[key][1]
        parts.pop()
    return ".".join(str(part) for part in loc if str(part) not in _UNION_TAGS), None


def parse_scenario(text: str) -> ScenarioConfig:
    """Разбирает текст сценария в ScenarioConfig.

    Args:
        text (str): Содержимое файла.

    Returns:
        ScenarioConfig: Проверенная конфигурация.

    Raises:
        ConfigError: Первая найденная ошибка с ключом и строкой.
    """
    entries = parse_flat(text)
    try:
        return ScenarioConfig.model_validate(_nest(entries))
    except ValidationError as e:
        first = e.errors()[0]
        key, line = _locate(tuple(first["loc"]), entries)
        logger.error(f"Invalid scenario config at key '{key}' (line {line}): {first['msg']}")
        raise ConfigError(first["msg"], key=key, line=line) from e


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """Читает файл сценария (UTF-8) и разбирает его."""
    text = Path(path).read_text(encoding="utf-8")
    logger.info(f"Loaded scenario config from {path}")
    return parse_scenario(text)
