"""Модуль эффективных классических потенциалов.

Строит температурно-зависимые потенциалы, классический больцмановский вес
которых приближает квантовое распределение координаты:

    - classical: сам потенциал V;
    - fh: потенциал, сглаженный гауссовым ядром фиксированной ширины;
    - fk: вариационный потенциал с самосогласованными a²(x̄) и Ω(x̄);
    - lh-bare, lh-renorm, lh-mapped: семейство локально-гармонических
      потенциалов по начальной точке пути x', построенных по V, V' и V''
      в этой точке;
    - exact: потенциал, восстановленный из точной диагонали матрицы плотности.

Все локально-гармонические функции выражаются через знаковую величину
s = ξ² = (βħ/2)²ω_a², что позволяет одинаково обрабатывать положительную,
нулевую и отрицательную кривизну.

Classes:
    CurvaturePolicy: Правило обработки точек с ω_a² ≤ 0.
    LocalHarmonicFields: Поля k_a, ω_a², ξ_a, x₀ на сетке.
    FKVariational: Самосогласованные поля a² и Ω² с диагностикой.
    FKSolution: Поля и потенциал Фейнмана–Клейнерта.
    MethodOptions: Параметры построения методов.
    MethodResult: Потенциал, плотность и оценка статсуммы одного метода.

Functions:
    local_harmonic_fields: Локально-гармонические поля.
    renormalization_factor: Локальное отношение квантовой и классической статсумм.
    fh_smearing_variance: Ширина ядра Фейнмана–Хибса.
    v_classical, v_feynman_hibbs, solve_feynman_kleinert: Центроидные методы.
    v_lh_bare, p_lh_renormalized, p_lh_mapped: Методы по начальной точке.
    log_partition_estimate, partition_estimate: Статсумма в классической форме.
    build_method: Единая точка входа для всех методов.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import logsumexp

from app.errors import QepotError
from app.physics.models import BoolArray, DensityProfile, FloatArray, Grid, ThermoState
from app.physics.oracle import exact_effective_potential, solve_spectrum, thermal_density
from app.physics.potentials import BasePotential
from app.physics.smearing import SmearKernel, SmearMode, smear, smear_field
from app.physics.statistics import normalize_log

# Инициализация логгера
logger = logging.getLogger(__name__)

MethodKey = Literal["classical", "exact", "fh", "fk", "lh-bare", "lh-renorm", "lh-mapped"]
FHConvention = Literal["twelfth", "third"]
CurvatureMode = Literal["clamp", "continuation"]

# Порядок колонок в таблицах
METHODS: Tuple[MethodKey, ...] = (
    "classical",
    "exact",
    "fh",
    "fk",
    "lh-bare",
    "lh-renorm",
    "lh-mapped",
)

# Методы, нормировка которых не является оценкой статсуммы
PDF_ONLY_METHODS: Tuple[MethodKey, ...] = ("lh-renorm", "lh-mapped")

# Переход на ряды при ξ < 1e-4
SERIES_SWITCH: float = 1e-4
# Переход на ряд для (Ξ − 1)/s
DRIFT_SERIES_SWITCH: float = 1e-4
# Порог ω_a², ниже которого x₀ не определён
CURVATURE_EPSILON: float = 1e-12

FK_FLOOR: float = 1e-10
FK_DAMPING: float = 0.5
FK_MAX_ITERATIONS: int = 500
FK_TOLERANCE: float = 1e-10


class CurvaturePolicy(BaseModel):
    """Правило обработки точек с отрицательной локальной кривизной.

    Attributes:
        mode (CurvatureMode): clamp заменяет ω_a² < 0 нулём; continuation
            продолжает функции на мнимую частоту (tanh → tan) с ограничением |ξ|.
        cap (float): Верхняя граница |ξ| при продолжении, 0 < cap < π/2.
    """

    model_config = ConfigDict(frozen=True)

    mode: CurvatureMode = "clamp"
    cap: float = Field(default=1.5, gt=0, lt=np.pi / 2)


@dataclass(frozen=True)
class LocalHarmonicFields:
    """Локально-гармоническое описание потенциала в точках x'.

    Attributes:
        x (FloatArray): Точки x'.
        value (FloatArray): V(x').
        k (FloatArray): Ускорение k_a = V'(x')/m.
        omega2 (FloatArray): ω_a² = V''(x')/m (может быть отрицательной).
        s (FloatArray): Знаковая величина ξ² = (βħ/2)²ω_a² до применения правила.
        s_eff (FloatArray): Та же величина после применения правила кривизны.
        x0 (FloatArray): Смещённое начало x' − k_a/ω_a²; NaN, где ω_a² ≤ CURVATURE_EPSILON.
        policy_mask (BoolArray): Точки, где правило кривизны изменило s.
        thermo (ThermoState): Состояние.
    """

    x: FloatArray
    value: FloatArray
    k: FloatArray
    omega2: FloatArray
    s: FloatArray
    s_eff: FloatArray
    x0: FloatArray
    policy_mask: BoolArray
    thermo: ThermoState

    @property
    def xi(self) -> FloatArray:
        """ξ_a = |βħω_a/2| после применения правила."""
        return np.sqrt(np.abs(self.s_eff))


@dataclass(frozen=True)
class FKVariational:
    """Самосогласованные поля Фейнмана–Клейнерта.

    Attributes:
        a2 (FloatArray): Дисперсия сглаживания a²(x̄).
        omega2 (FloatArray): Квадрат пробной частоты Ω²(x̄).
        iterations (int): Число выполненных итераций.
        residual (FloatArray): Относительная невязка двух уравнений в каждой точке.
        converged (BoolArray): Сошлась ли точка.
        floored (BoolArray): Точки, где Ω² ограничена снизу FK_FLOOR.
    """

    a2: FloatArray
    omega2: FloatArray
    iterations: int
    residual: FloatArray
    converged: BoolArray
    floored: BoolArray


@dataclass(frozen=True)
class FKSolution:
    """Решение Фейнмана–Клейнерта на сетке."""

    variational: FKVariational
    v_eff: FloatArray
    grid: Grid


class MethodOptions(BaseModel):
    """Параметры построения эффективных потенциалов.

    Attributes:
        policy (CurvaturePolicy): Правило кривизны для семейства lh.
        fh_convention (FHConvention): Ширина ядра Фейнмана–Хибса.
        smear_mode (Optional[SmearMode]): Режим сглаживания; None — автоматический выбор.
    """

    model_config = ConfigDict(frozen=True)

    policy: CurvaturePolicy = CurvaturePolicy()
    fh_convention: FHConvention = "twelfth"
    smear_mode: Optional[SmearMode] = None


@dataclass(frozen=True)
class MethodResult:
    """Результат одного метода при одном β.

    Attributes:
        method (MethodKey): Ключ метода.
        v_eff (FloatArray): Эффективный потенциал на сетке.
        profile (DensityProfile): Нормированная плотность.
        log_z (Optional[float]): ln Z или None для методов без оценки статсуммы.
        diagnostics (Dict[str, float]): Счётчики и невязки.
    """

    method: MethodKey
    v_eff: FloatArray
    profile: DensityProfile
    log_z: Optional[float]
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def partition_function(self) -> Optional[float]:
        """Z = exp(ln Z)."""
        return None if self.log_z is None else float(np.exp(self.log_z))

    def free_energy(self, thermo: ThermoState) -> Optional[float]:
        """F = −ln Z / β."""
        return None if self.log_z is None else -self.log_z / thermo.beta


def _xi_factor(s: FloatArray) -> FloatArray:
    """Ξ(s) = tanh ξ/ξ при s ≥ 0 и tan|ξ|/|ξ| при s < 0."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = np.abs(s) < SERIES_SWITCH**2
    positive = (s > 0) & ~small
    negative = (s < 0) & ~small
    out[small] = 1.0 - s[small] / 3.0 + 2.0 * s[small] ** 2 / 15.0
    root = np.sqrt(s[positive])
    out[positive] = np.tanh(root) / root
    root = np.sqrt(-s[negative])
    out[negative] = np.tan(root) / root
    return out


def _drift_factor(s: FloatArray) -> FloatArray:
    """(Ξ(s) − 1)/s с конечным пределом −1/3 при s → 0."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = np.abs(s) < DRIFT_SERIES_SWITCH
    t = s[small]
    out[small] = -1.0 / 3.0 + 2.0 * t / 15.0 - 17.0 * t**2 / 315.0
    out[~small] = (_xi_factor(s[~small]) - 1.0) / s[~small]
    return out


def _log_sinhc(y2: FloatArray) -> FloatArray:
    """ln(sinh y / y) по знаковой y²; при y² < 0 — ln(sin|y| / |y|)."""
    y2 = np.asarray(y2, dtype=float)
    out = np.empty_like(y2)
    small = np.abs(y2) < SERIES_SWITCH**2
    positive = (y2 > 0) & ~small
    negative = (y2 < 0) & ~small
    out[small] = y2[small] / 6.0 - y2[small] ** 2 / 180.0
    y = np.sqrt(y2[positive])
    out[positive] = y + np.log(-np.expm1(-2.0 * y)) - np.log(2.0 * y)
    y = np.sqrt(-y2[negative])
    out[negative] = np.log(np.sin(y) / y)
    return out


def local_harmonic_fields(
    potential: BasePotential,
    thermo: ThermoState,
    x: FloatArray,
    policy: CurvaturePolicy = CurvaturePolicy(),
) -> LocalHarmonicFields:
    """Вычисляет локально-гармонические поля в точках x'.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        x (FloatArray): Начальные точки путей.
        policy (CurvaturePolicy): Правило для ω_a² < 0. Default: clamp.

    Returns:
        LocalHarmonicFields: Поля и маска срабатывания правила.
    """
    points = np.asarray(x, dtype=float)
    value = np.asarray(potential.value(points), dtype=float)
    k = np.asarray(potential.gradient(points), dtype=float) / thermo.mass
    omega2 = np.asarray(potential.curvature(points), dtype=float) / thermo.mass
    half_beta_hbar = 0.5 * thermo.beta * thermo.hbar
    s = half_beta_hbar**2 * omega2

    policy_mask = s < 0
    if policy.mode == "clamp":
        s_eff = np.maximum(s, 0.0)
    else:
        capped = np.minimum(np.sqrt(np.abs(s)), policy.cap) ** 2
        s_eff = np.where(policy_mask, -capped, s)

    regular = omega2 > CURVATURE_EPSILON
    x0 = np.full_like(points, np.nan)
    x0[regular] = points[regular] - k[regular] / omega2[regular]

    return LocalHarmonicFields(
        x=points,
        value=value,
        k=k,
        omega2=omega2,
        s=s,
        s_eff=s_eff,
        x0=x0,
        policy_mask=policy_mask,
        thermo=thermo,
    )


def _drift_term(fields: LocalHarmonicFields) -> FloatArray:
    """(mk_a²/2ω_a²)(Ξ − 1), конечное при ω_a² → 0."""
    thermo = fields.thermo
    scale = thermo.mass * fields.k**2 * (thermo.beta * thermo.hbar) ** 2 / 8.0
    return scale * _drift_factor(fields.s_eff)


def renormalization_factor(fields: LocalHarmonicFields) -> FloatArray:
    """Локальный множитель Υ = ξ_a / sinh ξ_a.

    Отношение гармонических статсумм (квантовой к классической) с локальной
    частотой; равен 1 в классическом пределе. При продолжении на мнимую
    частоту используется |ξ| / sin|ξ|.

    Args:
        fields (LocalHarmonicFields): Поля.

    Returns:
        FloatArray: Υ в точках x'.
    """
    return np.exp(-_log_sinhc(fields.s_eff))


def _report_policy(fields: LocalHarmonicFields, method: str) -> int:
    """Пишет предупреждение о точках, где сработало правило кривизны."""
    count = int(np.count_nonzero(fields.policy_mask))
    if count:
        logger.warning(
            f"{method}: curvature policy active at {count} of {fields.x.size} points "
            f"(beta={fields.thermo.beta:.6g})"
        )
    return count


def v_classical(potential: BasePotential, x: FloatArray) -> FloatArray:
    """Классический потенциал V(x')."""
    return np.asarray(potential.value(np.asarray(x, dtype=float)), dtype=float)


def fh_smearing_variance(thermo: ThermoState, convention: FHConvention = "twelfth") -> float:
    """Дисперсия ядра Фейнмана–Хибса: βħ²/12m (twelfth) или βħ²/3m (third)."""
    denominator = 12.0 if convention == "twelfth" else 3.0
    return thermo.beta * thermo.hbar**2 / (denominator * thermo.mass)


def v_feynman_hibbs(
    potential: BasePotential,
    thermo: ThermoState,
    x: FloatArray,
    convention: FHConvention = "twelfth",
    mode: Optional[SmearMode] = None,
) -> FloatArray:
    """Потенциал Фейнмана–Хибса V_FH(x̄) = V_{a²}(x̄).

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        x (FloatArray): Центроиды x̄.
        convention (FHConvention): Ширина ядра. Default: twelfth.
        mode (Optional[SmearMode]): Режим сглаживания; None — автоматический.

    Returns:
        FloatArray: V_FH в точках x̄.
    """
    a2 = fh_smearing_variance(thermo, convention)
    kernel = SmearKernel.auto(potential, a2)
    if mode is not None:
        kernel = SmearKernel(a2=a2, mode=mode)
    return smear(potential, kernel, np.asarray(x, dtype=float))


def _fk_variance(omega2: FloatArray, thermo: ThermoState) -> FloatArray:
    """a² = [f coth f − 1]/(βmΩ²), f = βħΩ/2, в виде (βħ²/4m)·(f coth f − 1)/f²."""
    f = 0.5 * thermo.beta * thermo.hbar * np.sqrt(omega2)
    ratio = np.empty_like(f)
    small = f < 1e-3
    fs = f[small]
    ratio[small] = 1.0 / 3.0 - fs**2 / 45.0 + 2.0 * fs**4 / 945.0
    fl = f[~small]
    ratio[~small] = (fl / np.tanh(fl) - 1.0) / fl**2
    return thermo.beta * thermo.hbar**2 / (4.0 * thermo.mass) * ratio


def solve_feynman_kleinert(
    potential: BasePotential,
    thermo: ThermoState,
    grid: Grid,
    mode: Optional[SmearMode] = None,
    damping: float = FK_DAMPING,
    max_iterations: int = FK_MAX_ITERATIONS,
    tolerance: float = FK_TOLERANCE,
) -> FKSolution:
    """Решает уравнения самосогласования Фейнмана–Клейнерта на сетке.

    В каждой точке x̄ ищется неподвижная точка пары уравнений
    a² = [f coth f − 1]/(βmΩ²) и mΩ² = ∂²V_{a²}/∂x̄² затухающими итерациями
    (обе величины обновляются одновременно). Ω² ограничивается снизу FK_FLOOR.
    Точки, не сошедшиеся за max_iterations, помечаются и попадают в лог.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        grid (Grid): Сетка центроидов.
        mode (Optional[SmearMode]): Режим сглаживания. Default: None (автоматически).
        damping (float): Доля шага к новому значению. Default: 0.5.
        max_iterations (int): Предел итераций. Default: 500.
        tolerance (float): Порог относительной невязки. Default: 1e-10.

    Returns:
        FKSolution: Поля a², Ω², диагностика и V_FK на сетке.
    """
    x = grid.points
    mode = mode or SmearKernel.auto(potential, 0.0).mode
    mass, beta = thermo.mass, thermo.beta

    omega2 = np.maximum(np.asarray(potential.curvature(x), dtype=float) / mass, FK_FLOOR)
    a2 = _fk_variance(omega2, thermo)
    converged = np.zeros(x.size, dtype=bool)
    floored = np.zeros(x.size, dtype=bool)
    residual = np.full(x.size, np.inf)
    iterations = 0

    while iterations < max_iterations and not converged.all():
        iterations += 1
        active = ~converged
        a2_target = _fk_variance(omega2[active], thermo)
        curvature = smear_field(potential, a2[active], x[active], mode, derivative=2) / mass
        floored[active] = curvature < FK_FLOOR
        omega2_target = np.maximum(curvature, FK_FLOOR)

        step_residual = np.maximum(
            np.abs(a2_target - a2[active]) / a2_target,
            np.abs(omega2_target - omega2[active]) / omega2_target,
        )
        residual[active] = step_residual
        done = step_residual < tolerance

        update = np.flatnonzero(active)[~done]
        a2[update] += damping * (a2_target[~done] - a2[update])
        omega2[update] += damping * (omega2_target[~done] - omega2[update])
        converged[np.flatnonzero(active)[done]] = True
        logger.debug(
            f"FK iteration {iterations}: {int(converged.sum())}/{x.size} converged, "
            f"max residual {float(step_residual.max()):.2e}"
        )

    failed = int(np.count_nonzero(~converged))
    if failed:
        logger.warning(
            f"FK solver: {failed} of {x.size} points did not converge in {iterations} "
            f"iterations (beta={beta:.6g})"
        )
    if floored.any():
        logger.warning(f"FK solver: Omega^2 floored at {int(floored.sum())} points")

    f2 = (0.5 * beta * thermo.hbar) ** 2 * omega2
    smeared = smear_field(potential, a2, x, mode)
    v_eff = _log_sinhc(f2) / beta - 0.5 * mass * omega2 * a2 + smeared

    variational = FKVariational(
        a2=a2,
        omega2=omega2,
        iterations=iterations,
        residual=residual,
        converged=converged,
        floored=floored,
    )
    return FKSolution(variational=variational, v_eff=v_eff, grid=grid)


def v_lh_bare(
    potential: BasePotential,
    thermo: ThermoState,
    x: FloatArray,
    policy: CurvaturePolicy = CurvaturePolicy(),
) -> FloatArray:
    """Локально-гармонический потенциал по начальной точке без перенормировки.

    Ṽ = V + (mk_a²/2ω_a²)(tanh ξ_a/ξ_a − 1) + (2β)⁻¹ ln(sinh 2ξ_a / 2ξ_a).

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        x (FloatArray): Точки x'.
        policy (CurvaturePolicy): Правило кривизны. Default: clamp.

    Returns:
        FloatArray: Ṽ_LH в точках x'.
    """
    fields = local_harmonic_fields(potential, thermo, x, policy)
    _report_policy(fields, "lh-bare")
    return (
        fields.value
        + _drift_term(fields)
        + _log_sinhc(4.0 * fields.s_eff) / (2.0 * thermo.beta)
    )


def _lh_renormalized_log_weight(fields: LocalHarmonicFields) -> FloatArray:
    """ln P_renorm без нормировки: ½ ln Ξ − βV − β(mk_a²/2ω_a²)(Ξ − 1)."""
    beta = fields.thermo.beta
    xi_factor = _xi_factor(fields.s_eff)
    return 0.5 * np.log(xi_factor) - beta * fields.value - beta * _drift_term(fields)


def p_lh_renormalized(
    potential: BasePotential,
    thermo: ThermoState,
    grid: Grid,
    policy: CurvaturePolicy = CurvaturePolicy(),
) -> DensityProfile:
    """Перенормированная локально-гармоническая плотность.

    Плотность lh-bare, делённая на локальное отношение гармонических
    статсумм: sqrt(Ξ)·exp(−βV − β(mk_a²/2ω_a²)(Ξ − 1)), нормированная на сетке.
    """
    fields = local_harmonic_fields(potential, thermo, grid.points, policy)
    _report_policy(fields, "lh-renorm")
    return normalize_log(_lh_renormalized_log_weight(fields), grid)


def p_lh_mapped(
    potential: BasePotential,
    thermo: ThermoState,
    grid: Grid,
    policy: CurvaturePolicy = CurvaturePolicy(),
) -> Tuple[DensityProfile, FloatArray]:
    """Плотность и потенциал после гармонического отображения mk_a²/2ω_a² → V.

    P_LH ∝ sqrt(Ξ)·exp(−βVΞ), V_LH = VΞ − (2β)⁻¹ ln Ξ.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        grid (Grid): Сетка.
        policy (CurvaturePolicy): Правило кривизны. Default: clamp.

    Returns:
        Tuple[DensityProfile, FloatArray]: Нормированная P_LH и таблица V_LH.
    """
    fields = local_harmonic_fields(potential, thermo, grid.points, policy)
    _report_policy(fields, "lh-mapped")
    xi_factor = _xi_factor(fields.s_eff)
    v_lh = fields.value * xi_factor - np.log(xi_factor) / (2.0 * thermo.beta)
    return normalize_log(-thermo.beta * v_lh, grid), v_lh


def log_partition_estimate(
    source: Union[FloatArray, BasePotential], thermo: ThermoState, grid: Grid
) -> float:
    """ln Z = ln sqrt(m/2πβħ²) + ln ∫ exp(−βV_eff) по трапециям.

    Args:
        source (Union[FloatArray, BasePotential]): Таблица V_eff на сетке или потенциал.
        thermo (ThermoState): Состояние.
        grid (Grid): Сетка.

    Returns:
        float: ln Z.
    """
    if isinstance(source, BasePotential):
        table = np.asarray(source.value(grid.points), dtype=float)
    else:
        table = np.asarray(source, dtype=float)
    log_integral = float(logsumexp(-thermo.beta * table, b=grid.weights))
    return float(np.log(thermo.classical_prefactor)) + log_integral


def partition_estimate(
    source: Union[FloatArray, BasePotential], thermo: ThermoState, grid: Grid
) -> float:
    """Статсумма в классической форме Z = sqrt(m/2πβħ²)·∫ exp(−βV_eff)."""
    return float(np.exp(log_partition_estimate(source, thermo, grid)))


def _build(
    method: MethodKey,
    potential: BasePotential,
    thermo: ThermoState,
    grid: Grid,
    options: MethodOptions,
) -> MethodResult:
    """Строит результат одного метода без обработки ошибок."""
    x = grid.points
    diagnostics: Dict[str, float] = {}

    if method == "exact":
        profile, _ = thermal_density(solve_spectrum(potential, thermo, grid), thermo)
        v_eff = exact_effective_potential(profile, thermo)
        return MethodResult(method, v_eff, profile, profile.log_norm, diagnostics)

    if method == "lh-renorm":
        fields = local_harmonic_fields(potential, thermo, x, options.policy)
        diagnostics["policy_points"] = _report_policy(fields, method)
        log_weight = _lh_renormalized_log_weight(fields)
        profile = normalize_log(log_weight, grid)
        return MethodResult(method, -log_weight / thermo.beta, profile, None, diagnostics)

    if method == "lh-mapped":
        profile, v_eff = p_lh_mapped(potential, thermo, grid, options.policy)
        fields = local_harmonic_fields(potential, thermo, x, options.policy)
        diagnostics["policy_points"] = float(np.count_nonzero(fields.policy_mask))
        return MethodResult(method, v_eff, profile, None, diagnostics)

    if method == "classical":
        v_eff = v_classical(potential, x)
    elif method == "fh":
        v_eff = v_feynman_hibbs(potential, thermo, x, options.fh_convention, options.smear_mode)
        diagnostics["a2"] = fh_smearing_variance(thermo, options.fh_convention)
    elif method == "fk":
        solution = solve_feynman_kleinert(potential, thermo, grid, options.smear_mode)
        variational = solution.variational
        v_eff = solution.v_eff
        diagnostics["fk_iterations"] = float(variational.iterations)
        diagnostics["fk_failed_points"] = float(np.count_nonzero(~variational.converged))
        diagnostics["fk_floored_points"] = float(np.count_nonzero(variational.floored))
        diagnostics["fk_max_residual"] = float(np.max(variational.residual))
    else:
        fields = local_harmonic_fields(potential, thermo, x, options.policy)
        diagnostics["policy_points"] = float(np.count_nonzero(fields.policy_mask))
        v_eff = v_lh_bare(potential, thermo, x, options.policy)

    profile = normalize_log(-thermo.beta * v_eff, grid)
    log_z = log_partition_estimate(v_eff, thermo, grid)
    return MethodResult(method, v_eff, profile, log_z, diagnostics)


def build_method(
    method: MethodKey,
    potential: BasePotential,
    thermo: ThermoState,
    grid: Grid,
    options: MethodOptions = MethodOptions(),
) -> MethodResult:
    """Строит эффективный потенциал, плотность и оценку статсуммы метода.

    Args:
        method (MethodKey): Ключ метода.
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        grid (Grid): Общая сетка.
        options (MethodOptions): Параметры построения. Default: MethodOptions().

    Returns:
        MethodResult: Потенциал, плотность, ln Z и диагностика.

    Raises:
        QepotError: Ошибка нижележащего модуля (пишется в лог с контекстом).
    """
    logger.debug(f"Building method {method} at beta={thermo.beta:.6g} on {grid.n_points} points")
    try:
        return _build(method, potential, thermo, grid, options)
    except QepotError as e:
        logger.error(
            f"Method {method} failed at beta={thermo.beta:.6g} on "
            f"[{grid.x_min:.6g}, {grid.x_max:.6g}]: {e}"
        )
        raise
