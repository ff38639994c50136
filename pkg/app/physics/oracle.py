"""Модуль точного эталона: диагонализация гамильтониана на сетке.

Гамильтониан дискретизуется центральными разностями второго порядка с
условиями Дирихле, спектр находится трёхдиагональным собственным решателем
scipy. Число сохраняемых собственных пар определяется тепловым весом, а не
фиксированным количеством, поэтому один и тот же код работает от β = 0.01
до низких температур. По спектру строятся диагональ матрицы плотности
ρ_β(x) = Σ e^{−βE_n}|ψ_n(x)|², статсумма и средние наблюдаемых.

Сходимость по сетке оценивается по экстраполяции Ричардсона двух соседних
сгущений: ошибка схемы второго порядка убывает как h², экстраполяция как h⁴.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from app.config import config
from app.errors import ConvergenceError, GridError, TruncationError
from app.physics.models import DensityProfile, FloatArray, Grid, ThermoState
from app.physics.potentials import BasePotential

# Инициализация логгера
logger = logging.getLogger(__name__)

Observable = Callable[[FloatArray], FloatArray]

# Допустимый тепловой вес первого отброшенного состояния
THERMAL_WEIGHT: float = 1e-14


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Симметричный трёхдиагональный оператор на сетке.

    Attributes:
        diagonal (FloatArray): Главная диагональ ħ²/(mh²) + V(x_i).
        off_diagonal (FloatArray): Побочная диагональ −ħ²/(2mh²).
        grid (Grid): Сетка дискретизации.
    """

    diagonal: FloatArray
    off_diagonal: FloatArray
    grid: Grid


@dataclass(frozen=True)
class SpectralSolution:
    """Нижняя часть спектра дискретного гамильтониана.

    Attributes:
        eigenvalues (FloatArray): Энергии по возрастанию.
        eigenvectors (FloatArray): Столбцы ψ_n(x_i), нормированные как Σ|ψ|²h = 1.
        grid (Grid): Сетка.
        ground_energy (float): E_0, от которой отсчитан порог усечения.
        energy_cutoff (float): Все состояния ниже этой энергии сохранены.
        complete (bool): Сохранён ли весь спектр дискретного оператора.
    """

    eigenvalues: FloatArray
    eigenvectors: FloatArray
    grid: Grid
    ground_energy: float
    energy_cutoff: float
    complete: bool


@dataclass(frozen=True)
class RefinementStep:
    """Запись журнала сгущения сетки.

    Attributes:
        n_points (int): Число узлов.
        x_min (float): Левая граница.
        x_max (float): Правая граница.
        l1_delta (Optional[float]): L1-изменение экстраполированной P_QM относительно
            предыдущего сгущения.
        boundary_mass (float): Масса плотности у границ.
        action (str): Что сделано после шага: extend, refine или done.
    """

    n_points: int
    x_min: float
    x_max: float
    l1_delta: Optional[float]
    boundary_mass: float
    action: str


@dataclass(frozen=True)
class ConvergedSolution:
    """Результат сходящегося по сетке расчёта.

    Attributes:
        solution (SpectralSolution): Спектр на сетке, к которой относится profile.
        profile (DensityProfile): Нормированная P_QM; log_norm равен ln Z_QM.
        partition_function (float): Z_QM.
        log (List[RefinementStep]): Журнал сгущений и расширений.
    """

    solution: SpectralSolution
    profile: DensityProfile
    partition_function: float
    log: List[RefinementStep] = field(default_factory=list)


def _hamiltonian_from_values(
    potential_values: FloatArray, thermo: ThermoState, grid: Grid
) -> TridiagonalHamiltonian:
    """Собирает трёхдиагональный оператор по табулированному потенциалу."""
    h = grid.spacing
    if not h > 0:
        raise GridError(f"Grid spacing must be positive, got {h}")
    hopping = thermo.hbar**2 / (2.0 * thermo.mass * h**2)
    diagonal = 2.0 * hopping + np.asarray(potential_values, dtype=float)
    off_diagonal = np.full(grid.n_points - 1, -hopping)
    return TridiagonalHamiltonian(diagonal=diagonal, off_diagonal=off_diagonal, grid=grid)


def discretize_hamiltonian(
    potential: BasePotential, thermo: ThermoState, grid: Grid
) -> TridiagonalHamiltonian:
    """Дискретизует H = p²/2m + V разностной схемой второго порядка.

    Кинетический член −ħ²/(2m)·(ψ_{i+1} − 2ψ_i + ψ_{i−1})/h² с нулевыми
    значениями за пределами сетки (условия Дирихле).

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Масса и ħ.
        grid (Grid): Сетка.

    Returns:
        TridiagonalHamiltonian: Диагональ и побочная диагональ оператора.
    """
    return _hamiltonian_from_values(potential.value(grid.points), thermo, grid)


def _diagonalize(
    hamiltonian: TridiagonalHamiltonian,
    thermo: ThermoState,
    thermal_weight: float = THERMAL_WEIGHT,
    min_states: int = 1,
) -> SpectralSolution:
    """Находит все собственные пары с тепловым весом выше thermal_weight.

    Сохраняется не меньше min_states нижних пар, даже если их тепловой вес
    ниже порога.
    """
    diagonal, off = hamiltonian.diagonal, hamiltonian.off_diagonal
    grid = hamiltonian.grid
    ground = float(
        eigh_tridiagonal(diagonal, off, eigvals_only=True, select="i", select_range=(0, 0))[0]
    )
    cutoff = ground + float(np.log(1.0 / thermal_weight)) / thermo.beta

    # Оценки Гершгорина для спектра
    radius = 2.0 * float(np.max(np.abs(off))) if off.size else 0.0
    lower = float(np.min(diagonal)) - radius - 1.0
    upper = float(np.max(diagonal)) + radius

    if cutoff >= upper:
        eigenvalues, vectors = eigh_tridiagonal(diagonal, off)
    else:
        eigenvalues, vectors = eigh_tridiagonal(
            diagonal, off, select="v", select_range=(lower, cutoff)
        )
    wanted = min(min_states, grid.n_points)
    if eigenvalues.size < wanted:
        eigenvalues, vectors = eigh_tridiagonal(
            diagonal, off, select="i", select_range=(0, wanted - 1)
        )
    complete = eigenvalues.size == grid.n_points

    vectors = vectors / np.sqrt(grid.spacing)
    if vectors[:, 0].sum() < 0:
        vectors[:, 0] *= -1.0

    logger.debug(
        f"Diagonalized {grid.n_points}-point Hamiltonian: kept {eigenvalues.size} "
        f"states, E0={eigenvalues[0]:.10g}, complete={complete}"
    )
    return SpectralSolution(
        eigenvalues=eigenvalues,
        eigenvectors=vectors,
        grid=grid,
        ground_energy=ground,
        energy_cutoff=cutoff,
        complete=complete,
    )


def solve_spectrum(
    potential: BasePotential,
    thermo: ThermoState,
    grid: Grid,
    thermal_weight: float = THERMAL_WEIGHT,
    min_states: int = 1,
) -> SpectralSolution:
    """Диагонализует дискретный гамильтониан с тепловым усечением спектра.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Термодинамическое состояние.
        grid (Grid): Сетка.
        thermal_weight (float): Допустимый вес e^{−β(E_cut − E_0)}. Default: 1e-14.
        min_states (int): Минимум сохраняемых нижних пар, например 2 для
            первого интервала спектра при низкой температуре. Default: 1.

    Returns:
        SpectralSolution: Собственные пары ниже E_cut, но не меньше min_states.
    """
    return _diagonalize(
        discretize_hamiltonian(potential, thermo, grid), thermo, thermal_weight, min_states
    )


def thermal_density(
    solution: SpectralSolution,
    thermo: ThermoState,
    thermal_weight: float = THERMAL_WEIGHT,
) -> Tuple[DensityProfile, float]:
    """Строит P_QM = ρ_β/Z_QM и Z_QM по спектру.

    Args:
        solution (SpectralSolution): Спектр.
        thermo (ThermoState): Состояние с тем же β, что и при усечении.
        thermal_weight (float): Требуемая оценка хвоста. Default: 1e-14.

    Returns:
        Tuple[DensityProfile, float]: Нормированная плотность (log_norm = ln Z_QM)
        и сама Z_QM.

    Raises:
        TruncationError: Если сохранённых состояний недостаточно для данного β.
    """
    energies = solution.eigenvalues
    ground = float(energies[0])
    # Хвост отсчитывается от той же E_0, по которой выбран порог
    tail = float(np.exp(-thermo.beta * (solution.energy_cutoff - solution.ground_energy)))
    if not solution.complete and tail >= thermal_weight * (1.0 + 1e-6):
        logger.error(
            f"Thermal tail {tail:.3e} exceeds {thermal_weight:.1e} at beta={thermo.beta}"
        )
        raise TruncationError(
            f"Eigenpair truncation not converged: tail weight {tail:.3e} "
            f"at beta={thermo.beta}"
        )

    weights = np.exp(-thermo.beta * (energies - ground))
    rho_shifted = (solution.eigenvectors**2) @ weights
    grid = solution.grid
    log_z = float(np.log(weights.sum()) - thermo.beta * ground)
    values = rho_shifted / grid.integrate(rho_shifted)
    return DensityProfile(grid=grid, values=values, log_norm=log_z), float(np.exp(log_z))


def expectation(profile: DensityProfile, observable: Observable) -> float:
    """Среднее наблюдаемой по нормированной плотности (формула трапеций).

    Args:
        profile (DensityProfile): Нормированная плотность.
        observable (Observable): Функция координаты.

    Returns:
        float: ∫ O(x) P(x) dx.
    """
    grid = profile.grid
    values = np.broadcast_to(np.asarray(observable(grid.points), dtype=float), grid.points.shape)
    return grid.integrate(values * profile.values)


def exact_effective_potential(profile: DensityProfile, thermo: ThermoState) -> FloatArray:
    """Точный эффективный потенциал по начальной точке пути.

    V_QM(x) = −β⁻¹ ln ρ_β(x) + (2β)⁻¹ ln(m/2πβħ²), где ρ_β = P_QM·Z_QM.
    Нули плотности (подпотолочные значения) заменяются наименьшим
    положительным числом, чтобы таблица оставалась конечной.

    Args:
        profile (DensityProfile): P_QM с log_norm = ln Z_QM.
        thermo (ThermoState): Состояние.

    Returns:
        FloatArray: V_QM на сетке профиля.
    """
    log_rho = np.log(np.maximum(profile.values, np.finfo(float).tiny)) + profile.log_norm
    return -log_rho / thermo.beta + np.log(thermo.classical_prefactor**2) / (2.0 * thermo.beta)


def coupling_expectation(
    potential: BasePotential,
    thermo: ThermoState,
    grid: Grid,
    observable: Observable,
    d_lambda: float = 1e-4,
) -> float:
    """Среднее ⟨O⟩ = −β⁻¹ ∂_λ ln Z(V + λO) при λ = 0 центральной разностью.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        grid (Grid): Сетка.
        observable (Observable): Наблюдаемая O(x).
        d_lambda (float): Шаг по константе связи. Default: 1e-4.

    Returns:
        float: Оценка ⟨O⟩.
    """
    base = potential.value(grid.points)
    perturbation = np.broadcast_to(np.asarray(observable(grid.points), dtype=float), base.shape)
    log_z = []
    for sign in (1.0, -1.0):
        hamiltonian = _hamiltonian_from_values(base + sign * d_lambda * perturbation, thermo, grid)
        profile, _ = thermal_density(_diagonalize(hamiltonian, thermo), thermo)
        log_z.append(profile.log_norm)
    return -(log_z[0] - log_z[1]) / (2.0 * d_lambda * thermo.beta)


def harmonic_reference(
    mass: float, omega: float, thermo: ThermoState, grid: Grid
) -> Tuple[DensityProfile, float]:
    """Аналитическая плотность и статсумма гармонического осциллятора.

    P(x) — гауссиана с σ² = ħ coth(βħω/2)/(2mω), Z = 1/(2 sinh(βħω/2)).
    Значения плотности нормируются на сетке, чтобы их можно было сравнивать
    с табулированными профилями напрямую.

    Args:
        mass (float): Масса осциллятора.
        omega (float): Частота, > 0.
        thermo (ThermoState): Состояние (β, ħ).
        grid (Grid): Сетка.

    Returns:
        Tuple[DensityProfile, float]: Плотность и Z.
    """
    xi = thermo.beta * thermo.hbar * omega / 2.0
    variance = thermo.hbar / (2.0 * mass * omega * np.tanh(xi))
    x = grid.points
    values = np.exp(-(x**2) / (2.0 * variance)) / np.sqrt(2.0 * np.pi * variance)
    values = values / grid.integrate(values)
    z = 1.0 / (2.0 * np.sinh(xi))
    return DensityProfile(grid=grid, values=values, log_norm=float(np.log(z))), float(z)


def _boundary_mass(profile: DensityProfile, fraction: float = 0.02) -> float:
    """Масса плотности в крайних долях сетки с обеих сторон."""
    count = max(2, int(np.ceil(fraction * profile.grid.n_points)))
    weights = profile.grid.weights
    values = profile.values
    return float(
        np.dot(weights[:count], values[:count]) + np.dot(weights[-count:], values[-count:])
    )


def _extrapolate(fine: DensityProfile, coarse: DensityProfile) -> DensityProfile:
    """Экстраполяция Ричардсона двух сгущений на узлы грубой сетки.

    Ошибка трёхточечной схемы разлагается по степеням h², поэтому
    (4P_h/2 − P_h)/3 убирает главный член. Отрицательные значения в
    глубоких хвостах обнуляются, результат перенормируется.
    """
    grid = coarse.grid
    values = np.maximum((4.0 * fine.values[::2] - coarse.values) / 3.0, 0.0)
    values = values / grid.integrate(values)
    log_norm = (4.0 * fine.log_norm - coarse.log_norm) / 3.0
    return DensityProfile(grid=grid, values=values, log_norm=float(log_norm))


def converge(
    potential: BasePotential,
    thermo: ThermoState,
    coverage: float = 0.999999,
    tolerance: float = 1e-8,
    n_start: Optional[int] = None,
    max_doublings: int = 12,
    grid: Optional[Grid] = None,
) -> ConvergedSolution:
    """Сгущает сетку до сходимости P_QM.

    Число узлов удваивается. Каждая пара соседних сгущений даёт
    экстраполированную по Ричардсону плотность на узлах более грубой из них;
    сгущение прекращается, когда L1-изменение двух последовательных
    экстраполяций меньше tolerance. Результат (плотность, ln Z_QM и спектр)
    относится к предпоследней сетке. Если масса плотности у границ больше
    1e-10, сетка сначала расширяется с тем же шагом.

    Args:
        potential (BasePotential): Потенциал.
        thermo (ThermoState): Состояние.
        coverage (float): Требуемое покрытие для начальной сетки. Default: 0.999999.
        tolerance (float): Порог L1-изменения. Default: 1e-8.
        n_start (Optional[int]): Начальное число узлов на сетке auto_grid. Default: None.
        max_doublings (int): Максимум удвоений. Default: 12.
        grid (Optional[Grid]): Явная начальная сетка вместо auto_grid. Default: None.

    Returns:
        ConvergedSolution: Спектр, P_QM, Z_QM и журнал.

    Raises:
        ConvergenceError: Если сходимость не достигнута за max_doublings удвоений
            или сетка превысила config.MAX_GRID_POINTS.
    """
    from app.physics.grid import auto_grid

    if grid is None:
        grid = auto_grid(potential, thermo, coverage)
    if n_start is not None:
        grid = Grid(x_min=grid.x_min, x_max=grid.x_max, n_points=n_start)

    log: List[RefinementStep] = []
    previous: Optional[DensityProfile] = None
    previous_solution: Optional[SpectralSolution] = None
    extrapolated: Optional[DensityProfile] = None
    doublings = 0
    extensions = 0
    logger.info(
        f"Converging exact density on [{grid.x_min:.4g}, {grid.x_max:.4g}] "
        f"starting from {grid.n_points} points"
    )

    while True:
        if grid.n_points > config.MAX_GRID_POINTS:
            logger.error(f"Grid of {grid.n_points} points exceeds MAX_GRID_POINTS")
            raise ConvergenceError(
                f"Grid size {grid.n_points} exceeds limit {config.MAX_GRID_POINTS}", log
            )

        solution = solve_spectrum(potential, thermo, grid)
        profile, _ = thermal_density(solution, thermo)
        boundary = _boundary_mass(profile)

        if boundary > 1e-10 and extensions < 8:
            log.append(RefinementStep(grid.n_points, grid.x_min, grid.x_max, None, boundary, "extend"))
            logger.debug(f"Boundary mass {boundary:.3e}: extending grid")
            grid = grid.extended(0.25)
            previous = None
            extrapolated = None
            extensions += 1
            continue

        delta: Optional[float] = None
        current: Optional[DensityProfile] = None
        if previous is not None:
            current = _extrapolate(profile, previous)
            if extrapolated is not None:
                delta = float(
                    np.dot(
                        extrapolated.grid.weights,
                        np.abs(current.values[::2] - extrapolated.values),
                    )
                )

        done = delta is not None and delta < tolerance
        if done and current is not None and previous_solution is not None:
            log.append(RefinementStep(grid.n_points, grid.x_min, grid.x_max, delta, boundary, "done"))
            logger.info(
                f"Exact density converged on {current.grid.n_points} points "
                f"(extrapolated L1 delta {delta:.2e})"
            )
            return ConvergedSolution(
                solution=previous_solution,
                profile=current,
                partition_function=float(np.exp(current.log_norm)),
                log=log,
            )

        if doublings >= max_doublings:
            log.append(RefinementStep(grid.n_points, grid.x_min, grid.x_max, delta, boundary, "fail"))
            logger.error(f"No convergence after {max_doublings} doublings (last delta {delta})")
            raise ConvergenceError(
                f"Exact density did not converge after {max_doublings} doublings", log
            )

        log.append(RefinementStep(grid.n_points, grid.x_min, grid.x_max, delta, boundary, "refine"))
        logger.debug(f"Refinement step: n={grid.n_points}, L1 delta={delta}")
        previous = profile
        previous_solution = solution
        extrapolated = current
        grid = grid.refined()
        doublings += 1
