"""Модуль исключений приложения.

Все ошибки расчётных модулей наследуются от QepotError, чтобы сценарный
раннер мог перехватывать их по одной задаче (β, метод) и продолжать запись
частичных результатов.

Classes:
    QepotError: Базовое исключение приложения.
    PotentialError: Некорректные параметры потенциала.
    GridError: Невозможно построить сетку.
    TruncationError: Не выполнена оценка хвоста теплового спектра.
    ConvergenceError: Исчерпан лимит сгущений сетки.
    SmearingError: Ошибка гауссова сглаживания.
    NormalizationError: Функцию невозможно нормировать.
    GridMismatchError: Профили заданы на разных сетках.
    SamplingError: Недостаточно цепочек для оценки ошибки.
    ConfigError: Ошибка разбора конфигурации сценария.
"""

from typing import Any, List, Optional


class QepotError(Exception):
    """Базовое исключение для всех ошибок расчёта."""


class PotentialError(QepotError, ValueError):
    """Параметры потенциала недопустимы."""


class GridError(QepotError):
    """Сетку невозможно построить (например, потенциал не ограничен снизу)."""


class TruncationError(QepotError):
    """Отброшенные собственные пары дают недопустимый тепловой вес."""


class ConvergenceError(QepotError):
    """Итерационная процедура не сошлась.

    Attributes:
        log (List[Any]): Журнал шагов, выполненных до отказа.
    """

    def __init__(self, message: str, log: Optional[List[Any]] = None) -> None:
        """Инициализация ошибки сходимости.

        Args:
            message (str): Текст ошибки.
            log (Optional[List[Any]]): Журнал шагов сгущения. Default: None.
        """
        super().__init__(message)
        self.log: List[Any] = list(log or [])


class SmearingError(QepotError):
    """Режим сглаживания не подходит потенциалу или квадратура не сошлась."""


class NormalizationError(QepotError, ValueError):
    """Табулированную функцию невозможно превратить в плотность."""


class GridMismatchError(QepotError, ValueError):
    """Сравниваемые профили лежат на разных сетках."""


class SamplingError(QepotError):
    """Оценка по выборке невозможна (например, меньше двух цепочек)."""


class ConfigError(QepotError, ValueError):
    """Ошибка строгого разбора конфигурации сценария.

    Attributes:
        key (str): Ключ в точечной нотации, вызвавший ошибку.
        line (Optional[int]): Номер строки файла конфигурации.
    """

    def __init__(self, message: str, key: str = "", line: Optional[int] = None) -> None:
        """Инициализация ошибки конфигурации.

        Args:
            message (str): Описание проблемы.
            key (str): Ключ конфигурации. Default: "".
            line (Optional[int]): Номер строки. Default: None.
        """
        location = f" (key '{key}'" + (f", line {line})" if line else ")") if key else ""
        super().__init__(f"{message}{location}")
        self.key = key
        self.line = line
