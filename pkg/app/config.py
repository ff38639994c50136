"""Модуль конфигурации приложения.

Содержит класс Config для загрузки настроек из переменных окружения.
Позволяет управлять параллелизмом, логированием, каталогом результатов
и ограничениями на размер сеток.
"""

import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Класс конфигурации приложения.

    Загружает настройки из .env файла и переменных окружения с префиксом
    ``QEPOT_`` и предоставляет:
        - Ограничение параллелизма сценарного раннера
        - Параметры логирования
        - Пути к результатам и файлу регрессионных значений
        - Предельный размер сетки для точной диагонализации

    Attributes:
        THREADS (int): Максимальное число одновременных задач (β, метод).
        LOG_LEVEL (str): Уровень логирования (DEBUG, INFO, WARNING, ...).
        LOG_FILE (str): Файл логов. Пустая строка означает вывод в консоль.
        OUTPUT_DIR (str): Каталог для CSV и манифеста по умолчанию.
        REGRESSION_FILE (str): JSON с закреплёнными значениями для морзе-пресета.
        MAX_GRID_POINTS (int): Верхняя граница числа узлов сетки.
        IO_RETRIES (int): Число попыток записи файлов.
    """

    # Параллелизм
    THREADS: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)

    # Логирование
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = ""

    # Результаты
    OUTPUT_DIR: str = "results"
    REGRESSION_FILE: str = "regression/morse_pins.json"

    # Численные ограничения
    MAX_GRID_POINTS: int = Field(default=262145, ge=3)
    IO_RETRIES: int = Field(default=3, ge=1)

    # Конфигурация загрузки переменных окружения
    model_config = SettingsConfigDict(env_file=".env", env_prefix="QEPOT_")


# Единственный экземпляр конфигурации, используемый в приложении
config: Config = Config()
