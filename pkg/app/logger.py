"""Модуль настройки логгирования для приложения.

Предоставляет функцию setup_logger для конфигурации вывода логов в файл или консоль,
а также возможность полного отключения логгирования. Используется CLI перед запуском
сценариев, чтобы этапы расчёта (диагонализация, самосогласование, выборка) были
видны в одном потоке.
"""

import logging
from typing import Union


def setup_logger(
    disable_logging: bool = False,
    log_level: Union[int, str] = logging.INFO,
    log_file: str = "",
) -> None:
    """Настраивает систему логгирования для приложения.

    Конфигурирует базовые настройки логирования с возможностью вывода как в консоль,
    так и в файл. Поддерживает полное отключение логирования при необходимости.

    Args:
        disable_logging: Флаг отключения логирования. Если True, все логи будут
                         отключены на уровне CRITICAL. Default: False.
        log_level: Уровень детализации логирования: число (logging.DEBUG, ...) или
                   имя уровня ("DEBUG", "INFO", ...). Default: INFO.
        log_file: Путь к файлу для записи логов. Если пусто, вывод будет направлен
                  в стандартный поток ошибок (консоль). Default: ''.
    """
    if disable_logging:
        logging.disable(logging.CRITICAL)
        return

    if isinstance(log_level, str):
        log_level = logging.getLevelName(log_level.upper())
        if not isinstance(log_level, int):
            log_level = logging.INFO

    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    logging.basicConfig(
        level=log_level,
        format=log_format,
        filename=log_file or None,
        filemode="a",
        force=True,
    )
