"""Пакет сценариев: конфигурация, встроенные пресеты, запуск, запись результатов и приёмка."""
