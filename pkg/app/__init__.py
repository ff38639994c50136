"""Основной пакет приложения для расчёта квантовых эффективных классических потенциалов."""

__version__ = "0.1.0"
