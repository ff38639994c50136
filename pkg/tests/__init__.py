"""Тесты расчётного ядра, сценарного раннера и командной строки qepot."""
