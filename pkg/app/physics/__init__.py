"""Расчётное ядро: потенциалы, точный эталон, сглаживание и эффективные потенциалы."""
