"""Finite windows of the Bruhat-Tits building of SL_{n+1} over F_q((1/t)),
their quotients by congruence subgroups, and exact harmonic cochain computations."""

__version__ = "0.1.0"
