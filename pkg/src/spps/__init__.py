"""Multiparameter spectral-parameter power series for Sturm-Liouville problems."""

__version__ = "0.1.0"
