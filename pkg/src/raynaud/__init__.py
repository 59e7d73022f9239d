"""Certification kernel for n-Tango curves and n-Raynaud surfaces over prime fields."""

__version__ = "0.1.0"
