"""Gradient-echo optical memory simulator driven by impulsive molecular alignment."""

__version__ = "0.1.0"
