"""Statevector simulation and benchmark harness for synergic quantum
generative training and its QGAN baseline."""

__version__ = "0.1.0"
