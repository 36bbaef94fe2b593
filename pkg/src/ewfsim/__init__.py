"""Simulation of the extended Wigner's friend protocol, quantum erasure and
decoherence by qubit loss or phase randomization."""

from . import agents, channels, erasure, estimates, ewf, qstate

__all__ = ["agents", "channels", "erasure", "estimates", "ewf", "qstate"]
__version__ = "0.1.0"
