"""Cryptographic randomized response: verifiable OT, ZK arguments, CRRT protocols."""

__version__ = "0.1.0"
