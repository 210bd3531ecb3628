"""Deterministic simulation of a decentralized digital-will protocol."""

__version__ = "0.1.0"
