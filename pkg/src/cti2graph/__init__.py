"""Compile threat-intelligence report text into typed provenance graphs."""

__version__ = "0.1.0"
