"""Deterministic grid-kitchen cooperation benchmark.

Simulator, difficulty-controlled task generator, metric suite, abstract
DAG-scheduling family with an exact oracle, LLM evaluation harness, and a
session service for interactive play.
"""

__version__ = "0.1.0"
