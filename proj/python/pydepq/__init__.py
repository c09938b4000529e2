"""Concurrent double-ended priority queues."""

from ._pydepq import DualDepq, ListDepq, SeqDepq, bench, check_history, replay

__all__ = ["DualDepq", "ListDepq", "SeqDepq", "bench", "check_history", "replay"]
