"""qexpand: expansion-based QBF solving on top of incremental SAT."""

__version__ = "0.1.0"
