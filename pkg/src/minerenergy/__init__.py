"""Bitcoin miner energy bounds from economic factors."""

__version__ = "0.1.0"
