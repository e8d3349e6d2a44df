"""rareseries: recurrence and clustering statistics of rare events in symbolic processes."""

__version__ = "0.1.0"
