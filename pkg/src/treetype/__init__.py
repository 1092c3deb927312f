"""treetype: plane trees, Speiser graphs, and type-problem evidence."""

__version__ = "0.1.0"
