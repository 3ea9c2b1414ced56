"""Fantasy football language-understanding and score projection engine."""

__version__ = "0.1.0"
