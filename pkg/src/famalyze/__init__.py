"""famalyze: lifted numerical static analysis of `#if`-configured program families."""

__version__ = "0.1.0"
