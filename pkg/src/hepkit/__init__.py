"""hepkit: author, generate, validate, run, and evaluate monitored home
exercise programs."""

__version__ = "0.1.0"
