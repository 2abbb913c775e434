"""pvlens: drug-label safety term extraction and review workflow."""

__version__ = "0.1.0"
