"""Academic vs. social-media reception analysis for research corpora."""

__version__ = "0.1.0"
