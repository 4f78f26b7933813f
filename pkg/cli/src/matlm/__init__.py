"""Document ranking with smoothed and topic-based language models as sparse matrix products."""

__version__ = "0.1.0"
