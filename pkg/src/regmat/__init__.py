"""Regular matroids, Albanese graphs and solution spaces over finite fields."""

__version__ = "0.1.0"
