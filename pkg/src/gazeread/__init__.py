"""Gaze-driven adaptive reading: comprehension estimation and sentence simplification."""

__version__ = "0.1.0"
