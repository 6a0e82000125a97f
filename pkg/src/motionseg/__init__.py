"""Unsupervised segmentation of motion recordings into activities and primitives."""

__version__ = "0.1.0"
