"""Improved unsupervised discriminant projection: large-scale linear
dimension reduction and an unsupervised regularizer for semi-supervised
training of small feedforward networks.
"""

from .dataset import Dataset, SemiSplit

__all__ = ["Dataset", "SemiSplit"]
__version__ = "0.1.0"
