"""
Reference predictors that ignore the input.
"""

import numpy as np

from ..exceptions import EmptyDatasetError
from ..features import MANEUVERS


def chance_accuracy(labels, draws=1000, seed=0):
    """Mean accuracy of uniform random guessing over `draws` repetitions."""
    labels = np.asarray(labels, dtype=np.int64)
    if not len(labels):
        raise EmptyDatasetError("no labels")
    rng = np.random.default_rng(seed)
    guesses = rng.integers(0, len(MANEUVERS), size=(draws, len(labels)))
    return float((guesses == labels).mean())


def prior_accuracy(labels):
    """Accuracy of always predicting the most frequent class."""
    labels = np.asarray(labels, dtype=np.int64)
    if not len(labels):
        raise EmptyDatasetError("no labels")
    counts = np.bincount(labels, minlength=len(MANEUVERS))
    return float(counts.max() / counts.sum())
