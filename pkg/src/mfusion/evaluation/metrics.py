"""
Accuracy, macro F1 and the confusion matrix (rows: true class, columns:
predicted class).
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import EmptyDatasetError
from ..features import MANEUVERS, stack_frames
from ..models import build, decide
from .train import apply_mask, batched_probs

N_CLASSES = len(MANEUVERS)


def confusion_matrix(y_true, y_pred, n_classes=N_CLASSES):
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (np.asarray(y_true, dtype=np.int64),
                   np.asarray(y_pred, dtype=np.int64)), 1)
    return cm


@dataclass
class Metrics:
    accuracy: float
    macro_f1: float
    confusion: np.ndarray
    per_class_accuracy: list
    per_class_f1: list

    @classmethod
    def from_confusion(cls, cm):
        cm = np.asarray(cm, dtype=np.int64)
        total = cm.sum()
        if total == 0:
            raise EmptyDatasetError("no predictions to score")
        tp = np.diag(cm).astype(np.float64)
        support = cm.sum(axis=1)
        predicted = cm.sum(axis=0)
        f1 = []
        for c in range(len(cm)):
            p = tp[c] / predicted[c] if predicted[c] else 0.0
            r = tp[c] / support[c] if support[c] else 0.0
            f1.append(2 * p * r / (p + r) if p + r else 0.0)
        per_class = [float(tp[c] / support[c]) if support[c] else None
                     for c in range(len(cm))]
        return cls(float(tp.sum() / total), float(np.mean(f1)), cm,
                   per_class, [float(v) for v in f1])

    def to_dict(self):
        return {'accuracy': self.accuracy, 'macro_f1': self.macro_f1,
                'confusion': self.confusion.tolist(),
                'per_class_accuracy': self.per_class_accuracy,
                'per_class_f1': self.per_class_f1}


def score(y_true, y_pred):
    if not len(y_true):
        raise EmptyDatasetError("test set is empty")
    return Metrics.from_confusion(confusion_matrix(y_true, y_pred))


def predict_all(model, sequences, mask=(True, True, True)):
    """Predicted classes for a list of sequences."""
    X, _ = stack_frames(list(sequences))
    return decide(batched_probs(build(model), apply_mask(X, mask)))


def evaluate(model, sequences, mask=(True, True, True)):
    sequences = list(sequences)
    if not sequences:
        raise EmptyDatasetError("test set is empty")
    y = np.array([s.label for s in sequences], dtype=np.int64)
    return score(y, predict_all(model, sequences, mask))
