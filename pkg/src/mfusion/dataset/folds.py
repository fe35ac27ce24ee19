import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import ArgumentError
from ..features import MANEUVERS

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoldSplit:
    """k disjoint test folds of sequence ids; each fold trains on the
    rest."""
    folds: tuple

    @property
    def k(self):
        return len(self.folds)

    def test_ids(self, i):
        return list(self.folds[i])

    def train_ids(self, i):
        return [sid for j, fold in enumerate(self.folds) if j != i
                for sid in fold]

    def __iter__(self):
        for i in range(self.k):
            yield self.train_ids(i), self.test_ids(i)


def stratified_kfold(manifest, k, seed=0):
    """Round-robin each class's shuffled ids across k folds.

    Classes are laid end to end before dealing, so fold sizes and each
    class's per-fold counts differ by at most one.
    """
    counts = [c for c in manifest.class_counts if c > 0]
    if k < 2:
        raise ArgumentError("k must be at least 2, got %d" % k)
    if not counts or k > min(counts):
        raise ArgumentError("k=%d exceeds the smallest class count %s"
                            % (k, min(counts) if counts else 0))
    rng = np.random.default_rng(seed)
    by_class = [[] for _ in MANEUVERS]
    for seq in manifest:
        by_class[seq.label].append(seq.id)
    dealt = []
    for ids in by_class:
        dealt.extend(ids[i] for i in rng.permutation(len(ids)))
    folds = [[] for _ in range(k)]
    for i, sid in enumerate(dealt):
        folds[i % k].append(sid)
    log.debug("fold sizes %s", [len(f) for f in folds])
    return FoldSplit(tuple(tuple(f) for f in folds))
