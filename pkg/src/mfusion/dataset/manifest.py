"""
A dataset is a list of labeled sequences plus provenance. On disk it is the
sequence JSON Lines file and a `<file>.meta.json` sidecar.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import DatasetError, DatasetIOError, EmptyDatasetError
from ..features import MANEUVERS, read_sequences, write_sequences
from ..util import atomic_write

log = logging.getLogger(__name__)

SOURCES = ('real-adapter', 'synthetic')
# straight, left lane change, left turn, right lane change, right turn
REFERENCE_CLASS_COUNTS = (234, 124, 58, 123, 55)


def meta_path(path):
    return str(path) + '.meta.json'


@dataclass
class DatasetManifest:
    sequences: list
    source: str = 'synthetic'
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise DatasetError("unknown dataset source %r" % self.source)
        ids = [s.id for s in self.sequences]
        if len(set(ids)) != len(ids):
            raise DatasetError("duplicate sequence ids")
        self._index = {s.id: s for s in self.sequences}

    def __len__(self):
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    @property
    def ids(self):
        return [s.id for s in self.sequences]

    @property
    def labels(self):
        return np.array([s.label for s in self.sequences], dtype=np.int64)

    @property
    def class_counts(self):
        return [int(c) for c in np.bincount(self.labels,
                                            minlength=len(MANEUVERS))]

    def get(self, seq_id):
        return self._index[seq_id]

    def subset(self, ids):
        """Manifest of the given ids, in the given order."""
        try:
            picked = [self._index[i] for i in ids]
        except KeyError as ex:
            raise DatasetError("unknown sequence id %s" % ex)
        return DatasetManifest(picked, self.source, dict(self.provenance))

    def require_nonempty(self, what='dataset'):
        if not self.sequences:
            raise EmptyDatasetError("%s has no sequences" % what)
        return self

    def meta(self):
        return {'source': self.source, 'count': len(self),
                'class_counts': self.class_counts,
                'classes': list(MANEUVERS),
                'provenance': self.provenance}

    def save(self, path):
        write_sequences(path, self.sequences)
        with atomic_write(meta_path(path)) as f:
            f.write(json.dumps(self.meta(), indent=2, sort_keys=True) + "\n")
        log.info("wrote %d sequences to %s", len(self), path)

    @classmethod
    def load(cls, path):
        sequences = read_sequences(path)
        try:
            with open(meta_path(path)) as f:
                meta = json.load(f)
        except IOError:
            log.debug("no sidecar for %s, assuming real-adapter data", path)
            meta = {'source': 'real-adapter', 'provenance': {'path': path}}
        except ValueError as ex:
            raise DatasetIOError("malformed sidecar %s: %s"
                                 % (meta_path(path), ex))
        out = cls(sequences, meta.get('source', 'real-adapter'),
                  meta.get('provenance') or {})
        counts = meta.get('class_counts')
        if counts is not None and list(counts) != out.class_counts:
            raise DatasetError("%s: sidecar class counts %s do not match "
                               "the data %s" % (path, counts,
                                                out.class_counts))
        return out
