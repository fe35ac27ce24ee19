"""
Dense float64 tensors and the named parameter store.

Tensors are plain numpy arrays of dtype float64; the helpers here only
enforce shape and finiteness. A ParamStore keeps every trainable array
under a dotted path together with a gradient slot of the same shape.
"""

import struct
import logging

import numpy as np

from ..exceptions import DimensionError, FusionError, ValidationError
from ..util import atomic_write

log = logging.getLogger(__name__)

MAGIC = b"MFW1"


def as_tensor(value, what='tensor'):
    """Return `value` as a finite float64 array."""
    arr = np.asarray(value, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("%s contains NaN or Inf" % what)
    return arr


def check_shape(arr, expected, what):
    """Raise DimensionError unless arr.shape matches `expected`.

    None in `expected` matches any size on that axis.
    """
    shape = np.shape(arr)
    if len(shape) != len(expected) or any(
            e is not None and e != s for e, s in zip(expected, shape)):
        raise DimensionError(what, [e if e is not None else -1
                                    for e in expected], shape)


class ParamStore:
    """Named trainable tensors plus one gradient slot per tensor.

    Iteration order is lexicographic by path, so flatten() is
    reproducible no matter in which order parameters were added.
    """

    def __init__(self):
        self._params = {}
        self._grads = {}

    def add(self, path, value):
        if path in self._params:
            raise ValidationError("duplicate parameter path %r" % path)
        arr = np.array(value, dtype=np.float64)
        self._params[path] = arr
        self._grads[path] = np.zeros_like(arr)
        return arr

    def __getitem__(self, path):
        return self._params[path]

    def __setitem__(self, path, value):
        current = self._params[path]
        value = np.asarray(value, dtype=np.float64)
        check_shape(value, current.shape, path)
        current[...] = value

    def __contains__(self, path):
        return path in self._params

    def __iter__(self):
        return iter(self.paths())

    def __len__(self):
        return len(self._params)

    def paths(self):
        return sorted(self._params)

    def grad(self, path):
        return self._grads[path]

    def has_grad(self, path):
        return path in self._grads

    def drop_grad(self, path):
        del self._grads[path]

    def accumulate(self, path, g):
        slot = self._grads[path]
        if slot.shape != np.shape(g):
            raise DimensionError("gradient of " + path, slot.shape,
                                 np.shape(g))
        slot += g

    def zero_grad(self):
        for g in self._grads.values():
            g.fill(0.0)

    @property
    def num_params(self):
        return int(sum(p.size for p in self._params.values()))

    def flatten(self):
        if not self._params:
            return np.zeros(0)
        return np.concatenate([self._params[p].ravel()
                               for p in self.paths()])

    def unflatten(self, vector):
        """Return a new store with this layout and values from `vector`."""
        vector = np.asarray(vector, dtype=np.float64)
        check_shape(vector, (self.num_params,), "flat parameter vector")
        out = ParamStore()
        offset = 0
        for path in self.paths():
            shape = self._params[path].shape
            size = self._params[path].size
            out.add(path, vector[offset:offset + size].reshape(shape))
            offset += size
        return out

    def copy(self):
        out = ParamStore()
        for path in self.paths():
            out.add(path, self._params[path])
            out._grads[path][...] = self._grads[path]
        return out

    def assign(self, other):
        """Copy values from another store with the same layout."""
        if other.paths() != self.paths():
            raise ValidationError("parameter layouts differ")
        for path in self.paths():
            self[path] = other[path]

    def equals(self, other):
        return (self.paths() == other.paths() and
                all(np.array_equal(self[p], other[p]) for p in self.paths()))

    def to_bytes(self):
        """Serialise as: magic, count, then per slot path length, path,
        rank, dims and the little-endian f64 payload."""
        chunks = [MAGIC, struct.pack('<I', len(self._params))]
        for path in self.paths():
            arr = self._params[path]
            name = path.encode('utf-8')
            chunks.append(struct.pack('<I', len(name)))
            chunks.append(name)
            chunks.append(struct.pack('<I', arr.ndim))
            chunks.append(struct.pack('<%dI' % arr.ndim, *arr.shape))
            chunks.append(arr.astype('<f8').tobytes())
        return b''.join(chunks)

    @classmethod
    def from_bytes(cls, blob):
        if blob[:4] != MAGIC:
            raise FusionError("not a parameter blob (bad magic %r)"
                              % blob[:4])
        try:
            (count,) = struct.unpack_from('<I', blob, 4)
            offset = 8
            out = cls()
            for _ in range(count):
                (n,) = struct.unpack_from('<I', blob, offset)
                offset += 4
                path = blob[offset:offset + n].decode('utf-8')
                offset += n
                (rank,) = struct.unpack_from('<I', blob, offset)
                offset += 4
                dims = struct.unpack_from('<%dI' % rank, blob, offset)
                offset += 4 * rank
                size = int(np.prod(dims)) if rank else 1
                data = np.frombuffer(blob, dtype='<f8', count=size,
                                     offset=offset)
                offset += 8 * size
                out.add(path, data.reshape(dims))
        except (struct.error, ValueError) as ex:
            raise FusionError("truncated parameter blob: %s" % ex)
        if offset != len(blob):
            raise FusionError("trailing bytes after parameter blob")
        return out

    def save(self, path):
        with atomic_write(path, 'wb') as f:
            f.write(self.to_bytes())
        log.debug("saved %d parameter slots to %s", len(self), path)

    @classmethod
    def load(cls, path):
        with open(path, 'rb') as f:
            return cls.from_bytes(f.read())
