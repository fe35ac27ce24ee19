"""
Parameter layouts, initialisation and checkpoints.

A checkpoint is the ParamStore blob plus `<blob>.json` holding the
architecture tag, the config and the training seed.
"""

import json
import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigError, DimensionError, FusionError
from ..features import FRAME_WIDTH, GAZE, LANES, OBJECTS
from ..numeric import ParamStore
from ..util import atomic_write
from .config import FLstmConfig, FTfConfig, config_for

log = logging.getLogger(__name__)

MODALITY_WIDTHS = {
    'gaze': GAZE.stop - GAZE.start,
    'object': OBJECTS.stop - OBJECTS.start,
    'lane': LANES.stop - LANES.start,
}


def _linear(prefix, n_out, n_in):
    return [(prefix + '.W', (n_out, n_in), 'weight'),
            (prefix + '.b', (n_out,), 'bias')]


def flstm_layout(config):
    out = []
    for name, hidden in (('gaze', config.gaze_hidden),
                         ('lane', config.lane_hidden),
                         ('object', config.object_hidden)):
        out += _linear('lstm_' + name, 4 * hidden,
                       MODALITY_WIDTHS[name] + hidden)
    out += _linear('mlp.fc1', config.mlp_hidden, config.flatten_width)
    out += _linear('mlp.fc2', config.n_classes, config.mlp_hidden)
    return out


def ftf_layout(config):
    out = []
    for name, latent in (('gaze', config.gaze_latent),
                         ('object', config.object_latent),
                         ('lane', config.lane_latent)):
        out += _linear('proj_%s.fc1' % name, latent, MODALITY_WIDTHS[name])
        out += _linear('proj_%s.fc2' % name, latent, latent)
        if config.extra_projection:
            out += _linear('proj_%s.out' % name, latent, latent)
    d = config.token_dim
    for m in 'qkvo':
        out += [('attn.W' + m, (d, d), 'weight'), ('attn.b' + m, (d,), 'bias')]
    out += [('ln1.gamma', (d,), 'gamma'), ('ln1.beta', (d,), 'bias')]
    out += _linear('ff.fc1', config.ff_hidden, d)
    out += _linear('ff.fc2', d, config.ff_hidden)
    out += [('ln2.gamma', (d,), 'gamma'), ('ln2.beta', (d,), 'bias')]
    out += _linear('head.fc1', config.head_hidden, config.flatten_width)
    out += _linear('head.fc2', config.n_classes, config.head_hidden)
    return out


def layout(config):
    if isinstance(config, FLstmConfig):
        return flstm_layout(config)
    if isinstance(config, FTfConfig):
        return ftf_layout(config)
    raise ConfigError("not a model config: %r" % (config,))


def count_parameters(config):
    return int(sum(np.prod(shape) for _, shape, _ in layout(config)))


@dataclass
class ModelParams:
    store: ParamStore
    config: object
    seed: int = None

    def __post_init__(self):
        expected = {path: shape for path, shape, _ in layout(self.config)}
        if set(expected) != set(self.store.paths()):
            raise ConfigError("parameters do not match the %s layout"
                              % self.arch)
        for path, shape in expected.items():
            if self.store[path].shape != shape:
                raise DimensionError(path, shape, self.store[path].shape)

    @property
    def arch(self):
        return self.config.arch

    @property
    def num_params(self):
        return self.store.num_params

    def copy(self):
        return ModelParams(self.store.copy(), self.config, self.seed)

    def equals(self, other):
        return self.config == other.config and self.store.equals(other.store)


def init_params(config, seed=0):
    """Uniform(+-1/sqrt(fan_in)) weights, zero biases, unit LayerNorm
    gains."""
    rng = np.random.default_rng(seed)
    store = ParamStore()
    for path, shape, kind in sorted(layout(config)):
        if kind == 'weight':
            bound = 1.0 / np.sqrt(shape[1])
            store.add(path, rng.uniform(-bound, bound, shape))
        elif kind == 'gamma':
            store.add(path, np.ones(shape))
        else:
            store.add(path, np.zeros(shape))
    log.debug("initialised %s with %d parameters (seed %s)",
              config.arch, store.num_params, seed)
    return ModelParams(store, config, seed)


def zero_params(config):
    store = ParamStore()
    for path, shape, _ in layout(config):
        store.add(path, np.zeros(shape))
    return ModelParams(store, config)


def sidecar_path(path):
    return str(path) + '.json'


def save_checkpoint(path, params, extra=None):
    params.store.save(path)
    meta = {'arch': params.arch, 'config': params.config.to_dict(),
            'seed': params.seed, 'frame_width': FRAME_WIDTH}
    meta.update(extra or {})
    with atomic_write(sidecar_path(path)) as f:
        f.write(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    log.info("saved %s checkpoint to %s", params.arch, path)


def load_checkpoint(path):
    try:
        with open(sidecar_path(path)) as f:
            meta = json.load(f)
        store = ParamStore.load(path)
    except (IOError, ValueError) as ex:
        raise FusionError("cannot load checkpoint %s: %s" % (path, ex))
    config = config_for(meta.get('arch'), meta.get('config'))
    return ModelParams(store, config, meta.get('seed'))
