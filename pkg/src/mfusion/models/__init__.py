"""
F-LSTM and F-TF maneuver classifiers.
"""

import numpy as np

from ..exceptions import ConfigError
from .config import FLstmConfig, FTfConfig, config_for
from .params import ModelParams, init_params, zero_params, count_parameters, \
    layout, save_checkpoint, load_checkpoint
from .base import Model, as_batch
from .flstm import FLstm
from .ftf import FTf

ARCHITECTURES = {'flstm': FLstm, 'ftf': FTf}


def build(params):
    """Model object for a ModelParams, or the model itself."""
    if isinstance(params, Model):
        return params
    try:
        return ARCHITECTURES[params.arch](params)
    except KeyError:
        raise ConfigError("unknown architecture %r" % params.arch)


def _forward(arch, seq, params):
    if params.arch != arch:
        raise ConfigError("expected %s parameters, got %s"
                          % (arch, params.arch))
    return build(params).probs(seq)


def flstm_forward(seq, params):
    return _forward('flstm', seq, params)


def ftf_forward(seq, params):
    return _forward('ftf', seq, params)


def decide(probs):
    """argmax over the last axis; ties go to the lowest class index."""
    idx = np.argmax(probs, axis=-1)
    return int(idx) if np.ndim(idx) == 0 else idx


def predict(model, seq):
    """(class index, probabilities) for one sequence, or arrays of both
    for a batch."""
    probs = build(model).probs(seq)
    return decide(probs), probs


__all__ = [
    'FLstmConfig', 'FTfConfig', 'config_for', 'ModelParams', 'init_params',
    'zero_params', 'count_parameters', 'layout', 'save_checkpoint',
    'load_checkpoint', 'Model', 'as_batch', 'FLstm', 'FTf', 'ARCHITECTURES',
    'build', 'flstm_forward', 'ftf_forward', 'decide', 'predict',
]
