"""
Mini-batch Adam training on mean cross-entropy.
"""

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigError, EmptyDatasetError, \
    TrainingDivergedError, ValidationError
from ..features import GAZE, KEEP_FRAMES, LANES, OBJECTS, stack_frames, \
    truncate_and_pad
from ..models import build, init_params
from ..numeric import Adam

log = logging.getLogger(__name__)

MASKS = {
    'all': (True, True, True),
    'full': (True, True, True),
    'interior': (True, False, False),
}
EVAL_CHUNK = 64


def parse_mask(value):
    """(gaze, objects, lanes) booleans from a name or a 3-item list."""
    if isinstance(value, str):
        try:
            return MASKS[value.strip().lower()]
        except KeyError:
            raise ValueError("unknown modality mask %r, expected one of %s"
                             % (value, "|".join(MASKS)))
    mask = tuple(bool(v) for v in value)
    if len(mask) != 3:
        raise ValueError("modality mask needs 3 booleans, got %r" % (value,))
    return mask


def mask_name(mask):
    for name, value in MASKS.items():
        if value == tuple(mask):
            return name
    return ",".join(str(int(v)) for v in mask)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 1
    early_stop_patience: int = 20
    modality_mask: tuple = (True, True, True)
    varying_time: bool = False
    validation_fraction: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValidationError("validation_fraction must be in [0, 1)")
        if self.learning_rate < 0:
            raise ValidationError("learning_rate must be >= 0")
        try:
            object.__setattr__(self, 'modality_mask',
                               parse_mask(self.modality_mask))
        except ValueError as ex:
            raise ConfigError(str(ex))

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        d = dict(d or {})
        unknown = set(d) - known
        if unknown:
            raise ConfigError("train: unknown settings %s"
                              % ", ".join(sorted(unknown)))
        return cls(**d)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass
class TrainHistory:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    best_epoch: int = None
    stopped_early: bool = False

    def to_dict(self):
        return {'train_loss': self.train_loss, 'val_loss': self.val_loss,
                'best_epoch': self.best_epoch,
                'stopped_early': self.stopped_early}


def apply_mask(X, mask):
    """Copy of X with masked-out modalities zeroed."""
    X = np.array(X, dtype=np.float64)
    for keep, sl in zip(mask, (GAZE, OBJECTS, LANES)):
        if not keep:
            X[..., sl] = 0.0
    return X


def expand_varying(sequences):
    """Every sequence at each of the five truncation lengths."""
    return [truncate_and_pad(s, keep) for s in sequences
            for keep in KEEP_FRAMES]


def holdout_split(sequences, fraction, rng):
    """Stratified (train, validation) split of a list of sequences."""
    if fraction <= 0:
        return list(sequences), []
    by_class = {}
    for s in sequences:
        by_class.setdefault(s.label, []).append(s)
    train, val = [], []
    for label in sorted(by_class):
        group = by_class[label]
        order = rng.permutation(len(group))
        n_val = int(round(fraction * len(group)))
        if n_val >= len(group):
            n_val = len(group) - 1
        val += [group[i] for i in order[:n_val]]
        train += [group[i] for i in order[n_val:]]
    return train, val


def batched_loss(model, X, y):
    if not len(X):
        return float('nan')
    total = 0.0
    for start in range(0, len(X), EVAL_CHUNK):
        chunk = slice(start, start + EVAL_CHUNK)
        total += model.loss(X[chunk], y[chunk]) * len(y[chunk])
    return total / len(X)


def batched_probs(model, X):
    return np.concatenate([model.forward(X[start:start + EVAL_CHUNK])[0]
                           for start in range(0, len(X), EVAL_CHUNK)]) \
        if len(X) else np.zeros((0, model.config.n_classes))


def prepare(sequences, config):
    if config.varying_time:
        sequences = expand_varying(sequences)
    X, y = stack_frames(sequences)
    return apply_mask(X, config.modality_mask), y


def train(manifest, model_config, config=None):
    """Fit a fresh model; returns (ModelParams, TrainHistory).

    With a validation holdout and a patience, training stops once the
    validation loss has not improved for that many epochs and the best
    parameters are restored.
    """
    config = config or TrainConfig()
    sequences = list(manifest)
    if not sequences:
        raise EmptyDatasetError("training set is empty")
    rng = np.random.default_rng(config.seed)
    use_val = config.validation_fraction > 0 and config.early_stop_patience
    train_seqs, val_seqs = holdout_split(
        sequences, config.validation_fraction if use_val else 0.0, rng)
    X, y = prepare(train_seqs, config)
    Xv, yv = prepare(val_seqs, config)

    params = init_params(model_config, config.seed)
    model = build(params)
    optimizer = Adam(config.learning_rate, config.beta1, config.beta2,
                     config.eps)
    history = TrainHistory()
    best, best_loss, waited = None, np.inf, 0
    log.debug("training %s on %d samples (%d validation)",
              params.arch, len(X), len(Xv))

    for epoch in range(config.epochs):
        order = rng.permutation(len(X))
        total = 0.0
        for start in range(0, len(X), config.batch_size):
            idx = order[start:start + config.batch_size]
            loss = model.loss_and_grad(X[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    "loss became %r at epoch %d, batch starting %d"
                    % (loss, epoch, start))
            optimizer.step(params.store)
            total += loss * len(idx)
        history.train_loss.append(total / len(X))

        if len(Xv):
            val = batched_loss(model, Xv, yv)
            history.val_loss.append(val)
            if val < best_loss:
                best_loss, best, waited = val, params.store.copy(), 0
                history.best_epoch = epoch
            else:
                waited += 1
                if waited >= config.early_stop_patience:
                    history.stopped_early = True
                    log.debug("early stop at epoch %d", epoch)
                    break
        log.debug("epoch %d train %.6f val %s", epoch,
                  history.train_loss[-1],
                  history.val_loss[-1] if history.val_loss else '-')

    if best is not None:
        params.store.assign(best)
        params.store.zero_grad()
    return params, history
