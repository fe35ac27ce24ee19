import dataclasses
from dataclasses import dataclass

from ..exceptions import ConfigError, ValidationError


class _Config:
    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d or {}) - names
        if unknown:
            raise ConfigError("%s: unknown settings %s"
                              % (cls.__name__, ", ".join(sorted(unknown))))
        return cls(**(d or {}))

    def to_dict(self):
        return dataclasses.asdict(self)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def _positive(self, *names):
        for name in names:
            if int(getattr(self, name)) < 1:
                raise ValidationError("%s.%s must be >= 1"
                                      % (type(self).__name__, name))


@dataclass(frozen=True)
class FLstmConfig(_Config):
    gaze_hidden: int = 10
    lane_hidden: int = 5
    object_hidden: int = 10
    mlp_hidden: int = 100
    n_classes: int = 5
    seq_len: int = 150

    arch = 'flstm'

    def __post_init__(self):
        self._positive('gaze_hidden', 'lane_hidden', 'object_hidden',
                       'mlp_hidden', 'n_classes', 'seq_len')

    @property
    def step_width(self):
        return self.gaze_hidden + self.lane_hidden + self.object_hidden

    @property
    def flatten_width(self):
        return self.seq_len * self.step_width


@dataclass(frozen=True)
class FTfConfig(_Config):
    gaze_latent: int = 32
    object_latent: int = 16
    lane_latent: int = 16
    n_heads: int = 4
    head_hidden: int = 256
    ff_hidden: int = 128
    n_classes: int = 5
    seq_len: int = 150
    positional_encoding: bool = True
    # an extra linear layer after each modality MLP
    extra_projection: bool = False

    arch = 'ftf'

    def __post_init__(self):
        self._positive('gaze_latent', 'object_latent', 'lane_latent',
                       'n_heads', 'head_hidden', 'ff_hidden', 'n_classes',
                       'seq_len')
        if self.token_dim % self.n_heads:
            raise ValidationError("token width %d is not divisible by %d "
                                  "heads" % (self.token_dim, self.n_heads))

    @property
    def token_dim(self):
        return self.gaze_latent + self.object_latent + self.lane_latent

    @property
    def flatten_width(self):
        return self.seq_len * self.token_dim


CONFIGS = {'flstm': FLstmConfig, 'ftf': FTfConfig}


def config_for(arch, d=None):
    try:
        cls = CONFIGS[arch]
    except KeyError:
        raise ConfigError("unknown model %r, expected one of %s"
                          % (arch, "|".join(CONFIGS)))
    return cls.from_dict(d)
