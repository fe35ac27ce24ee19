"""
@file __init__.py

@brief
mfusion: driver maneuver prediction from fused in-cabin (head pose and eye
gaze) and exterior (object and lane) features, with the F-LSTM and F-TF
fusion models and the zero-time and varying-time evaluation protocols.

Run `mfusion -h` for the command line.
"""

try:
    from .version import version as __version__
except ImportError:
    __version__ = 'UNKNOWN'
