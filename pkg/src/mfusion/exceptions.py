"""
@file exceptions.py

@brief
Error hierarchy for mfusion. Every error carries the process exit code the
CLI should return when it escapes a command: 1 for bad input, 2 for runtime
failures.
"""


# Represents a generic mfusion failure. Raise this or one of the predefined
# child classes; the CLI turns exit_code into the process status.
class FusionError(Exception):
    exit_code = 2

    def __init__(self, info='', exit_code=None):
        Exception.__init__(self, info)
        self.info = info
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self):
        return "%s: %s" % (type(self).__name__, self.info)


# Input did not pass validation (exit 1)
class ValidationError(FusionError):
    exit_code = 1


class DimensionError(ValidationError):
    def __init__(self, what, expected, got):
        ValidationError.__init__(
            self, "%s: expected shape %s, got %s" % (
                what, tuple(expected), tuple(got)))
        self.expected = tuple(expected)
        self.got = tuple(got)


class NormalizationError(ValidationError):
    pass


class LengthError(ValidationError):
    pass


class ArgumentError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


# A landmark file line that is not valid JSON or lacks required structure
class LandmarkFormatError(ValidationError):
    def __init__(self, info, lineno=None):
        if lineno is not None:
            info = "line %d: %s" % (lineno, info)
        ValidationError.__init__(self, info)
        self.lineno = lineno


class DatasetError(ValidationError):
    pass


class EmptyDatasetError(DatasetError):
    pass


# Geometry solves (exit 2). Per-frame callers catch these and record a
# sentinel instead.
class GeometryError(FusionError):
    pass


class BehindCameraError(GeometryError):
    def __init__(self, index, depth):
        GeometryError.__init__(
            self, "point %d has non-positive depth %g" % (index, depth))
        self.index = index
        self.depth = depth


class NonConvergenceError(GeometryError):
    def __init__(self, info, pose, residual):
        GeometryError.__init__(
            self, "%s (residual %g)" % (info, residual))
        self.pose = pose
        self.residual = residual


class DegenerateConfigurationError(GeometryError):
    pass


class ParallelRayError(GeometryError):
    pass


class TrainingError(FusionError):
    pass


class TrainingDivergedError(TrainingError):
    pass


class MissingGradientError(TrainingError):
    pass


class DatasetIOError(FusionError):
    pass
