"""
@file util.py

@brief
mfusion utility functions: logging setup, dependency versions and atomic
file output.
"""
import os
import sys
import logging
import logging.config
import tempfile
from contextlib import contextmanager
from importlib import metadata

from . import config
from .exceptions import ConfigError


log = logging.getLogger(__name__)

LOG_LEVELS = {
    'error': logging.ERROR,
    'info': logging.INFO,
    'debug': logging.DEBUG,
}


def versions_report():
    """ Get versions of mfusion and all dependencies, if possible."""

    versions = [('Python', sys.version.split()[0])]
    try:
        versions.append(('mfusion', metadata.version('mfusion')))
        requires = metadata.requires('mfusion') or []
    except metadata.PackageNotFoundError:
        versions.append(('mfusion', 'not installed'))
        requires = []
    for req in requires:
        name = req.split(';')[0].split('>')[0].split('<')[0].split('=')[0]
        name = name.strip()
        try:
            versions.append((name, metadata.version(name)))
        except metadata.PackageNotFoundError:
            versions.append((name, 'missing'))
    return versions


def initlog(path=None):
    """ Set up logging

    MF_LOG, when set, overrides the root level from logging.yaml.
    """
    logconf = config.load('logging.yaml', path)
    logging.config.dictConfig(logconf)
    level = os.environ.get('MF_LOG')
    if level:
        try:
            logging.getLogger().setLevel(LOG_LEVELS[level.strip().lower()])
        except KeyError:
            raise ConfigError("MF_LOG must be one of %s, got %r"
                              % ('|'.join(LOG_LEVELS), level))
    log.debug("LOGLEVEL ENABLED: DEBUG")


def _umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


@contextmanager
def atomic_write(path, mode='w'):
    """ Write to a temp file beside `path`, renaming over it on success.

    On any exception the temp file is removed and `path` is untouched.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix='.%s.' % os.path.basename(path),
                               dir=directory)
    try:
        with os.fdopen(fd, mode) as f:
            yield f
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
