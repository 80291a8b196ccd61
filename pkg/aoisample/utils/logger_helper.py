import logging
import threading

import aoisample.config

_context = threading.local()


def set_replication(index):
    """Tag the log records emitted by the current thread with a replication.

    Args:
        index (int or None): replication index, None to clear the tag
    """
    _context.replication = index


class useLevelsFilter(logging.Filter):
    def __init__(self, levels):
        if not isinstance(levels, (tuple, list)):
            levels = (levels, )
        self.levelnos = [getattr(logging, i) for i in levels]

    def filter(self, record):
        return record.levelno in self.levelnos


class requireDebugFilter(logging.Filter):
    def filter(self, record):
        return aoisample.config.DEBUG


class replicationFilter(logging.Filter):
    """Add the ``replication`` attribute used by the debug formatter."""

    def filter(self, record):
        record.replication = getattr(_context, 'replication', None)
        if record.replication is None:
            record.replication = '-'
        return True
