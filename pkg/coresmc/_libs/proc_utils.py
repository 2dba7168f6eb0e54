#! /usr/bin/env python

# Standard Imports
import platform

# External Imports
import psutil

# coresmc Imports
from coresmc import *

# logging
log = logging.getLogger('coresmc.utils.proc')


def default_worker_count():
    """physical cores if psutil can tell, otherwise logical, never less than 1"""
    count = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True) or 1
    log.trace('default worker count: count={}'.format(count))
    return int(count)


def resolve_worker_count(requested=None):
    """the requested worker count, capped to the logical cores available"""
    available = psutil.cpu_count(logical=True) or 1
    if not requested:
        return default_worker_count()
    if int(requested) > available:
        log.warn('requested workers exceed logical cores, capping: requested={} available={}'.format(
            requested, available))
    return max(1, min(int(requested), available))


def resource_snapshot():
    """a small dictionary describing this host and process, for run manifests"""
    proc = psutil.Process()
    memory = psutil.virtual_memory()
    return {
        'host': current_hostname,
        'platform': platform.platform(),
        'python': platform.python_version(),
        'cpu_logical': psutil.cpu_count(logical=True),
        'cpu_physical': psutil.cpu_count(logical=False),
        'memory_total_mb': round(memory.total / 2.0 ** 20, 1),
        'process_rss_mb': round(proc.memory_info().rss / 2.0 ** 20, 1),
    }


__all__ = ['default_worker_count', 'resolve_worker_count', 'resource_snapshot']
