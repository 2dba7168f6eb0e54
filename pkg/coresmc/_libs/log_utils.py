#! /usr/bin/env python

# Lib Imports
from .file_utils import check_makedir

# coresmc Imports
from coresmc import *

# logging
log = logging.getLogger('coresmc.utils.log')

# constant that will be changed with global call
logging_is_setup = False

# we don't want the hostname field to stretch if its too long, so lets truncate after 16 chars.
if len(current_hostname) > 16:
    host_log_name = current_hostname[:15] + '~'
else:
    host_log_name = current_hostname
# the logging date time format
log_datetime_format = '%Y-%m-%d %H:%M:%S'
LOG_FORMAT = logging.Formatter(
    '%(asctime)s {host} %(name)s %(levelname)5.5s: %(message)s'.format(host=host_log_name),
    datefmt=log_datetime_format)
# special log format for extreme trace (includes filename and line number)
LOG_FORMAT_EXTRA = logging.Formatter(
    '%(asctime)s {host} [%(name)s %(filename)s:%(lineno)s] %(levelname)5.5s: %(message)s'.format(
        host=host_log_name),
    datefmt=log_datetime_format)
# progress files only need the time and the message
LOG_FORMAT_PROGRESS = logging.Formatter('%(asctime)s %(message)s', datefmt=log_datetime_format)


def add_file_log_handler(log_, path, level=logging.TRACE, **kwargs):
    """
    add a logging file handler to a log
    :param log_:
    :param path:
    :param level:
    :param kwargs:
    :return: the handler, or None on failure
    """
    try:
        check_makedir(os.path.dirname(path))
        fh = logging.FileHandler(path)
        fh.setLevel(level)
        fh.setFormatter(kwargs.get('format', LOG_FORMAT))
        log_.addHandler(fh)
    except Exception as exc:
        log.error('Exception adding log handler to log: log={} exc={}'.format(log_.name, exc))
        return None
    else:
        return fh


def remove_log_handler(log_, handler):
    """detach and close a handler previously returned by add_file_log_handler"""
    if handler is None:
        return
    log_.removeHandler(handler)
    handler.close()


def add_console_log_handler(log_, level=logging.TRACE, **kwargs):
    """
    add a logging console handler to a log
    :param log_:
    :param level:
    :param kwargs:
    :return:
    """
    try:
        ch = logging.StreamHandler()
        ch.setLevel(level)
        ch.setFormatter(kwargs.get('format', LOG_FORMAT))
        log_.addHandler(ch)
    except Exception as exc:
        log.error('Exception adding console handler to log: log={} exc={}'.format(log_.name, exc))
        return False
    else:
        return True


# numeric --log-level values: (level, formatter)
_LEVEL_TABLE = {
    0: (logging.INFO, LOG_FORMAT),
    1: (logging.DEBUG, LOG_FORMAT),
    2: (logging.TRACE, LOG_FORMAT),
    3: (logging.TRACE, LOG_FORMAT_EXTRA),
}


def _level_from_flag(value, default):
    try:
        return _LEVEL_TABLE[int(value)]
    except (TypeError, ValueError, KeyError):
        return default


def logging_setup(**kwargs):
    """
    configure the root logger once per process: a console handler and an optional file handler.
    later calls are ignored, so every test module and the command line can call it.
    :param log_level: console verbosity 0=info 1=debug 2=trace 3=trace with file:line
    :param level: console level as a logging constant, used when log_level is not given
    :param log_file: (optional) also log to this file
    :param log_file_level: file verbosity, same scale as log_level (trace by default)
    :param no_log: skip the setup notice
    """
    global logging_is_setup
    if logging_is_setup:
        log.trace('logging already set up, ignoring: kwargs={}'.format(kwargs))
        return

    console_level, console_format = _level_from_flag(
        kwargs.get('log_level'), (kwargs.get('level') or logging.INFO, LOG_FORMAT))
    file_level, file_format = _level_from_flag(kwargs.get('log_file_level'), _LEVEL_TABLE[2])
    log_file = kwargs.get('log_file')

    root = logging.getLogger()
    root.setLevel(logging.TRACE)
    add_console_log_handler(root, console_level, format=console_format)
    if log_file:
        add_file_log_handler(root, log_file, file_level, format=file_format)

    # numpy / scipy RuntimeWarnings end up in the run logs
    logging.captureWarnings(True)
    logging_is_setup = True

    if not kwargs.get('no_log'):
        log.info('logging set up: level={} file={}'.format(logging.getLevelName(console_level), log_file))
        log.trace('command line: {}'.format(sys.argv))


__all__ = [
    'logging_setup', 'add_console_log_handler', 'add_file_log_handler', 'remove_log_handler',
    'log_datetime_format', 'LOG_FORMAT_PROGRESS',
]
