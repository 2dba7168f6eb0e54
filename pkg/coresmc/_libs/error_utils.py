#! /usr/bin/env python

# coresmc Imports
from coresmc import *

# logging
log = logging.getLogger('coresmc.utils.error')

# command line exit codes
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_COLLAPSE = 4


class CoreSmcException(RuntimeError):
    exit_code = 1


class ConfigError(CoreSmcException):
    exit_code = EXIT_CONFIG


class ParameterError(ConfigError):
    pass


class OrbitalDomainError(CoreSmcException):
    exit_code = EXIT_CONFIG


class OrderingError(CoreSmcException):
    exit_code = EXIT_INPUT


class CoreParseError(ConfigError):

    def __init__(self, message, path=None, line_num=None):
        super(CoreParseError, self).__init__(message, path, line_num)
        self.path = path
        self.line_num = line_num

    def __str__(self):
        return '{} (file={} line={})'.format(self.args[0], self.path, self.line_num)


class InputConsistencyError(CoreSmcException):
    exit_code = EXIT_INPUT


class FilterCollapseError(CoreSmcException):
    exit_code = EXIT_COLLAPSE

    def __init__(self, message, slice_index=None):
        super(FilterCollapseError, self).__init__(message, slice_index)
        self.slice_index = slice_index


class RunCollapseError(FilterCollapseError):
    pass


def exit_code_for(exc):
    """map an exception onto the command line exit code convention"""
    return getattr(exc, 'exit_code', 1)


__all__ = [
    'EXIT_OK', 'EXIT_CONFIG', 'EXIT_INPUT', 'EXIT_COLLAPSE',
    'CoreSmcException', 'ConfigError', 'ParameterError', 'OrbitalDomainError', 'OrderingError',
    'CoreParseError', 'InputConsistencyError', 'FilterCollapseError', 'RunCollapseError',
    'exit_code_for',
]
