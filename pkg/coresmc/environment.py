#! /usr/bin/env python

# This is a file that is needed for the package,
# it contains the constants and does some monkey patching to the logging module to add a trace level.
# it defines the directories that we will use

# Standard Imports
import os
import sys
import platform
import socket
import logging

# platform variables
current_hostname = platform.node() or socket.gethostname()

# ====================================================== LOGGING! ======================================================
# change WARNING to WARN
# overwrites default "WARNING" output for nice logging level names
logging.addLevelName(logging.WARNING, 'WARN')

# Logging fixes to add "trace" level using monkey-patch method.
_TRACE_LOG_LEVEL = 9
logging.TRACE = _TRACE_LOG_LEVEL
logging.addLevelName(_TRACE_LOG_LEVEL, 'TRACE')


#  monkey patch to add "trace" level to logs so that log.trace() works.
def _trace(self, message, *args, **kws):
    if self.isEnabledFor(_TRACE_LOG_LEVEL):
        self._log(_TRACE_LOG_LEVEL, message, args, **kws)  # Yes, logger takes its '*args' as 'args'.


logging.Logger.trace = _trace  # add the new function to the logger class
# ====================================================== LOGGING! ======================================================

# package version (also used in run manifests)
coresmc_version = '0.3.0'

# common directories
_coresmc_dir = os.path.dirname(os.path.abspath(__file__))
cs_data_dir = os.path.join(_coresmc_dir, 'data')  # packaged coefficient tables and default config
init_working_directory = os.getcwd()  # the directory that the user was in when this code was initialized

# default artifact and log dirs
cs_artifact_dir = os.path.join(init_working_directory, 'artifact')  # to store run outputs when no --out given
cs_log_dir = os.path.join(init_working_directory, 'log')  # to store logs of tool usage

# orbital solution validity window (kyr, present = 0)
ORBITAL_WINDOW = (-1000.0, 0.0)
