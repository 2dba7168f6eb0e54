#! /usr/bin/env python

# Standard Imports
import datetime

# External Imports
import pytz

# coresmc Imports
from coresmc import *

# logging
log = logging.getLogger('coresmc.utils.datetime')

utc_timezone = pytz.utc


def apply_timezone_to_dt(dt, timezone=utc_timezone):
    return timezone.localize(dt)


def utc_now():
    """timezone aware current time in UTC"""
    return apply_timezone_to_dt(datetime.datetime.utcnow())


def utc_timestamp(dt=None):
    """ISO-8601 text for a datetime (now by default), always in UTC"""
    dt = dt or utc_now()
    if dt.tzinfo is None:
        dt = apply_timezone_to_dt(dt)
    return dt.astimezone(utc_timezone).isoformat()


def seconds_between(dt_start, dt_end):
    return (dt_end - dt_start).total_seconds()


__all__ = ['apply_timezone_to_dt', 'utc_now', 'utc_timestamp', 'seconds_between']
