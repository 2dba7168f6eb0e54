#! /usr/bin/env python

# Standard Imports
import csv

# coresmc Imports
from coresmc import *

# logging
log = logging.getLogger('coresmc.utils.csv')

# float formatting used by every csv we write, keeps reruns byte-identical
FLOAT_FORMAT = '{!r}'


def _stringify(s):
    if s is None:
        return ''
    if isinstance(s, float):
        return FLOAT_FORMAT.format(float(s))
    return str(s)


class DictWriter(csv.DictWriter):
    """csv.DictWriter that formats floats with repr (shortest round-tripping form)"""

    def __init__(self, csvfile, fieldnames, restval='', extrasaction='raise', dialect='excel', **kwds):
        kwds.setdefault('lineterminator', '\n')
        csv.DictWriter.__init__(self, csvfile, fieldnames, restval, extrasaction, dialect, **kwds)

    def writerow(self, rowdict):
        return csv.DictWriter.writerow(self, {k: _stringify(v) for k, v in rowdict.items()})


class CommentedLines(object):
    """
    wraps an iterable of text lines, skipping blank lines and lines starting with the comment prefix.
    comment lines are collected (without the prefix) and the physical line number of the last
    yielded line is kept so parse errors can point at the right place.
    """

    def __init__(self, lines, comment_prefix='#'):
        self._lines = lines
        self.comment_prefix = comment_prefix
        self.comments = []
        self.line_nums = []

    def __iter__(self):
        for line_num, line in enumerate(self._lines, 1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith(self.comment_prefix):
                self.comments.append(stripped[len(self.comment_prefix):].strip())
                continue
            self.line_nums.append(line_num)
            yield line


class DictReader(csv.DictReader):
    """csv.DictReader over CommentedLines, exposes the physical line number of the current row"""

    def __init__(self, lines, fieldnames=None, comment_prefix='#', **kwds):
        self.commented = CommentedLines(lines, comment_prefix)
        csv.DictReader.__init__(self, self.commented, fieldnames, **kwds)

    @property
    def physical_line_num(self):
        return self.commented.line_nums[-1] if self.commented.line_nums else 0

    @property
    def comments(self):
        return self.commented.comments


__all__ = ['DictReader', 'DictWriter', 'CommentedLines']
