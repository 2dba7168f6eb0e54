#! /usr/bin/env python

# Standard Imports
import io
import json
from collections import namedtuple

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *

# Logging
log = logging.getLogger('coresmc.kits.observation')

CORE_HEADERS = ('depth_m', 'd18O')
TIEPOINT_TAG = 'tiepoint'
NAME_TAG = 'name:'
DEPTH_MATCH_TOL = 1e-6  # m
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)

CalibrationParams = namedtuple('CalibrationParams', 'd18o_offset d18o_scale sigma_y')
# slice_index is 0-based, deepest slice first
TiePoint = namedtuple('TiePoint', 'slice_index age_mean age_sd')


def validate_calibration(params, allow_zero_noise=False):
    if not all(np.isfinite(v) for v in params):
        raise utils.ParameterError('calibration parameters must be finite: params={}'.format(params))
    if params.sigma_y < 0 or (params.sigma_y == 0 and not allow_zero_noise):
        raise utils.ParameterError('measurement sd must be positive: sigma_y={}'.format(params.sigma_y))
    return params


def gaussian_logpdf(x, mean, sd):
    return -0.5 * ((x - mean) / sd) ** 2 - np.log(sd) - _HALF_LOG_2PI


def obs_loglik(y, x1, calib):
    """log N(y; D + C x1, sigma_y^2), vectorised over x1"""
    return gaussian_logpdf(y, calib.d18o_offset + calib.d18o_scale * np.asarray(x1, dtype=float), calib.sigma_y)


def tiepoint_loglik(T, age_mean, age_sd):
    """log N(-T; age_mean, age_sd^2)"""
    if not age_sd > 0:
        raise utils.ParameterError('tie point sd must be positive: age_sd={}'.format(age_sd))
    return gaussian_logpdf(-np.asarray(T, dtype=float), age_mean, age_sd)


class CoreRecord(object):
    """
    an immutable sediment core: slice depths (deepest first) with their d18O values and tie points
    """

    def __init__(self, depths, d18o, tie_points=None, name='core'):
        self.name = name
        self.depths = np.array(depths, dtype=float)
        self.d18o = np.array(d18o, dtype=float)
        self.tie_points = tuple(sorted((TiePoint(int(tp[0]), float(tp[1]), float(tp[2]))
                                        for tp in (tie_points or ())), key=lambda tp: tp.slice_index))
        self.depths.setflags(write=False)
        self.d18o.setflags(write=False)
        self._validate()

    def _validate(self):
        if self.depths.ndim != 1 or len(self.depths) == 0:
            raise utils.ConfigError('core record needs at least one slice: name={}'.format(self.name))
        if self.depths.shape != self.d18o.shape:
            raise utils.InputConsistencyError('depth and d18O lengths differ: {} != {}'.format(
                len(self.depths), len(self.d18o)))
        if not np.all(np.isfinite(self.depths)) or not np.all(np.isfinite(self.d18o)):
            raise utils.ConfigError('core record values must be finite: name={}'.format(self.name))
        if np.any(np.diff(self.depths) >= 0):
            raise utils.OrderingError('core depths must be strictly decreasing, deepest first: name={}'.format(
                self.name))
        seen = set()
        for tp in self.tie_points:
            if not 0 <= tp.slice_index < len(self.depths):
                raise utils.ConfigError('tie point slice out of range: slice_index={}'.format(tp.slice_index))
            if not tp.age_sd > 0:
                raise utils.ConfigError('tie point sd must be positive: tie_point={}'.format(tp))
            if tp.slice_index in seen:
                raise utils.ConfigError('more than one tie point on a slice: slice_index={}'.format(tp.slice_index))
            seen.add(tp.slice_index)

    @property
    def M(self):
        return len(self.depths)

    def __len__(self):
        return len(self.depths)

    @property
    def tie_point_map(self):
        return {tp.slice_index: tp for tp in self.tie_points}

    def with_tie_point(self, tie_point):
        """copy of the record with one more tie point"""
        return CoreRecord(self.depths, self.d18o, self.tie_points + (TiePoint(*tie_point),), name=self.name)

    def with_core_top(self, age_kyr=0.0, sd_kyr=2.0):
        """copy with a tie point on the shallowest slice"""
        if self.M - 1 in self.tie_point_map:
            return self
        return self.with_tie_point((self.M - 1, age_kyr, sd_kyr))

    def to_dict(self):
        return {
            'name': self.name,
            'depth_m': self.depths.tolist(),
            'd18O': self.d18o.tolist(),
            'tie_points': [list(tp) for tp in self.tie_points],
        }

    def __eq__(self, other):
        return (isinstance(other, CoreRecord) and np.array_equal(self.depths, other.depths)
                and np.array_equal(self.d18o, other.d18o) and self.tie_points == other.tie_points)

    def __repr__(self):
        return '<CoreRecord name={} M={} tie_points={}>'.format(self.name, self.M, len(self.tie_points))


def record_hash(record):
    """sha256 of the record content (name excluded), identical records hash identically"""
    data = record.to_dict()
    data.pop('name')
    return utils.hash_text(json.dumps(data, sort_keys=True))


def _parse_tiepoint(comment, path):
    fields = comment.split()
    if len(fields) != 4:
        raise utils.CoreParseError('tie point line must be `#tiepoint depth_m age_kyr sd_kyr`: {!r}'.format(
            comment), path)
    try:
        return tuple(float(v) for v in fields[1:])
    except ValueError:
        raise utils.CoreParseError('non-numeric tie point: {!r}'.format(comment), path)


def load_core(path, name=None):
    """
    read a core csv (`depth_m,d18O`, '#tiepoint depth_m age_kyr sd_kyr' comment lines).
    rows are re-ordered deepest first when given shallow first, slices deeper than the deepest
    tie point are dropped.
    :param path: csv path
    :param name: record name (default: a `# name:` comment, else the file stem)
    :return: CoreRecord
    """
    if not os.path.isfile(path):
        raise utils.CoreParseError('core file not found', path)
    reader = utils.DictReader(utils.read_file(path))
    if reader.fieldnames is None or not set(CORE_HEADERS).issubset(reader.fieldnames):
        raise utils.CoreParseError('missing columns, header must contain {}'.format(','.join(CORE_HEADERS)), path, 1)
    depths, values, seen = [], [], {}
    for row in reader:
        try:
            depth = float(row['depth_m'])
            values.append(float(row['d18O']))
        except (TypeError, ValueError):
            raise utils.CoreParseError('non-numeric field: row={}'.format(dict(row)), path, reader.physical_line_num)
        if depth in seen:
            raise utils.CoreParseError('duplicate depth: depth_m={} first_line={}'.format(depth, seen[depth]), path,
                                       reader.physical_line_num)
        seen[depth] = reader.physical_line_num
        depths.append(depth)
    if not depths:
        raise utils.CoreParseError('empty data section', path, reader.physical_line_num or 1)
    depths = np.array(depths)
    values = np.array(values)

    steps = np.diff(depths)
    if len(steps) and np.all(steps > 0):
        log.info('core given shallow first, re-ordering deepest first: path={}'.format(path))
        depths, values = depths[::-1], values[::-1]
    elif not np.all(steps < 0):
        bad = int(np.flatnonzero(np.sign(steps) != np.sign(steps[0]))[0]) + 1
        raise utils.CoreParseError('depths are not monotone', path, reader.commented.line_nums[bad + 1])

    record_name = name
    tie_depths = []
    for comment in reader.comments:
        if comment.startswith(TIEPOINT_TAG):
            tie_depths.append(_parse_tiepoint(comment, path))
        elif comment.startswith(NAME_TAG) and record_name is None:
            record_name = comment[len(NAME_TAG):].strip()
    record_name = record_name or os.path.splitext(os.path.basename(path))[0]

    tie_points = []
    for depth, age_mean, age_sd in tie_depths:
        matches = np.flatnonzero(np.abs(depths - depth) <= DEPTH_MATCH_TOL)
        if not len(matches):
            raise utils.CoreParseError('tie point depth matches no slice: depth_m={}'.format(depth), path)
        tie_points.append([int(matches[0]), age_mean, age_sd])

    if tie_points:
        first = min(tp[0] for tp in tie_points)
        if first > 0:
            log.info('dropping slices deeper than the deepest tie point: path={} dropped={} kept={}'.format(
                path, first, len(depths) - first))
            depths, values = depths[first:], values[first:]
            for tp in tie_points:
                tp[0] -= first
    else:
        log.warn('core has no tie point: path={}'.format(path))

    try:
        record = CoreRecord(depths, values, tie_points, name=record_name)
    except utils.CoreSmcException as exc:
        raise utils.CoreParseError(str(exc), path)
    log.debug('loaded core: path={} name={} M={} tie_points={}'.format(path, record.name, record.M,
                                                                      len(record.tie_points)))
    return record


def write_core(record, path):
    """write a record in the format load_core reads back, atomically"""
    buf = io.StringIO()
    buf.write('# {} {}\n'.format(NAME_TAG, record.name))
    for tp in record.tie_points:
        buf.write('#{} {!r} {!r} {!r}\n'.format(TIEPOINT_TAG, float(record.depths[tp.slice_index]),
                                                tp.age_mean, tp.age_sd))
    writer = utils.DictWriter(buf, CORE_HEADERS)
    writer.writeheader()
    for depth, value in zip(record.depths, record.d18o):
        writer.writerow({'depth_m': float(depth), 'd18O': float(value)})
    log.debug('writing core: path={} M={}'.format(path, record.M))
    return utils.write_file(path, buf.getvalue(), atomic=True)
