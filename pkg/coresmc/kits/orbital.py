#! /usr/bin/env python

# Standard Imports
from collections import namedtuple

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *

# Logging
log = logging.getLogger('coresmc.kits.orbital')

# the packaged truncated trigonometric series
DEFAULT_COEFFICIENT_FILE = os.path.join(cs_data_dir, 'berger78_terms.txt')
COMPONENTS = ('precession', 'obliquity', 'eccentricity')
TABULATED_HEADERS = ('t_kyr', 'prec', 'coprec', 'obliquity')

# window slack, so grid end points computed with floating point steps are accepted
_WINDOW_EPS = 1e-9

ForcingWeights = namedtuple('ForcingWeights', 'gamma_p gamma_c gamma_e')
NormalizationConstants = namedtuple(
    'NormalizationConstants', 'mean_p sd_p mean_c sd_c mean_e sd_e window sample_step')

UNFORCED = ForcingWeights(0.0, 0.0, 0.0)


def validate_weights(weights):
    if not all(np.isfinite(w) for w in weights):
        raise utils.ParameterError('forcing weights must be finite: weights={}'.format(tuple(weights)))
    return weights


def validate_constants(constants):
    for name in ('sd_p', 'sd_c', 'sd_e'):
        if not getattr(constants, name) > 0:
            raise utils.ConfigError('normalization sd must be positive: {}={}'.format(name, getattr(constants, name)))
    t_start, t_end = constants.window
    if not t_start < t_end <= 0:
        raise utils.ConfigError('normalization window must satisfy t_start < t_end <= 0: window={}'.format(
            constants.window))
    return constants


def check_window(t, window=ORBITAL_WINDOW):
    """raise OrbitalDomainError if any time lies outside the validity window"""
    t = np.asarray(t, dtype=float)
    if t.size and (np.nanmin(t) < window[0] - _WINDOW_EPS or np.nanmax(t) > window[1] + _WINDOW_EPS):
        raise utils.OrbitalDomainError('time outside the orbital validity window [{}, {}] kyr: t_range=({}, {})'.format(
            window[0], window[1], np.nanmin(t), np.nanmax(t)))


class OrbitalSeries(object):
    """
    truncated trigonometric expansion of the orbital elements, time in kyr (present = 0, past negative).

    climatic precession  e sin(w) = sum a sin(f t + p)   over precession terms
    coprecession         e cos(w) = sum a cos(f t + p)   over the same terms
    obliquity                     = sum a cos(f t + p)   (a zero-frequency term carries the mean)
    eccentricity         e        = |sum a exp(i (f t + p))|
    """

    def __init__(self, precession_terms, obliquity_terms, eccentricity_terms, name='custom', window=ORBITAL_WINDOW):
        self.name = name
        self.window = tuple(window)
        self.terms = {}
        for component, terms in zip(COMPONENTS, (precession_terms, obliquity_terms, eccentricity_terms)):
            terms = np.atleast_2d(np.asarray(terms, dtype=float))
            if terms.size == 0:
                raise utils.ConfigError('orbital series needs at least one term: component={}'.format(component))
            if terms.shape[1] != 3:
                raise utils.ConfigError('orbital terms are (amplitude, frequency, phase): component={}'.format(component))
            if not np.all(np.isfinite(terms)) or np.any(terms[:, 1] < 0):
                raise utils.ConfigError('orbital frequencies must be finite and non-negative: component={}'.format(
                    component))
            self.terms[component] = terms

    @property
    def precession_terms(self):
        return self.terms['precession']

    @property
    def obliquity_terms(self):
        return self.terms['obliquity']

    @property
    def eccentricity_terms(self):
        return self.terms['eccentricity']

    @classmethod
    def from_file(cls, path=None, n_terms=None):
        """
        load a coefficient table, one `component amplitude frequency phase` term per line, '#' comments
        :param path: the table (default: the packaged truncated series)
        :param n_terms: keep only the n largest-|amplitude| terms of every component
        :return: OrbitalSeries
        """
        path = path or DEFAULT_COEFFICIENT_FILE
        terms = {component: [] for component in COMPONENTS}
        for line_num, line in enumerate(utils.read_file(path), 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 4 or fields[0] not in terms:
                raise utils.CoreParseError('bad orbital term line: {!r}'.format(line), path, line_num)
            try:
                terms[fields[0]].append([float(v) for v in fields[1:]])
            except ValueError:
                raise utils.CoreParseError('non-numeric orbital term: {!r}'.format(line), path, line_num)
        if n_terms:
            for component, rows in terms.items():
                rows.sort(key=lambda row: -abs(row[0]))
                terms[component] = rows[:int(n_terms)]
        log.debug('loaded orbital series: path={} counts={}'.format(
            path, {k: len(v) for k, v in terms.items()}))
        return cls(terms['precession'], terms['obliquity'], terms['eccentricity'],
                   name=os.path.basename(path))

    @staticmethod
    def _phases(terms, t):
        return np.multiply.outer(t, terms[:, 1]) + terms[:, 2]

    def raw_orbital(self, t):
        """
        climatic precession, coprecession and obliquity at time(s) t
        :param t: time in kyr, scalar or array, inside the validity window
        :return: (e_sin_w, e_cos_w, obliquity), each shaped like t
        """
        check_window(t, self.window)
        t = np.asarray(t, dtype=float)
        prec = self.terms['precession']
        phase = self._phases(prec, t)
        e_sin_w = np.sin(phase) @ prec[:, 0]
        e_cos_w = np.cos(phase) @ prec[:, 0]
        obl = self.terms['obliquity']
        obliquity = np.cos(self._phases(obl, t)) @ obl[:, 0]
        return e_sin_w, e_cos_w, obliquity

    def eccentricity(self, t):
        check_window(t, self.window)
        t = np.asarray(t, dtype=float)
        ecc = self.terms['eccentricity']
        phase = self._phases(ecc, t)
        return np.hypot(np.sin(phase) @ ecc[:, 0], np.cos(phase) @ ecc[:, 0])

    def components(self, t):
        """raw (precession, coprecession, obliquity) stacked as an array of shape (3,) + t.shape"""
        return np.stack(self.raw_orbital(t))


class TabulatedSeries(object):
    """orbital components given as a table (t_kyr, prec, coprec, obliquity), linearly interpolated"""

    def __init__(self, t, prec, coprec, obliquity, name='tabulated'):
        self.name = name
        self.t = np.asarray(t, dtype=float)
        self.values = np.stack([np.asarray(v, dtype=float) for v in (prec, coprec, obliquity)])
        if len(self.t) < 2 or np.any(np.diff(self.t) <= 0):
            raise utils.ConfigError('tabulated forcing needs at least two strictly increasing times')
        self.window = (max(ORBITAL_WINDOW[0], self.t[0]), min(ORBITAL_WINDOW[1], self.t[-1]))

    @classmethod
    def from_csv(cls, path):
        rows, reader = utils.read_csv(path, return_reader=True)
        if not rows or tuple(reader.fieldnames or ()) != TABULATED_HEADERS:
            raise utils.CoreParseError('tabulated forcing header must be {}'.format(','.join(TABULATED_HEADERS)),
                                       path, 1)
        try:
            columns = {h: [float(row[h]) for row in rows] for h in TABULATED_HEADERS}
        except (TypeError, ValueError) as exc:
            raise utils.CoreParseError('non-numeric tabulated forcing value: {}'.format(exc), path)
        log.debug('loaded tabulated forcing: path={} rows={}'.format(path, len(rows)))
        return cls(columns['t_kyr'], columns['prec'], columns['coprec'], columns['obliquity'],
                   name=os.path.basename(path))

    def raw_orbital(self, t):
        check_window(t, self.window)
        return tuple(np.interp(t, self.t, values) for values in self.values)

    def components(self, t):
        return np.stack(self.raw_orbital(t))


def normalize_series(series, window=ORBITAL_WINDOW, step=1.0):
    """
    sample mean and sd (ddof=0) of each component over a regular grid
    :param series: OrbitalSeries or TabulatedSeries
    :param window: (t_start, t_end) kyr
    :param step: grid spacing kyr
    :return: NormalizationConstants
    """
    t_start, t_end = float(window[0]), float(window[1])
    if not step > 0:
        raise utils.ConfigError('normalization step must be positive: step={}'.format(step))
    n_points = int(np.floor((t_end - t_start) / step + 1e-9)) + 1 if t_end > t_start else 0
    if n_points < 2:
        raise utils.ConfigError('normalization grid needs at least 2 points: window={} step={}'.format(window, step))
    grid = t_start + step * np.arange(n_points)
    values = series.components(grid)
    means = values.mean(axis=1)
    sds = values.std(axis=1)
    for name, sd in zip(('precession', 'coprecession', 'obliquity'), sds):
        if not sd > 1e-12 * max(1.0, np.max(np.abs(values))):
            raise utils.ConfigError('orbital component is constant over the window: component={}'.format(name))
    constants = NormalizationConstants(means[0], sds[0], means[1], sds[1], means[2], sds[2],
                                       (t_start, t_end), float(step))
    log.debug('normalization constants: {}'.format(constants_to_dict(constants)))
    return validate_constants(constants)


def constants_to_dict(constants):
    data = constants._asdict()
    data['window'] = list(constants.window)
    return {k: float(v) if not isinstance(v, list) else v for k, v in data.items()}


def normalized_components(t, series, constants):
    """(Pi_P, Pi_C, E) at t, each standardised with the constants"""
    raw = series.components(t)
    means = np.array([constants.mean_p, constants.mean_c, constants.mean_e])
    sds = np.array([constants.sd_p, constants.sd_c, constants.sd_e])
    shape = (3,) + (1,) * (raw.ndim - 1)
    return (raw - means.reshape(shape)) / sds.reshape(shape)


def forcing(t, weights, series, constants):
    """
    F(t; gamma) = gamma_P Pi_P(t) + gamma_C Pi_C(t) + gamma_E E(t), evaluated exactly from the series
    :param t: time(s) kyr
    :param weights: ForcingWeights
    :param series: OrbitalSeries or TabulatedSeries
    :param constants: NormalizationConstants
    :return: forcing value(s) shaped like t
    """
    comps = normalized_components(t, series, constants)
    return np.tensordot(np.asarray(weights, dtype=float), comps, axes=1)


class ForcingCurve(object):
    """forcing for one weight vector, precomputed on a grid and linearly interpolated"""

    def __init__(self, grid, values, weights):
        self.grid = grid
        self.values = values
        self.weights = weights
        self.is_zero = not np.any(values)

    def __call__(self, t):
        if self.is_zero:
            return np.zeros(np.shape(t))
        return np.interp(t, self.grid, self.values)


class OrbitalForcing(object):
    """
    the forcing context shared by every particle: the series, its normalization and a cached grid of the
    normalized components at the integration resolution. immutable after construction.
    """

    def __init__(self, series, constants=None, grid_step=0.2, window=None):
        self.series = series
        self.constants = constants or normalize_series(series)
        self.window = tuple(window or series.window)
        n_points = int(np.ceil((self.window[1] - self.window[0]) / grid_step)) + 1
        self.grid = np.linspace(self.window[0], self.window[1], n_points)
        self.grid.setflags(write=False)
        self.grid_components = normalized_components(self.grid, series, self.constants)
        self.grid_components.setflags(write=False)
        log.debug('orbital forcing grid cached: series={} points={} window={}'.format(
            series.name, n_points, self.window))

    def curve(self, weights):
        weights = validate_weights(ForcingWeights(*weights))
        values = np.tensordot(np.asarray(weights, dtype=float), self.grid_components, axes=1)
        return ForcingCurve(self.grid, values, weights)

    def __call__(self, t, weights):
        """forcing interpolated from the cached grid"""
        check_window(t, self.window)
        return self.curve(weights)(t)

    def exact(self, t, weights):
        return forcing(t, weights, self.series, self.constants)

    def metadata(self):
        return {
            'series': self.series.name,
            'normalization': constants_to_dict(self.constants),
            'grid_step': float(self.grid[1] - self.grid[0]),
            'window': list(self.window),
        }


def build_forcing(coefficient_file=None, tabulated_file=None, n_terms=None, window=ORBITAL_WINDOW,
                  step=1.0, grid_step=0.2):
    """OrbitalForcing from a coefficient table (default) or a tabulated forcing csv"""
    if tabulated_file:
        series = TabulatedSeries.from_csv(tabulated_file)
    else:
        series = OrbitalSeries.from_file(coefficient_file, n_terms=n_terms)
    constants = normalize_series(series, window=window, step=step)
    return OrbitalForcing(series, constants, grid_step=grid_step)
