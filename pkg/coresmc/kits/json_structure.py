#  Standard Imports
import json
import copy

# coresmc Imports
from coresmc import *

log = logging.getLogger('coresmc.kits.json_structure')


class JsonStructureException(utils.ConfigError):
    pass


class LoadJsonDataError(JsonStructureException):
    pass


class MissingKeyError(LoadJsonDataError):
    pass


class WrongTypeError(LoadJsonDataError):
    pass


def merge_defaults(data, defaults):
    """
    fill data in place from defaults: nested dicts are merged key by key, lists and scalars only
    fill keys that are absent
    """
    for key, default in defaults.items():
        if isinstance(default, dict):
            data.setdefault(key, {})
            if isinstance(data[key], dict):
                merge_defaults(data[key], default)
        else:
            data.setdefault(key, copy.deepcopy(default))
    return data


def type_matches(value, required):
    if isinstance(required, (list, dict)):
        return isinstance(value, type(required))
    if required is float:
        # json has a single number type
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if required is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, required)


def check_required(data, required, path=''):
    """
    raise MissingKeyError / WrongTypeError where data does not follow the required mock structure.
    a dict recurses, a non-empty list gives the allowed item types.
    """
    for key, expected in required.items():
        where = '.'.join(filter(None, [path, key]))
        if key not in data:
            raise MissingKeyError('missing key: {}'.format(where))
        value = data[key]
        if not type_matches(value, expected):
            raise WrongTypeError('wrong type: key={} expected={} got={}'.format(
                where, getattr(expected, '__name__', type(expected).__name__), type(value).__name__))
        if isinstance(expected, dict) and expected:
            check_required(value, expected, path=where)
        elif isinstance(expected, list) and expected:
            for index, item in enumerate(value):
                if not any(type_matches(item, e) for e in expected):
                    raise WrongTypeError('wrong list item type: key={} index={} item={!r}'.format(where, index, item))


class JsonStructure(object):
    """
    a json object with a required shape and defaults, for config files with nested sections.

    subclasses describe themselves with three class attributes:
        _js_required_structure  mock of the json tree holding types, {'root': {'smc': {'n_theta': int}}}
        _js_default_data        mock of the json tree holding default values, merged under the given data
        _js_properties          attribute name -> key path, {'n_theta': ['smc', 'n_theta']}
    """
    _js_required_structure = {
        'root': {}
    }

    _js_default_data = {
        'root': {}
    }

    _js_properties = {

    }

    def __init__(self, json_data=None):
        self.__json_data = {}
        self.load_data(json_data)

    def load_data(self, json_data):
        """merge defaults into a copy of json_data, check it against the required structure and keep it"""
        data = copy.deepcopy(json_data) if json_data is not None else {}
        if not isinstance(data, dict):
            raise LoadJsonDataError('json root must be an object: got={}'.format(type(data).__name__))
        try:
            merge_defaults(data, self._js_default_data['root'])
            check_required(data, self._js_required_structure['root'])
        except LoadJsonDataError as exc:
            log.error('error loading data: class={} exc={}'.format(self.__class__.__name__, exc))
            raise
        self.__json_data = data

    def _get_property(self, key):
        value = self.__json_data
        for k in self._js_properties[key]:
            if not isinstance(value, dict) or k not in value:
                return None
            value = value[k]
        return value

    def _get_key(self, key):
        if key in self._js_properties:
            return self._get_property(key)
        return self.__json_data[key]

    def export_to_json_string(self, **kwargs):
        """canonical json text, sorted keys so equal data gives equal text (and equal hashes)"""
        kwargs.setdefault('sort_keys', True)
        return json.dumps(self.__json_data, **kwargs)

    def export_to_json_data(self):
        """a deep copy of the underlying json object"""
        return copy.deepcopy(self.__json_data)

    def get(self, key, default=None):
        try:
            return self._get_key(key)
        except KeyError:
            return default

    def get_fields(self):
        """sorted top level keys of the underlying json"""
        return sorted(self.__json_data)

    def __eq__(self, other):
        if isinstance(other, JsonStructure):
            return self.__json_data == other.__json_data
        return NotImplemented

    def __repr__(self):
        return '<{}: {}>'.format(self.__class__.__name__, self.export_to_json_string())

    def __getitem__(self, item):
        """js[item], the live section so js['smc']['seed'] = 3 edits the structure"""
        return self._get_key(item)

    def __getattr__(self, item):
        if item.startswith('_'):
            raise AttributeError(item)
        try:
            return self._get_key(item)
        except KeyError:
            raise AttributeError(item)
