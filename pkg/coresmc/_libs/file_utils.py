#! /usr/bin/env python

# Standard Imports
import io
import json
import shutil
import hashlib
import tempfile

# Lib Imports
from .csv_utils import DictReader, DictWriter

# coresmc Imports
from coresmc import *

# logging
log = logging.getLogger('coresmc.utils.file')


def clean_paths(*paths, **kwargs):
    """Clean the paths by deleting them, can handle files or directories"""
    log_as_trace = kwargs.pop('log_as_trace', False)
    msg = 'Cleaning paths: count={} paths={}'.format(len(paths), list(paths))
    if log_as_trace:
        log.trace(msg)
    else:
        log.info(msg)
    rc = 0
    for path in paths:
        if not path or not os.path.exists(path):
            log.trace('Skip cleaning path: path={}'.format(path))
            continue
        try:
            if os.path.isfile(path):
                os.unlink(path)
            else:
                shutil.rmtree(path)
        except Exception as exc:
            log.error('Exception in cleanup: path={} exc={}'.format(path, exc))
            rc = 1
    return rc


def check_makedir(path, mode=0o777):
    """Makes a directory. Must be given a path to a directory, not a file."""
    if path and not os.path.exists(path):
        try:
            os.makedirs(path, mode)
        except FileExistsError:
            log.debug('makedir exception, (ignored): path={} already exists'.format(path))
    return path


def get_tmp_dir(use_logging=True):
    """gets a fresh temporary directory on local machine"""
    tmp_dir = tempfile.mkdtemp(prefix='coresmc_')
    if use_logging:
        log.debug('Temporary Directory Created: tempdir=({})'.format(tmp_dir))
    return tmp_dir


def write_file(file_name, contents=None, mode='w', atomic=False):
    """
    create, or append to a file, optionally with content, return file_name
    :param file_name:
    :param contents: a string or a list of strings
    :param mode:
    :param atomic: write to a temporary sibling and rename over the target (final artifacts)
    :return: the filename that was written
    """
    check_makedir(os.path.dirname(file_name))
    target = file_name + '.partial' if atomic else file_name
    with open(target, mode, encoding='utf-8', newline='') as f:
        if contents:
            if isinstance(contents, list):
                f.writelines(contents)
            else:
                f.write(str(contents))
    if atomic:
        os.replace(target, file_name)
    return file_name


def read_file(file_name, raise_on_error=True, as_str=False, strip_newlines=False):
    """
    Read a file: by default read the lines f.readlines() or f.read() if as_str=True
    :param file_name: path of the file
    :param raise_on_error: raise exception on read error
    :param as_str: return the contents as a string
    :param strip_newlines: return the contents as a list with no newlines: [l.strip('\n') for l in lines]
    :return: a list of lines or string
    """
    try:
        with open(file_name, encoding='utf-8') as f:
            content = f.read() if as_str else f.readlines()
    except Exception as exc:
        if raise_on_error:
            raise
        log.warn('Exception reading file, ignoring, and return empty: exc={}'.format(exc))
        return '' if as_str else []
    if not as_str and strip_newlines:
        content = [l.strip('\n') for l in content]
    return content


def write_csv(file_name, contents, headers=None, atomic=True, **kwargs):
    """
    writes a csv file using DictWriter and returns the filename
    :param file_name: path of the file
    :param contents: rowdicts list
    :param headers: specify headers, or take from contents
    :param atomic: write-then-rename
    :return: the filename that was written
    """
    headers = list(headers or contents[0].keys())
    log.trace('writing csv file: path={} headers={} rows={}'.format(file_name, headers, len(contents)))
    buf = io.StringIO()
    writer = DictWriter(buf, headers, **kwargs)
    writer.writeheader()
    writer.writerows(contents)
    return write_file(file_name, buf.getvalue(), atomic=atomic)


def read_csv(file_name, return_headers=False, return_reader=False):
    """
    reads a csv file using DictReader and returns a rowdicts list ('#' comment lines are skipped)
    :param file_name: path of the file
    :param return_headers: return value becomes (rows, headers)
    :param return_reader: return value becomes (rows, reader), the reader knows comments and line numbers
    :return: rows read from csv
    """
    log.trace('reading csv file: path={}'.format(file_name))
    reader = DictReader(read_file(file_name))
    rows = [row for row in reader]
    if return_reader:
        return rows, reader
    if return_headers:
        return rows, reader.fieldnames
    return rows


def read_json(file_name, json_kwargs=None, **kwargs):
    """
    reads a json file using read_file and creates a python object using json module
    :param file_name: path of the file
    :param json_kwargs:
    :param kwargs:
    :return: python object (dict)
    """
    log.trace('reading json file: path={}'.format(file_name))
    json_kwargs = json_kwargs or {}
    contents = read_file(file_name, as_str=True, **kwargs)
    return json.loads(contents, **json_kwargs)


def write_json(file_name, python_object, json_kwargs=None, atomic=True):
    """
    writes a python object as json into a json file using json module and write_file method
    :param file_name: path of the file
    :param python_object: python object (dict)
    :param json_kwargs:
    :param atomic: write-then-rename
    :return: path to file
    """
    log.trace('writing json file: path={}'.format(file_name))
    json_kwargs = json_kwargs or {'sort_keys': True, 'indent': 4}
    return write_file(file_name, json.dumps(python_object, **json_kwargs), atomic=atomic)


def hash_file(file_name, algorithm='sha256'):
    """hex digest of a file's bytes"""
    digest = hashlib.new(algorithm)
    with open(file_name, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def hash_text(text, algorithm='sha256'):
    """hex digest of a text (utf-8)"""
    return hashlib.new(algorithm, text.encode('utf-8')).hexdigest()


__all__ = [
    'clean_paths', 'check_makedir', 'get_tmp_dir', 'write_file', 'read_file',
    'write_csv', 'read_csv', 'read_json', 'write_json', 'hash_file', 'hash_text',
]
