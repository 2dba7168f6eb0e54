#! /usr/bin/env python

# coresmc Imports
from coresmc import *

# Logging
log = logging.getLogger('coresmc.kits.manifest')


class RunManifest(object):
    """
    what a command ran on and produced: command, config and input hashes, seed, version, UTC timestamps,
    output paths and the host it ran on
    """

    def __init__(self, command, config=None, seed=None, argv=None):
        self.command = command
        self.argv = list(argv or [])
        self.config = config.export_to_json_data() if config is not None else None
        self.config_hash = config.config_hash() if config is not None else None
        self.seed = seed
        self.inputs = {}
        self.outputs = {}
        self.workers = None
        self.status = 'running'
        self.error = None
        self.started = utils.utc_now()
        self.finished = None

    def add_input(self, name, path):
        if not os.path.isfile(path):
            raise utils.ConfigError('input file not found: name={} path={}'.format(name, path))
        self.inputs[name] = {'path': os.path.abspath(path), 'sha256': utils.hash_file(path)}

    def add_output(self, name, path):
        self.outputs[name] = os.path.abspath(path)

    def finish(self, status='ok', error=None):
        self.status = status
        self.error = None if error is None else str(error)
        self.finished = utils.utc_now()

    def to_dict(self):
        return {
            'command': self.command,
            'argv': self.argv,
            'config': self.config,
            'config_hash': self.config_hash,
            'inputs': self.inputs,
            'outputs': self.outputs,
            'seed': self.seed,
            'workers': self.workers,
            'version': coresmc_version,
            'status': self.status,
            'error': self.error,
            'started': utils.utc_timestamp(self.started),
            'finished': utils.utc_timestamp(self.finished) if self.finished else None,
            'elapsed_sec': utils.seconds_between(self.started, self.finished) if self.finished else None,
            'resources': utils.resource_snapshot(),
        }

    def write(self, path):
        log.debug('writing manifest: path={} status={}'.format(path, self.status))
        return utils.create_json_report(self.to_dict(), path)
