#! /usr/bin/env python

# Standard Imports
from optparse import OptionParser

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *
from coresmc.kits.climate import CLIMATE_MODELS
from coresmc.kits.manifest import RunManifest
from coresmc.kits.observation import load_core
from coresmc.kits.params import N_PARAMS
from coresmc.kits.run_config import RunConfig
from coresmc.kits.simulator import simulate_core, write_simulation
from coresmc.kits.smc2 import EvidenceEstimate, Smc2Sampler
from coresmc.kits import summaries

# Logging
log = logging.getLogger('coresmc.cli')

COMMANDS = ('simulate', 'infer', 'compare', 'ablation', 'summarize')
POSTERIOR_CHECKS_SUITE = 'coresmc.infer.checks'
ABLATION_HEADERS = ('draw', 'log_Z_forced', 'log_Z_unforced', 'log_bf')
MANIFEST_NAME = 'manifest.json'
BAYES_FACTOR_NAME = 'bayes_factor.json'

USAGE = """%prog <command> [options] [args]

commands:
  simulate  --config CONFIG [--out DIR] [--seed N] [--model forced|unforced]
  infer     CORE --config CONFIG [--out DIR] [--seed N] [--model forced|unforced] [--workers N]
  compare   EVIDENCE_A EVIDENCE_B [--out DIR]
  ablation  CORE CHRONOLOGY_CSV --config CONFIG --k K [--out DIR] [--seed N] [--workers N]
  summarize POSTERIOR_CSV CHRONOLOGY_CSV [--out DIR] [--mass MASS]"""


class UsageError(utils.ConfigError):
    pass


def build_parser():
    parser = OptionParser(usage=USAGE, version=coresmc_version)
    parser.add_option('--log-level', '--ll', dest='log_level', help='Log Level (0=info, 1=debug, 2=trace)')
    parser.add_option('--log-file', '--lf', dest='log_file', help='Log file', default=None)
    parser.add_option('-c', '--config', dest='config', help='run config json')
    parser.add_option('-o', '--out', dest='out', help='output directory', default=None)
    parser.add_option('-s', '--seed', dest='seed', type='int', help='overrides the config seed')
    parser.add_option('-m', '--model', dest='model', choices=sorted(CLIMATE_MODELS), help='model variant')
    parser.add_option('-w', '--workers', dest='workers', type='int', help='worker threads (results do not change)')
    parser.add_option('--n-theta', dest='n_theta', type='int', help='overrides smc.n_theta')
    parser.add_option('--n-x', dest='n_x', type='int', help='overrides smc.n_x')
    parser.add_option('-k', '--k', dest='k', type='int', default=4, help='chronology draws for ablation')
    parser.add_option('--mass', dest='mass', type='float', default=None, help='hdr mass for summarize')
    return parser


def load_config(options):
    config = RunConfig.from_file(options.config)
    config.set_value('smc', 'seed', options.seed)
    config.set_value('smc', 'workers', options.workers)
    config.set_value('smc', 'n_theta', options.n_theta)
    config.set_value('smc', 'n_x', options.n_x)
    config.set_value('model', 'variant', options.model)
    return config


def output_dir(options, command):
    out = options.out or os.path.join(cs_artifact_dir, command)
    utils.check_makedir(out)
    return out


# ============================================ commands ============================================

def cmd_simulate(options, args, manifest):
    config = load_config(options)
    config.set_value('simulation', 'seed', options.seed)
    config.set_value('simulation', 'variant', options.model)
    manifest.config = config.export_to_json_data()
    manifest.config_hash = config.config_hash()
    manifest.seed = config['simulation']['seed']
    out = output_dir(options, 'simulate')
    record, truth = simulate_core(config.simulation_config(), config.forcing())
    paths = write_simulation(record, truth, out, core_name=config['io']['core'], truth_name=config['io']['truth'],
                             params_name=config['io']['true_params'])
    for name, path in zip(('core', 'truth', 'true_params'), paths):
        manifest.add_output(name, path)
    log.info('simulation written: out={} M={}'.format(out, record.M))
    return out


def structural_checks(result, prior):
    """junit data for the structural checks of one inference run"""
    weights = result.weights
    checks = {
        'chronology_monotone': (result.monotone_paths(), 'an emitted chronology is not strictly increasing'),
        'theta_weights_normalized': (bool(np.all(np.isfinite(weights)) and abs(weights.sum() - 1.0) < 1e-12),
                                     'weights sum to {!r}'.format(float(weights.sum()))),
        'evidence_telescoping': (result.evidence.telescoping_error() < 1e-10,
                                 'telescoping error {!r}'.format(result.evidence.telescoping_error())),
        'parameter_count': (len(prior.names) + len(prior.fixed_values) == N_PARAMS,
                            '{} free + {} pinned parameters'.format(len(prior.names), len(prior.fixed_values))),
    }
    return {POSTERIOR_CHECKS_SUITE: {
        name: {'class': 'structural', 'fail': None if ok else message} for name, (ok, message) in checks.items()
    }}


def cmd_infer(options, args, manifest):
    if len(args) != 1:
        raise UsageError('infer takes exactly one core file')
    config = load_config(options)
    manifest.config = config.export_to_json_data()
    manifest.config_hash = config.config_hash()
    manifest.seed = config.seed
    manifest.add_input('core', args[0])
    out = output_dir(options, 'infer')

    record = config.prepare_record(load_core(args[0]))
    prior = config.prior()
    sampler = Smc2Sampler(record, prior, config.forcing(), config.filter_settings(), config.smc_settings(),
                          config.integrator(), variant=config.variant)
    manifest.workers = utils.resolve_worker_count(config.workers)

    progress_log = logging.getLogger('coresmc.kits.smc2')
    handler = utils.add_file_log_handler(progress_log, config.output_path(out, 'progress'), logging.INFO,
                                         format=utils.LOG_FORMAT_PROGRESS)
    try:
        result = sampler.run()
    finally:
        utils.remove_log_handler(progress_log, handler)

    outputs = {
        'posterior': utils.write_csv(config.output_path(out, 'posterior'), result.posterior_rows(),
                                     headers=result.posterior_headers()),
        'chronology': utils.write_csv(config.output_path(out, 'chronology'), result.chronology_rows(),
                                      headers=('particle', 'slice', 'T_kyr', 'x1', 'x2', 'weight')),
        'evidence': result.evidence.write(config.output_path(out, 'evidence')),
        'checks': utils.create_junit_results(structural_checks(result, prior),
                                             output=config.output_path(out, 'checks')),
        'progress': config.output_path(out, 'progress'),
    }
    for name, path in outputs.items():
        manifest.add_output(name, path)
    log.info('inference written: out={} log_Z={:.6f} se={:.4f}'.format(
        out, result.evidence.log_z, result.evidence.log_z_se))
    return out


def cmd_compare(options, args, manifest):
    if len(args) != 2:
        raise UsageError('compare takes two evidence files')
    for name, path in zip(('first', 'second'), args):
        manifest.add_input(name, path)
    ev1, ev2 = EvidenceEstimate.load(args[0]), EvidenceEstimate.load(args[1])
    bf = summaries.bayes_factor(ev1, ev2)
    out = output_dir(options, 'compare')
    path = utils.create_json_report(summaries.bayes_factor_report(bf, ev1, ev2),
                                    os.path.join(out, BAYES_FACTOR_NAME))
    manifest.add_output('bayes_factor', path)
    log.info('bayes factor: log_bf={:.6f} se={:.4f} 2lnB={:.3f} band="{}"'.format(
        bf.log_bf, bf.log_bf_se, bf.two_ln_b, bf.band))
    return out


def cmd_ablation(options, args, manifest):
    if len(args) != 2:
        raise UsageError('ablation takes a core file and a joint chronology csv')
    if options.k < 2:
        raise UsageError('ablation needs at least two chronology draws: k={}'.format(options.k))
    config = load_config(options)
    manifest.config = config.export_to_json_data()
    manifest.config_hash = config.config_hash()
    manifest.seed = config.seed
    manifest.add_input('core', args[0])
    manifest.add_input('chronology', args[1])
    out = output_dir(options, 'ablation')

    record = config.prepare_record(load_core(args[0]))
    paths, weights = summaries.read_chronology_csv(args[1])
    times = paths['T']
    if times.shape[1] != record.M:
        raise utils.InputConsistencyError('chronology has {} slices, core has {}'.format(times.shape[1], record.M))
    draws = summaries.sample_chronologies(times, weights, options.k, utils.stream(config.seed, utils.PURPOSE_SUMMARY))
    forcing = config.forcing()

    rows = []
    for i, chronology in enumerate(draws):
        evidence = {}
        for variant in ('forced', 'unforced'):
            sampler = Smc2Sampler(record, config.prior(variant, fixed_chronology=True), forcing,
                                  config.filter_settings(), config.smc_settings(extract_paths=False),
                                  config.integrator(), variant=variant, chronology=chronology)
            evidence[variant] = sampler.run().evidence
            path = evidence[variant].write(os.path.join(out, 'draw_{}_{}.json'.format(i + 1, variant)))
            manifest.add_output('draw_{}_{}'.format(i + 1, variant), path)
        bf = summaries.bayes_factor(evidence['forced'], evidence['unforced'])
        rows.append({'draw': i + 1, 'log_Z_forced': bf.log_z1, 'log_Z_unforced': bf.log_z2, 'log_bf': bf.log_bf})
        log.info('ablation draw: draw={} log_bf={:.6f} se={:.4f}'.format(i + 1, bf.log_bf, bf.log_bf_se))

    path = utils.write_csv(config.output_path(out, 'ablation'), rows, headers=ABLATION_HEADERS)
    manifest.add_output('ablation', path)
    return out


def cmd_summarize(options, args, manifest):
    if len(args) != 2:
        raise UsageError('summarize takes a posterior csv and a chronology csv')
    config = RunConfig.from_file(options.config) if options.config else RunConfig()
    mass = options.mass or config['io']['hdr_mass']
    manifest.add_input('posterior', args[0])
    manifest.add_input('chronology', args[1])
    out = output_dir(options, 'summarize')

    posterior = summaries.PosteriorSample.from_csv(args[0], args[1])
    hdr_rows = summaries.hdr_table(posterior, mass=mass)
    sd, mean_sd = summaries.age_sd_profile(posterior.paths['T'], posterior.path_weights())
    report = {
        'age_sd': sd,
        'mean_age_sd': mean_sd,
        'hdr_mass': mass,
        'parameter_intervals': summaries.marginal_intervals(posterior.theta, posterior.weights, posterior.names,
                                                            mass=mass),
    }
    outputs = {
        'hdr': utils.write_csv(config.output_path(out, 'hdr'), hdr_rows, headers=summaries.HDR_HEADERS),
        'means': utils.write_csv(config.output_path(out, 'means'), summaries.posterior_means(posterior),
                                 headers=summaries.MEANS_HEADERS),
        'age_sd': utils.create_json_report(report, config.output_path(out, 'age_sd')),
    }
    for name, path in outputs.items():
        manifest.add_output(name, path)
    log.info('summaries written: out={} mean_age_sd={:.3f}'.format(out, mean_sd))
    return out


COMMAND_FUNCTIONS = {
    'simulate': cmd_simulate,
    'infer': cmd_infer,
    'compare': cmd_compare,
    'ablation': cmd_ablation,
    'summarize': cmd_summarize,
}


def main(args=None):
    parser = build_parser()
    options, args = parser.parse_args(sys.argv[1:] if args is None else args)

    utils.logging_setup(log_level=options.log_level, log_file=options.log_file)

    if not args:
        parser.error('No command specified, one of: {}'.format(', '.join(COMMANDS)))
    command, args = args[0], args[1:]
    if command not in COMMAND_FUNCTIONS:
        parser.error('Command does not exist: {}'.format(command))
    if command in ('simulate', 'infer', 'ablation') and not options.config:
        parser.error('{} needs --config'.format(command))

    manifest = RunManifest(command, argv=[command] + list(args))
    out = None
    try:
        out = COMMAND_FUNCTIONS[command](options, args, manifest)
    except UsageError as exc:
        parser.error(str(exc))
    except utils.CoreSmcException as exc:
        log.error('command failed: command={} error={} exc={}'.format(command, exc.__class__.__name__, exc))
        manifest.finish('error', exc)
        # without --out the record of the failure lands in the command's default artifact dir
        path = os.path.join(output_dir(options, command), MANIFEST_NAME)
        manifest.write(path)
        log.info('error manifest written: path={}'.format(path))
        return utils.exit_code_for(exc)
    manifest.finish('ok')
    manifest.write(os.path.join(out, MANIFEST_NAME))
    return utils.EXIT_OK


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
