"""
@file cli.py

@brief
mfusion command line: gaze extraction, dataset building, training,
evaluation and the benchmark protocols.

Every command reads its settings from the packaged defaults, then the
config file, then its flags. Exit status is 0 on success, 1 on bad input
and 2 on runtime failure.
"""

import os
import sys
import json
import logging
import argparse
import dataclasses

import yaml

from . import config
from . import util
from .exceptions import ArgumentError, FusionError
from .geometry import LMSettings, ModelFace, extract_gaze_sequence, \
    read_landmarks, write_gaze
from .dataset import DatasetManifest, SynthConfig, generate_synthetic, \
    ingest_real, load_layout
from .models import config_for, load_checkpoint, save_checkpoint
from .evaluation import TrainConfig, PROTOCOLS, TUM_RULES, compute_tum, \
    evaluate, mask_name, parse_mask, run_ablation, run_benchmark, train
from .evaluation import report

log = logging.getLogger(__name__)

# Nested config keys whose raw YAML/flag values need a type
CONVERTERS = {
    'geometry:plane_z': float,
    'geometry:plane_scale': float,
    'geometry:nominal_depth': float,
    'synth:n_sequences': int,
    'synth:seed': int,
    'train:epochs': int,
    'train:seed': int,
    'train:learning_rate': float,
    'train:modality_mask': parse_mask,
    'benchmark:k': int,
    'benchmark:seed': int,
    'benchmark:jobs': int,
    'benchmark:chance_draws': int,
}


class ArgumentParser(argparse.ArgumentParser):
    """ argparse exits 2 on usage errors; mfusion reserves 2 for runtime
    failures, so usage errors exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _require_file(path, what):
    if not os.path.isfile(path):
        raise ArgumentError("%s %s does not exist" % (what, path))


def _emit(args, obj, text):
    if args.json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(text)


def _train_config(conf):
    d = {k: conf['numeric'][k] for k in ('beta1', 'beta2', 'eps')
         if k in conf.get('numeric', {})}
    d.update(conf['train'])
    return TrainConfig.from_dict(d)


def _model_config(conf, arch):
    if arch not in ('flstm', 'ftf'):
        raise ArgumentError("model must be flstm or ftf, got %r" % arch)
    return config_for(arch, conf.get(arch))


def cmd_extract_gaze(args, conf):
    _require_file(args.landmarks, "landmark file")
    geo = conf['geometry']
    header, frames, skipped = read_landmarks(args.landmarks)
    overrides = {k: getattr(args, k) for k in ('fx', 'fy', 'cx', 'cy')
                 if getattr(args, k) is not None}
    intrinsics = dataclasses.replace(header.intrinsics, **overrides)
    face = ModelFace.load(args.face_model or geo.get('face_model'))
    gazes = extract_gaze_sequence(
        frames, face, intrinsics, geo['plane_z'], geo['plane_scale'],
        geo['nominal_depth'], LMSettings.from_config(geo))
    write_gaze(args.out, [(f.frame, g) for f, g in zip(frames, gazes)])
    failed = sum(not g.valid for g in gazes)
    summary = {'frames': len(gazes), 'failed': failed,
               'skipped_lines': skipped, 'out': args.out}
    _emit(args, summary, "%d frames, %d failed, %d lines skipped -> %s"
          % (len(gazes), failed, skipped, args.out))


def cmd_synth(args, conf):
    synth = SynthConfig.from_dict(conf['synth'])
    manifest = generate_synthetic(synth)
    manifest.save(args.out)
    _emit(args, manifest.meta(), "%d synthetic sequences, class counts %s "
          "-> %s" % (len(manifest), manifest.class_counts, args.out))


def cmd_encode(args, conf):
    if args.layout is not None:
        _require_file(args.layout, "layout descriptor")
    manifest = ingest_real(args.root, load_layout(args.layout))
    manifest.save(args.out)
    _emit(args, manifest.meta(), "%d sequences, class counts %s -> %s"
          % (len(manifest), manifest.class_counts, args.out))


def cmd_train(args, conf):
    _require_file(args.data, "dataset")
    model_config = _model_config(conf, conf['benchmark']['model'])
    train_config = _train_config(conf)
    manifest = DatasetManifest.load(args.data)
    manifest.require_nonempty()
    params, history = train(manifest, model_config, train_config)
    save_checkpoint(args.out, params, {
        'modality_mask': mask_name(train_config.modality_mask),
        'varying_time': train_config.varying_time,
        'epochs_run': len(history.train_loss),
        'best_epoch': history.best_epoch,
    })
    final = history.train_loss[-1] if history.train_loss else None
    out = {'arch': params.arch, 'num_params': params.num_params,
           'history': history.to_dict(), 'out': args.out}
    _emit(args, out, "%s, %d parameters, %d epochs, final loss %s -> %s"
          % (params.arch, params.num_params, len(history.train_loss),
             '-' if final is None else '%.4f' % final, args.out))


def cmd_eval(args, conf):
    _require_file(args.checkpoint, "checkpoint")
    _require_file(args.data, "dataset")
    params = load_checkpoint(args.checkpoint)
    manifest = DatasetManifest.load(args.data)
    manifest.require_nonempty()
    mask = conf['train']['modality_mask']
    metrics = evaluate(params, manifest.sequences, mask)
    out = {'arch': params.arch, 'mask': mask_name(mask),
           'metrics': metrics.to_dict()}
    text = report.format_metrics(metrics)
    if args.tum:
        rule = conf['benchmark']['tum_rule']
        tum = compute_tum(params, manifest.sequences, rule, mask)
        out['tum'] = dict(tum.to_dict(), rule=rule)
        text += "\n" + "\n".join(
            "  %d s before: %.1f %%" % (s, 100 * a)
            for s, a in tum.checkpoint.rows())
        text += "\n  mean TUM (%s) %.2f s" % (rule, tum.mean_tum)
    _emit(args, out, text)


def cmd_benchmark(args, conf):
    _require_file(args.data, "dataset")
    bench = conf['benchmark']
    if bench['protocol'] not in PROTOCOLS:
        raise ArgumentError("protocol must be one of %s"
                            % "|".join(PROTOCOLS))
    if bench['tum_rule'] not in TUM_RULES:
        raise ArgumentError("tum rule must be one of %s"
                            % "|".join(TUM_RULES))
    if (args.csv or args.svg) and bench['protocol'] == 'zero':
        raise ArgumentError("--csv and --svg need the varying or both "
                            "protocol")
    model_config = _model_config(conf, bench['model'])
    train_config = _train_config(conf).replace(seed=bench['seed'])
    manifest = DatasetManifest.load(args.data)
    result = run_benchmark(manifest, model_config, bench['protocol'],
                           bench['k'], bench['seed'],
                           train_config.modality_mask, train_config,
                           bench['tum_rule'], _jobs(args, bench),
                           bench['chance_draws'])
    if args.out:
        report.write_json(args.out, result)
    if args.csv:
        report.write_checkpoint_csv(args.csv, result.checkpoint)
    if args.svg:
        report.write_profile_svg(args.svg, result.checkpoint,
                                 "%s, %d folds" % (result.model, result.k))
    _emit(args, result.to_dict(), report.format_report(result))


def cmd_ablate(args, conf):
    _require_file(args.data, "dataset")
    bench = conf['benchmark']
    models = args.models.split(',') if args.models else ['flstm', 'ftf']
    for arch in models:
        _model_config(conf, arch)
    manifest = DatasetManifest.load(args.data)
    train_config = _train_config(conf).replace(seed=bench['seed'])
    table = run_ablation(manifest, bench['k'], bench['seed'], train_config,
                         _model_config(conf, 'flstm'),
                         _model_config(conf, 'ftf'), _jobs(args, bench),
                         tuple(models))
    if args.out:
        report.write_json(args.out, table)
    _emit(args, table.to_dict(), report.format_ablation(table))


def _jobs(args, bench):
    jobs = args.jobs if args.jobs is not None else bench.get('jobs')
    if jobs is not None and jobs < 1:
        raise ArgumentError("--jobs must be >= 1")
    return jobs


def _add_data(sub):
    sub.add_argument('data', help="dataset file written by synth or encode")


def _add_mask(sub):
    sub.add_argument('--mask', dest='train:modality_mask',
                     choices=['all', 'interior'],
                     help="zero the exterior streams with 'interior'")


def _add_training(sub):
    sub.add_argument('--epochs', dest='train:epochs', type=int)
    sub.add_argument('--batch-size', dest='train:batch_size', type=int)
    sub.add_argument('--lr', dest='train:learning_rate', type=float)


def build_parser():
    parser = ArgumentParser(
        prog='mfusion',
        description="Driver maneuver prediction from fused in-cabin and "
                    "exterior features")
    parser.add_argument('--conf', help="config file (YAML or JSON) "
                        "overriding the packaged defaults")
    parser.add_argument('--json', action='store_true',
                        help="print machine-readable JSON to stdout")
    parser.add_argument('--jobs', type=int,
                        help="worker processes for fold training "
                             "(default: one per fold)")
    parser.add_argument('--dbgconf', action='store_true',
                        help="print effective configuration and exit.")
    parser.add_argument('--debug', action='store_true',
                        help="enable debug mode.")
    parser.add_argument('-V', '--version', action='store_true',
                        help="print version and exit")
    parser.add_argument('--versions', action='store_true',
                        help="print version of mfusion and all dependencies")
    subs = parser.add_subparsers(dest='command', metavar='command')

    sub = subs.add_parser('extract-gaze',
                          help="landmark JSON Lines to gaze vectors")
    sub.add_argument('landmarks')
    sub.add_argument('--face-model', help="3D face model JSON")
    for name in ('fx', 'fy', 'cx', 'cy'):
        sub.add_argument('--' + name, type=float,
                         help="override the header's %s" % name)
    sub.add_argument('--out', required=True)
    sub.set_defaults(func=cmd_extract_gaze)

    sub = subs.add_parser('synth', help="generate a synthetic dataset")
    sub.add_argument('--seed', dest='synth:seed', type=int)
    sub.add_argument('--n', dest='synth:n_sequences', type=int)
    sub.add_argument('--gaze-strength', dest='synth:gaze_signal_strength',
                     type=float)
    sub.add_argument('--exterior-strength',
                     dest='synth:exterior_signal_strength', type=float)
    sub.add_argument('--noise', dest='synth:noise_sigma', type=float)
    sub.add_argument('--out', required=True)
    sub.set_defaults(func=cmd_synth)

    sub = subs.add_parser('encode',
                          help="build a dataset from per-video artifacts")
    sub.add_argument('root')
    sub.add_argument('--layout', help="layout descriptor JSON")
    sub.add_argument('--out', required=True)
    sub.set_defaults(func=cmd_encode)

    sub = subs.add_parser('train', help="train one model on a dataset")
    _add_data(sub)
    sub.add_argument('--model', dest='benchmark:model',
                     choices=['flstm', 'ftf'])
    sub.add_argument('--seed', dest='train:seed', type=int)
    sub.add_argument('--varying', dest='train:varying_time',
                     action='store_const', const=True,
                     help="train on all five truncations")
    _add_mask(sub)
    _add_training(sub)
    sub.add_argument('--out', required=True, help="checkpoint path")
    sub.set_defaults(func=cmd_train)

    sub = subs.add_parser('eval', help="score a checkpoint on a dataset")
    sub.add_argument('checkpoint')
    _add_data(sub)
    _add_mask(sub)
    sub.add_argument('--tum', action='store_true',
                     help="also report checkpoint accuracy and TUM")
    sub.add_argument('--tum-rule', dest='benchmark:tum_rule',
                     choices=TUM_RULES)
    sub.set_defaults(func=cmd_eval)

    sub = subs.add_parser('benchmark', help="k-fold benchmark")
    _add_data(sub)
    sub.add_argument('--protocol', dest='benchmark:protocol',
                     choices=PROTOCOLS)
    sub.add_argument('--model', dest='benchmark:model',
                     choices=['flstm', 'ftf'])
    sub.add_argument('--k', dest='benchmark:k', type=int)
    sub.add_argument('--seed', dest='benchmark:seed', type=int)
    sub.add_argument('--tum-rule', dest='benchmark:tum_rule',
                     choices=TUM_RULES)
    _add_mask(sub)
    _add_training(sub)
    sub.add_argument('--out', help="report JSON path")
    sub.add_argument('--csv', help="checkpoint accuracy CSV path")
    sub.add_argument('--svg', help="checkpoint accuracy chart path")
    sub.set_defaults(func=cmd_benchmark)

    sub = subs.add_parser('ablate',
                          help="interior-only against full modalities")
    _add_data(sub)
    sub.add_argument('--k', dest='benchmark:k', type=int)
    sub.add_argument('--seed', dest='benchmark:seed', type=int)
    sub.add_argument('--models', help="comma separated, default flstm,ftf")
    _add_training(sub)
    sub.add_argument('--out', help="table JSON path")
    sub.set_defaults(func=cmd_ablate)
    return parser


def flag_overrides(args):
    """ Flags whose dest is a config key path, as a nested dict."""
    overrides = {}
    for dest, value in vars(args).items():
        if ':' not in dest or value is None:
            continue
        section, key = dest.split(':', 1)
        overrides.setdefault(section, {})[key] = value
    return overrides


def run(argv=None):
    """ Run one command; returns the process exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.version:
        from .version import version
        print(version)
        return 0

    if args.versions:
        for name, ver in util.versions_report():
            print('{}\t{}'.format(name, ver))
        return 0

    try:
        util.initlog()
        if args.debug:
            logging.getLogger().setLevel(logging.DEBUG)
        conf = config.load('mfusion.yaml', args.conf)
        config.merge(conf, flag_overrides(args))
        if args.dbgconf:
            print(yaml.dump(conf, default_flow_style=False))
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            log.error("no command given")
            return 1
        conf = config.process(conf, CONVERTERS)
        log.debug("running %s", args.command)
        args.func(args, conf)
    except FusionError as e:
        log.error("%s", e)
        if args.debug:
            raise
        return e.exit_code
    except Exception as e:
        log.critical(e)
        if args.debug:
            raise
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
