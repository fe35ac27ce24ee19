"""
k-fold benchmark protocols and the modality ablation.

zero     train on full sequences, score on full sequences
varying  train on all five truncations, score at full length and at each
         checkpoint (time until maneuver)
both     run both and report the accuracy drop: zero-time accuracy minus
         the varying-time model's 1-second checkpoint accuracy
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ArgumentError
from ..features import KEEP_FRAMES, MANEUVERS
from ..dataset import stratified_kfold
from ..models import FLstmConfig, FTfConfig
from .baselines import chance_accuracy, prior_accuracy
from .metrics import Metrics, evaluate
from .train import TrainConfig, mask_name, parse_mask, train
from .tum import CheckpointAccuracy, TUM_RULES, checkpoint_correctness, \
    tum_from_matrix

log = logging.getLogger(__name__)

PROTOCOLS = ('zero', 'varying', 'both')


@dataclass
class FoldResult:
    fold: int
    n_test: int
    metrics: Metrics
    # varying-time model only
    correct: np.ndarray = None
    varying_metrics: Metrics = None

    def to_dict(self):
        out = {'fold': self.fold, 'n_test': self.n_test,
               'accuracy': self.metrics.accuracy,
               'macro_f1': self.metrics.macro_f1}
        if self.varying_metrics is not None:
            out['varying_accuracy'] = self.varying_metrics.accuracy
        return out


@dataclass
class BenchmarkReport:
    model: str
    protocol: str
    k: int
    seed: int
    mask: tuple
    folds: list
    metrics: Metrics
    mean_accuracy: float
    std_accuracy: float
    mean_f1: float
    std_f1: float
    chance: float
    prior: float
    checkpoint: CheckpointAccuracy = None
    mean_tum: float = None
    tum_rule: str = 'stable'
    accuracy_drop: float = None
    extra: dict = field(default_factory=dict)

    @property
    def accuracy(self):
        return self.metrics.accuracy

    def to_dict(self):
        out = {
            'model': self.model, 'protocol': self.protocol, 'k': self.k,
            'seed': self.seed, 'mask': mask_name(self.mask),
            'classes': list(MANEUVERS),
            'accuracy': self.metrics.accuracy,
            'mean_accuracy': self.mean_accuracy,
            'std_accuracy': self.std_accuracy,
            'mean_f1': self.mean_f1, 'std_f1': self.std_f1,
            'macro_f1': self.metrics.macro_f1,
            'per_class_accuracy': self.metrics.per_class_accuracy,
            'per_class_f1': self.metrics.per_class_f1,
            'confusion': self.metrics.confusion.tolist(),
            'baselines': {'chance': self.chance, 'prior': self.prior},
            'folds': [f.to_dict() for f in self.folds],
        }
        if self.checkpoint is not None:
            out['checkpoint_accuracy'] = self.checkpoint.to_dict()
            out['mean_tum'] = self.mean_tum
            out['tum_rule'] = self.tum_rule
        if self.accuracy_drop is not None:
            out['accuracy_drop'] = self.accuracy_drop
        return out


def _run_fold(job):
    """One fold end to end. Pure function of its arguments, so folds give
    the same result in any order or process."""
    (i, train_set, test_set, model_config, config, protocol, mask) = job
    config = config.replace(seed=config.seed + i, modality_mask=mask)
    result = {'fold': i}
    if protocol in ('zero', 'both'):
        params, _ = train(train_set, model_config, config)
        result['metrics'] = evaluate(params, test_set, mask)
    if protocol in ('varying', 'both'):
        params, _ = train(train_set, model_config,
                          config.replace(varying_time=True))
        vm = evaluate(params, test_set, mask)
        result['varying_metrics'] = vm
        result['correct'] = checkpoint_correctness(params, test_set, mask)
    log.info("fold %d done", i)
    return result


def _pooled(metrics_list):
    return Metrics.from_confusion(sum(m.confusion for m in metrics_list))


def run_benchmark(manifest, model_config, protocol='zero', k=10, seed=1,
                  modality_mask='all', train_config=None, tum_rule='stable',
                  jobs=None, chance_draws=1000):
    """Train and score k models on a stratified k-fold split."""
    if protocol not in PROTOCOLS:
        raise ArgumentError("protocol must be one of %s, got %r"
                            % ("|".join(PROTOCOLS), protocol))
    if tum_rule not in TUM_RULES:
        raise ArgumentError("unknown TUM rule %r" % tum_rule)
    try:
        mask = parse_mask(modality_mask)
    except ValueError as ex:
        raise ArgumentError(str(ex))
    manifest.require_nonempty()
    train_config = train_config or TrainConfig()
    split = stratified_kfold(manifest, k, seed)

    jobs_list = [(i, manifest.subset(tr), manifest.subset(te).sequences,
                  model_config, train_config, protocol, mask)
                 for i, (tr, te) in enumerate(split)]
    workers = k if jobs is None else max(1, int(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=min(workers, k)) as pool:
            results = list(pool.map(_run_fold, jobs_list))
    else:
        results = [_run_fold(job) for job in jobs_list]
    results.sort(key=lambda r: r['fold'])

    folds = []
    for r, job in zip(results, jobs_list):
        primary = r.get('metrics') or r['varying_metrics']
        folds.append(FoldResult(r['fold'], len(job[2]), primary,
                                r.get('correct'), r.get('varying_metrics')))

    acc = np.array([f.metrics.accuracy for f in folds])
    f1 = np.array([f.metrics.macro_f1 for f in folds])
    report = BenchmarkReport(
        model=model_config.arch, protocol=protocol, k=k, seed=seed,
        mask=mask, folds=folds,
        metrics=_pooled([f.metrics for f in folds]),
        mean_accuracy=float(acc.mean()), std_accuracy=float(acc.std()),
        mean_f1=float(f1.mean()), std_f1=float(f1.std()),
        chance=chance_accuracy(manifest.labels, chance_draws, seed),
        prior=prior_accuracy(manifest.labels), tum_rule=tum_rule)

    if protocol in ('varying', 'both'):
        tum = tum_from_matrix(np.concatenate([f.correct for f in folds]),
                              tum_rule)
        report.checkpoint = tum.checkpoint
        report.mean_tum = tum.mean_tum
    if protocol == 'both':
        varying = _pooled([f.varying_metrics for f in folds])
        report.extra['varying_accuracy'] = varying.accuracy
        report.accuracy_drop = (report.metrics.accuracy -
                                report.checkpoint.by_keep[KEEP_FRAMES[-1]])
    log.info("%s %s benchmark: accuracy %.4f (mean %.4f +- %.4f), "
             "macro F1 %.4f", report.model, protocol, report.accuracy,
             report.mean_accuracy, report.std_accuracy, report.mean_f1)
    return report


ABLATION_ROWS = (
    ('F-LSTM-A', 'flstm', 'interior'),
    ('F-LSTM', 'flstm', 'all'),
    ('F-TF-A', 'ftf', 'interior'),
    ('F-TF', 'ftf', 'all'),
)


@dataclass
class AblationTable:
    # row name -> BenchmarkReport
    reports: dict

    def rows(self):
        """(name, per-class accuracies, overall accuracy) per row."""
        return [(name, r.metrics.per_class_accuracy, r.accuracy)
                for name, r in self.reports.items()]

    def to_dict(self):
        return {'classes': list(MANEUVERS),
                'rows': [{'name': name, 'per_class_accuracy': per_class,
                          'accuracy': overall}
                         for name, per_class, overall in self.rows()]}


def run_ablation(manifest, k=10, seed=1, train_config=None,
                 flstm_config=None, ftf_config=None, jobs=None,
                 models=('flstm', 'ftf')):
    """Interior-only against full modalities for each model (zero-time)."""
    configs = {'flstm': flstm_config or FLstmConfig(),
               'ftf': ftf_config or FTfConfig()}
    reports = {}
    for name, arch, mask in ABLATION_ROWS:
        if arch not in models:
            continue
        reports[name] = run_benchmark(manifest, configs[arch], 'zero', k,
                                      seed, mask, train_config, jobs=jobs)
    return AblationTable(reports)
