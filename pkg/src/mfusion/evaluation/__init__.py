from .train import TrainConfig, TrainHistory, train, apply_mask, \
    parse_mask, mask_name, expand_varying
from .metrics import Metrics, evaluate, score, confusion_matrix, predict_all
from .tum import CheckpointAccuracy, TumResult, compute_tum, \
    tum_from_correctness, TUM_RULES
from .baselines import chance_accuracy, prior_accuracy
from .benchmark import BenchmarkReport, AblationTable, run_benchmark, \
    run_ablation, PROTOCOLS

__all__ = [
    'TrainConfig', 'TrainHistory', 'train', 'apply_mask', 'parse_mask',
    'mask_name', 'expand_varying', 'Metrics', 'evaluate', 'score',
    'confusion_matrix', 'predict_all', 'CheckpointAccuracy', 'TumResult',
    'compute_tum', 'tum_from_correctness', 'TUM_RULES', 'chance_accuracy',
    'prior_accuracy', 'BenchmarkReport', 'AblationTable', 'run_benchmark',
    'run_ablation', 'PROTOCOLS',
]
