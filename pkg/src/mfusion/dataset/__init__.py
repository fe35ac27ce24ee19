from .manifest import DatasetManifest, REFERENCE_CLASS_COUNTS, SOURCES
from .synthetic import (SynthConfig, generate_synthetic, adjacent_occupancy,
                        occupancy_stump_accuracy)
from .ingest import ingest_real, load_layout, DEFAULT_LAYOUT
from .folds import FoldSplit, stratified_kfold

__all__ = [
    'DatasetManifest', 'REFERENCE_CLASS_COUNTS', 'SOURCES', 'SynthConfig',
    'generate_synthetic', 'adjacent_occupancy', 'occupancy_stump_accuracy',
    'ingest_real', 'load_layout', 'DEFAULT_LAYOUT', 'FoldSplit',
    'stratified_kfold',
]
