"""Semi-supervised graph domain adaptation on reconstructed topology.

Pipeline: random-walk co-occurrence -> positive PMI structure -> shared
two-layer graph-convolutional encoder with per-node source shifts trained
adversarially against a domain discriminator, plus posterior-score-weighted
pseudo-labels on both domains.
"""
__version__ = "0.1.0"

from . import backend
from .errors import (ConfigError, DataError, DegenerateInputError, DimensionError,
                     NumericalError, StaleCacheError, UsageError)
from .graph_io import (Graph, DomainPair, SyntheticConfig, generate_pair, load_graph,
                       split_labels, union_align)
from .metrics import micro_macro_f1
from .model import (EncoderParams, HeadParams, ShiftParams, init_params,
                    load_checkpoint, save_checkpoint)
from .ppmi import PpmiMatrix, ppmi, propagation, reconstruct
from .trainer import FitResult, TrainConfig, fit, source_only_config, variant_name
from .walks import WalkConfig, cooccurrence, sample_walks

__all__ = [
    "__version__", "backend",
    "ConfigError", "DataError", "DegenerateInputError", "DimensionError",
    "NumericalError", "StaleCacheError", "UsageError",
    "Graph", "DomainPair", "SyntheticConfig", "generate_pair", "load_graph",
    "split_labels", "union_align",
    "micro_macro_f1",
    "EncoderParams", "HeadParams", "ShiftParams", "init_params",
    "load_checkpoint", "save_checkpoint",
    "PpmiMatrix", "ppmi", "propagation", "reconstruct",
    "FitResult", "TrainConfig", "fit", "source_only_config", "variant_name",
    "WalkConfig", "cooccurrence", "sample_walks",
]
