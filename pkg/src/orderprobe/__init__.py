"""Probing toolkit for word-order learning in sequence encoders.

Builds word-reordering-detection datasets, trains GRU / self-attention /
directional self-attention encoders with a pointer-style position detector,
and probes frozen representations, all on a self-contained float64
autodiff substrate.
"""

from .detector import (
    DetectorOutput,
    DetectorParams,
    decode,
    insert_distribution,
    orig_distribution,
    popped_embedding,
    wrd_loss,
)
from .encoders import EncoderConfig, EncoderOutput, encode, init_encoder_params, positional_encoding
from .estimators import FrozenProbe, ProxyPretrainer, ReorderingDetector
from .evaluation import ProbeReport, distance_buckets, emit_report, score
from .gradcheck import grad_check
from .optim import LrSchedule, OptimizerState, adam_step, schedule_rate
from .rng import Rng
from .tensor import Tensor, masked_softmax, matmul, no_grad
from .textdata import (
    Vocabulary,
    WrdInstance,
    build_vocab,
    generate_dataset,
    generate_instance,
    verify_instance,
)

__version__ = "0.1.0"

__all__ = [
    "DetectorOutput",
    "DetectorParams",
    "EncoderConfig",
    "EncoderOutput",
    "FrozenProbe",
    "LrSchedule",
    "OptimizerState",
    "ProbeReport",
    "ProxyPretrainer",
    "ReorderingDetector",
    "Rng",
    "Tensor",
    "Vocabulary",
    "WrdInstance",
    "adam_step",
    "build_vocab",
    "decode",
    "distance_buckets",
    "emit_report",
    "encode",
    "generate_dataset",
    "generate_instance",
    "grad_check",
    "init_encoder_params",
    "insert_distribution",
    "masked_softmax",
    "matmul",
    "no_grad",
    "orig_distribution",
    "popped_embedding",
    "positional_encoding",
    "schedule_rate",
    "score",
    "verify_instance",
    "wrd_loss",
]
