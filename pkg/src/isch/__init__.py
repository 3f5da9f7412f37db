"""Binary hashing for high-dimensional vectors with Hamming retrieval.

Trains a linear sign-threshold hash whose Hamming neighborhoods track the
inner products of (never explicitly computed) sparse codes over a learned
overcomplete dictionary. Ships the training pipeline, LSH and ITQ baselines,
packed-code Hamming search, evaluation metrics and bit-exact file formats.
"""

from .codes import BinaryCodeSet
from .dictionary import Dictionary, hierarchical_dictionary, kmeans, zero_center
from .encoder import HashModel, encode_batch, train_isch, train_itq, train_lsh
from .params import DictConfig, ModelParams
from .rotation import (
    RotationModel,
    assemble_rotation,
    optimize_block_rotation,
    quantization_error,
)
from .search import (
    RetrievalResult,
    hamming,
    mean_average_precision,
    precision_at_k,
    top_k,
)
from .spectral import (
    SingularPair,
    SpectralModel,
    assemble_W,
    exact_spectral,
    f_lambda,
    sample_columns,
    subproblem_pairs,
)

__all__ = [
    "BinaryCodeSet",
    "DictConfig",
    "Dictionary",
    "HashModel",
    "ModelParams",
    "RetrievalResult",
    "RotationModel",
    "SingularPair",
    "SpectralModel",
    "assemble_W",
    "assemble_rotation",
    "encode_batch",
    "exact_spectral",
    "f_lambda",
    "hamming",
    "hierarchical_dictionary",
    "kmeans",
    "mean_average_precision",
    "optimize_block_rotation",
    "precision_at_k",
    "quantization_error",
    "sample_columns",
    "subproblem_pairs",
    "top_k",
    "train_isch",
    "train_itq",
    "train_lsh",
    "zero_center",
]

__version__ = "0.1.0"
