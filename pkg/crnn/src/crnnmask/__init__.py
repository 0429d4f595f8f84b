"""Two-stream CRNN soft-mask estimator for robot ego-speech removal."""

from .data import Triplet, load_split, load_triplet, load_wav, read_manifest
from .inference import infer, infer_arrays
from .loss import compressed_mse
from .model import MaskNet, parameter_count
from .spec import ConvLayerSpec, CrnnSpec, StftSetup, tiny, tiny_stft
from .training import TrainConfig, load_checkpoint, save_checkpoint, train

__version__ = "0.1.0"

__all__ = [
    "ConvLayerSpec",
    "CrnnSpec",
    "MaskNet",
    "StftSetup",
    "TrainConfig",
    "Triplet",
    "compressed_mse",
    "infer",
    "infer_arrays",
    "load_checkpoint",
    "load_split",
    "load_triplet",
    "load_wav",
    "parameter_count",
    "read_manifest",
    "save_checkpoint",
    "tiny",
    "tiny_stft",
    "train",
]
