"""Single-channel robot ego-speech filtering toolkit.

Removes a robot's own (pre-acquirable) speech and stationary fan noise from
its microphone signal so overlapping human speech becomes recognizable.
Includes the response calibration, dataset synthesis, and evaluation
machinery around the filter.
"""

from .alignment import DelayEstimate, detect_delay, trim_to_reference
from .audio_io import read_wav, write_wav
from .calibration import (
    ResponseProfile,
    SweepSpec,
    apply_response,
    estimate_noise_floor,
    estimate_response,
    generate_sweep,
)
from .dsp import (
    DEFAULT_SAMPLE_RATE,
    Spectrogram,
    StftConfig,
    Waveform,
    istft,
    merge_phase,
    stft,
)
from .errors import (
    AlignmentError,
    AsrError,
    CalibrationError,
    EgoFilterError,
    EvaluationError,
    InvalidInputError,
    PostFilterError,
)
from .masking import MaskParams, SpeechMask, build_mask, filter_utterance, post_filter, subtract
from .metrics import EvalReport, evaluate, si_sdr, transcribe, wer
from .mixer import (
    MixSpec,
    TrainingTriplet,
    build_manifest,
    make_triplet,
    read_manifest,
    simulate_robot_recording,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SAMPLE_RATE",
    "AlignmentError",
    "AsrError",
    "CalibrationError",
    "DelayEstimate",
    "EgoFilterError",
    "EvalReport",
    "EvaluationError",
    "InvalidInputError",
    "MaskParams",
    "MixSpec",
    "PostFilterError",
    "ResponseProfile",
    "Spectrogram",
    "SpeechMask",
    "StftConfig",
    "SweepSpec",
    "TrainingTriplet",
    "Waveform",
    "apply_response",
    "build_manifest",
    "build_mask",
    "detect_delay",
    "estimate_noise_floor",
    "estimate_response",
    "evaluate",
    "filter_utterance",
    "generate_sweep",
    "istft",
    "make_triplet",
    "merge_phase",
    "post_filter",
    "read_manifest",
    "read_wav",
    "si_sdr",
    "simulate_robot_recording",
    "stft",
    "subtract",
    "transcribe",
    "trim_to_reference",
    "wer",
    "write_wav",
]
