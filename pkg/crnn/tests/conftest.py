"""Synthetic triplets written in the dataset-builder's manifest format."""

import json

import numpy as np
import pytest
from scipy.io import wavfile
from scipy.signal import butter, lfilter

SR = 16000


def speechish(seed: int, n_samples: int, env_hz: float = 4.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = lfilter(*butter(2, [120 / (SR / 2), 4000 / (SR / 2)], "bandpass"),
                rng.normal(0, 1, n_samples))
    t = np.arange(n_samples) / SR
    x *= 0.5 * (1 + np.sin(2 * np.pi * env_hz * t)) ** 1.5
    return 0.3 * x / np.abs(x).max()


def write_wav(path, samples):
    wavfile.write(path, SR, samples.astype(np.float32))


def build_overfit_manifest(root, gain_db: float, seconds: float = 1.0,
                           offset_s: float = 0.1, seed: int = 1):
    """One triplet, listed under both splits so training can monitor it."""
    n = int(seconds * SR)
    reference = speechish(seed, n)
    robot = reference.copy()  # identity playback chain
    clean = np.zeros(n)
    offset = int(offset_s * SR)
    target = speechish(seed + 1, n, env_hz=3.0)
    clean[offset:] = (10 ** (gain_db / 20) * target)[: n - offset]
    noisy = robot + clean

    audio = root / "audio"
    audio.mkdir(parents=True, exist_ok=True)
    write_wav(audio / "clean.wav", clean)
    write_wav(audio / "noisy.wav", noisy)
    write_wav(audio / "reference.wav", reference)
    manifest = root / "manifest.jsonl"
    with open(manifest, "w", encoding="utf-8") as fh:
        for split in ("train", "validation"):
            fh.write(json.dumps({
                "clean": "audio/clean.wav",
                "noisy": "audio/noisy.wav",
                "reference": "audio/reference.wav",
                "transcript": "synthetic",
                "offset_samples": offset,
                "room_tag": "lab",
                "split": split,
            }) + "\n")
    return manifest


@pytest.fixture
def rng():
    return np.random.default_rng(0)
