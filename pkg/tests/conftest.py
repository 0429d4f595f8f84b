"""Shared synthetic-signal helpers for the test suite."""

import numpy as np
import pytest
from scipy.signal import butter, lfilter

from egofilter import ResponseProfile, StftConfig, Waveform

SR = 16000


def speechlike(rng: np.random.Generator, n_samples: int, env_hz: float = 4.0) -> Waveform:
    """Band-limited noise with a syllabic envelope and pauses.

    Stands in for speech: broadband enough for sharp correlation peaks,
    modulated enough that masking leaves usable time-frequency gaps.
    """
    x = lfilter(*butter(2, [120 / (SR / 2), 4000 / (SR / 2)], "bandpass"),
                rng.normal(0, 1, n_samples))
    t = np.arange(n_samples) / SR
    env = 0.5 * (1 + np.sin(2 * np.pi * env_hz * t + rng.uniform(0, 2 * np.pi))) ** 1.5
    gate = (lfilter(*butter(2, 2 / (SR / 2)), rng.normal(0, 1, n_samples)) > 0).astype(float)
    gate = np.clip(lfilter(*butter(2, 8 / (SR / 2)), gate), 0, 1)
    x = x * env * (0.3 + 0.7 * gate)
    return Waveform(0.3 * x / (np.abs(x).max() + 1e-12), SR)


def smooth_profile(config: StftConfig | None = None,
                   noise_floor_level: float = 0.0) -> ResponseProfile:
    """Synthetic playback-chain gain: a smooth bump over frequency."""
    cfg = config or StftConfig()
    f = cfg.bin_frequencies(SR)
    response = 0.9 * np.exp(-(((f - 1200) / 3500) ** 2)) + 0.15
    return ResponseProfile(
        response=response,
        noise_floor=np.full(cfg.n_bins, noise_floor_level),
        config=cfg,
        sample_rate=SR,
        interpolated=np.zeros(cfg.n_bins, dtype=bool),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def default_config() -> StftConfig:
    return StftConfig()
