"""Compare filtering methods on a synthetic dataset, the way the report
tables are produced: mean / median / std of SI-SDR per room and overall,
plus the filtering wall time per 5 s utterance.

With an ASR command in EGOFILTER_ASR_HOOK the same run also reports word
error rates (ground truth = the hook's transcription of the clean audio).
"""

import os
import tempfile
from pathlib import Path

import numpy as np
from scipy.signal import butter, lfilter

from egofilter import (
    MaskParams,
    MixSpec,
    ResponseProfile,
    StftConfig,
    Waveform,
    build_manifest,
    estimate_noise_floor,
    evaluate,
    simulate_robot_recording,
    write_wav,
)

SR = 16000


def pseudo_speech(seed, seconds, env_hz=4.0):
    rng = np.random.default_rng(seed)
    n = int(seconds * SR)
    x = lfilter(*butter(2, [120 / (SR / 2), 4000 / (SR / 2)], "bandpass"),
                rng.normal(0, 1, n))
    env = 0.5 * (1 + np.sin(2 * np.pi * env_hz * np.arange(n) / SR)) ** 1.5
    x *= env
    return Waveform(0.3 * x / np.abs(x).max(), SR)


cfg = StftConfig()
f = cfg.bin_frequencies(SR)
fan_rms = 2e-4
noise_floor = estimate_noise_floor(
    Waveform(np.random.default_rng(0).normal(0, fan_rms, 2 * SR), SR)
)
profile = ResponseProfile(
    response=0.9 * np.exp(-(((f - 1200) / 3500) ** 2)) + 0.15,
    noise_floor=noise_floor,
    config=cfg,
    sample_rate=SR,
    interpolated=np.zeros(cfg.n_bins, dtype=bool),
)

root = Path(tempfile.mkdtemp(prefix="egofilter-demo-"))
robot_dir = root / "robot"
clean_dir = root / "clean"
robot_dir.mkdir()
clean_dir.mkdir()
for i in range(8):
    reference = pseudo_speech(100 + i, 5.5)
    robot = simulate_robot_recording(reference, profile, noise_rms=fan_rms, seed=i)
    write_wav(robot_dir / f"r{i}.wav", robot)
    write_wav(robot_dir / f"r{i}.ref.wav", reference)
    write_wav(clean_dir / f"c{i}.wav", pseudo_speech(200 + i, 5.5, env_hz=3.0))
    (clean_dir / f"c{i}.txt").write_text(f"utterance {i}")

manifest = root / "manifest.jsonl"
build_manifest(robot_dir, clean_dir, manifest, MixSpec(seed=1))

asr_hook = os.environ.get("EGOFILTER_ASR_HOOK")
for method in ("unfiltered", "ss"):
    report = evaluate(
        manifest, method,
        profile=profile,
        params=MaskParams(alpha=1.5, beta=2.0),
        asr_hook=asr_hook,
    )
    print(report.summary())
    print()
