"""Acceptance gate for the mask network, one test per criterion.

SI-SDR scoring uses the filtering toolkit's metrics module (install the
repository root package first); audio and manifests flow through the same
file formats the dataset builder writes.
"""

import time

import numpy as np
import pytest
import torch
from egofilter import Waveform, si_sdr

from crnnmask import (
    CrnnSpec,
    MaskNet,
    TrainConfig,
    compressed_mse,
    infer,
    parameter_count,
    tiny,
    tiny_stft,
    train,
)
from crnnmask.data import load_wav

from .conftest import SR, build_overfit_manifest
from .test_model import expected_parameters

FULL_MODEL_PARAMETERS = 33_983_577  # closed-form sum over the layer table


def check(name: str, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_full_model_shape_range_and_parameter_count():
    torch.manual_seed(0)
    spec = CrnnSpec()
    model = MaskNet(spec)
    count = parameter_count(model)
    by_hand = expected_parameters(spec)
    with torch.no_grad():
        mask = model(torch.rand(500, 601), torch.rand(500, 601))
    check(
        "crnn-shape-range-parameters",
        mask.shape == (500, 601)
        and mask.min().item() > 0.0
        and mask.max().item() < 1.0
        and count == by_hand == FULL_MODEL_PARAMETERS,
        f"mask shape {tuple(mask.shape)}, range ({mask.min():.4f}, {mask.max():.4f}), "
        f"parameters {count} vs hand computation {by_hand}",
    )


def test_loss_gradient_matches_finite_differences():
    torch.manual_seed(1)
    est = (0.1 + torch.rand(6, 8, dtype=torch.float64)).requires_grad_(True)
    target = 0.1 + torch.rand(6, 8, dtype=torch.float64)
    compressed_mse(est, target, exponent=0.3).backward()
    eps = 1e-6
    worst = 0.0
    with torch.no_grad():
        for idx in [(i, j) for i in range(6) for j in range(0, 8, 3)]:
            bumped = est.detach().clone()
            bumped[idx] += eps
            up = compressed_mse(bumped, target, exponent=0.3).item()
            bumped[idx] -= 2 * eps
            down = compressed_mse(bumped, target, exponent=0.3).item()
            fd = (up - down) / (2 * eps)
            worst = max(worst, abs(est.grad[idx].item() - fd) / abs(fd))
    check(
        "crnn-gradient-check",
        worst <= 1e-4,
        f"max relative deviation from central differences {worst:.2e} (limit 1e-4)",
    )


def test_single_triplet_overfit_and_inference_gain(tmp_path):
    manifest = build_overfit_manifest(tmp_path, gain_db=-10.0, seconds=1.0)
    stft = tiny_stft()
    config = TrainConfig(segment_seconds=1.0, steps=500, val_interval=100,
                         learning_rate=2e-3, seed=0)
    t0 = time.perf_counter()
    summary = train(manifest, tiny(bins=stft.n_bins), stft, config,
                    tmp_path / "overfit.pt", log=lambda *_: None)
    elapsed = time.perf_counter() - t0
    drop = 1.0 - summary["final_train_loss"] / summary["first_train_loss"]

    noisy, _ = load_wav(tmp_path / "audio" / "noisy.wav")
    clean, _ = load_wav(tmp_path / "audio" / "clean.wav")
    reference, _ = load_wav(tmp_path / "audio" / "reference.wav")
    estimate = infer(noisy, reference, tmp_path / "overfit.pt")
    before = si_sdr(Waveform(noisy, SR), Waveform(clean, SR))
    after = si_sdr(Waveform(estimate, SR), Waveform(clean, SR))
    check(
        "crnn-overfit",
        drop >= 0.90 and after > before,
        f"loss drop {100 * drop:.1f}% in 500 steps (need >= 90%), "
        f"SI-SDR {before:.1f} -> {after:.1f} dB ({elapsed:.0f} s)",
    )


def test_normalization_experiment(tmp_path):
    # Interference 25 dB above the target; identical seed and budget for the
    # normalization-off and normalization-on configurations.
    manifest = build_overfit_manifest(tmp_path, gain_db=-25.0, seconds=1.0)
    stft = tiny_stft()
    noisy, _ = load_wav(tmp_path / "audio" / "noisy.wav")
    clean, _ = load_wav(tmp_path / "audio" / "clean.wav")
    reference, _ = load_wav(tmp_path / "audio" / "reference.wav")
    results = {}
    for batch_norm in (False, True):
        config = TrainConfig(segment_seconds=1.0, steps=500, val_interval=100,
                             learning_rate=2e-3, seed=0)
        ck = tmp_path / f"norm_{'on' if batch_norm else 'off'}.pt"
        train(manifest, tiny(bins=stft.n_bins, batch_norm=batch_norm), stft,
              config, ck, log=lambda *_: None)
        estimate = infer(noisy, reference, ck)
        results[batch_norm] = si_sdr(Waveform(estimate, SR), Waveform(clean, SR))
    check(
        "crnn-normalization-experiment",
        results[False] >= results[True],
        f"normalization off {results[False]:.2f} dB vs on {results[True]:.2f} dB "
        f"(criterion: off >= on)",
    )
