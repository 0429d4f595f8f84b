"""Training loop: minimize the compressed magnitude error of the masked mix.

The estimated magnitude is the predicted mask times the noisy magnitude;
the target is the clean magnitude. The checkpoint with the best validation
loss wins and embeds the network spec and STFT setup, so inference needs
nothing else.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import torch

from .data import Triplet, load_split
from .loss import DEFAULT_EXPONENT, compressed_mse
from .model import MaskNet
from .spec import CrnnSpec, StftSetup


@dataclass(frozen=True)
class TrainConfig:
    segment_seconds: float = 5.0
    sample_rate: int = 16000
    batch_size: int = 1
    learning_rate: float = 1e-3
    steps: int = 500
    val_interval: int = 50
    exponent: float = DEFAULT_EXPONENT
    seed: int = 0


def validation_loss(model: MaskNet, items: list[Triplet], exponent: float) -> float:
    model.eval()
    total = 0.0
    with torch.no_grad():
        for item in items:
            mask = model(item.noisy_mag, item.reference_mag)
            total += compressed_mse(mask * item.noisy_mag, item.clean_mag, exponent).item()
    model.train()
    return total / len(items)


def train(
    manifest: str | os.PathLike,
    spec: CrnnSpec,
    stft: StftSetup,
    config: TrainConfig,
    out_path: str | os.PathLike,
    log=print,
) -> dict:
    """Train on the manifest's train split, checkpoint on the best val loss."""
    if spec.fc2_units != stft.n_bins:
        raise ValueError(
            f"network outputs {spec.fc2_units} bins but the STFT yields {stft.n_bins}"
        )
    if stft.sample_rate != config.sample_rate:
        raise ValueError("STFT and training sample rates differ")
    segment = int(round(config.segment_seconds * config.sample_rate))
    train_items = load_split(manifest, "train", stft, segment)
    val_items = load_split(manifest, "validation", stft, segment)
    if not train_items:
        raise ValueError("train split is empty")
    if not val_items:
        raise ValueError("validation split is empty")

    torch.manual_seed(config.seed)
    model = MaskNet(spec)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    sampler = np.random.default_rng(config.seed)

    best = {"val_loss": float("inf"), "step": 0}
    first_loss = None
    for step in range(1, config.steps + 1):
        idx = sampler.integers(0, len(train_items), size=config.batch_size)
        optimizer.zero_grad()
        loss = torch.zeros(())
        for i in idx:
            item = train_items[i]
            mask = model(item.noisy_mag, item.reference_mag)
            loss = loss + compressed_mse(mask * item.noisy_mag, item.clean_mag,
                                         config.exponent)
        loss = loss / len(idx)
        loss.backward()
        optimizer.step()
        if first_loss is None:
            first_loss = loss.item()
        if step % config.val_interval == 0 or step == config.steps:
            val = validation_loss(model, val_items, config.exponent)
            log(f"step {step:5d}  train {loss.item():.6f}  val {val:.6f}")
            if val < best["val_loss"]:
                best = {"val_loss": val, "step": step}
                save_checkpoint(out_path, model, spec, stft, val, step)
    return {
        "first_train_loss": first_loss,
        "final_train_loss": loss.item(),
        "best_val_loss": best["val_loss"],
        "best_step": best["step"],
        "checkpoint": str(out_path),
    }


def save_checkpoint(
    path: str | os.PathLike,
    model: MaskNet,
    spec: CrnnSpec,
    stft: StftSetup,
    val_loss: float,
    step: int,
) -> None:
    torch.save(
        {
            "model_state": model.state_dict(),
            "spec": spec.to_dict(),
            "stft": stft.to_dict(),
            "val_loss": val_loss,
            "step": step,
        },
        path,
    )


def load_checkpoint(path: str | os.PathLike) -> tuple[MaskNet, CrnnSpec, StftSetup, dict]:
    payload = torch.load(path, weights_only=True)
    spec = CrnnSpec.from_dict(payload["spec"])
    stft = StftSetup.from_dict(payload["stft"])
    model = MaskNet(spec)
    model.load_state_dict(payload["model_state"])
    model.eval()
    meta = {"val_loss": payload["val_loss"], "step": payload["step"]}
    return model, spec, stft, meta
