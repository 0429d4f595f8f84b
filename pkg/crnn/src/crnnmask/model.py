"""Two-stream CNN + BLSTM + FC soft-mask network.

The noisy and reference magnitude spectrograms are encoded by two CNN
stacks with identical hyperparameters but separate weights. Their feature
maps are concatenated along the feature axis, run through a bidirectional
LSTM over time, then two fully connected layers; the sigmoid output is one
mask value per time-frequency bin, strictly inside (0, 1).
"""

from __future__ import annotations

import torch
from torch import nn

from .spec import CrnnSpec


class _ConvStack(nn.Module):
    def __init__(self, spec: CrnnSpec):
        super().__init__()
        layers: list[nn.Module] = []
        in_ch = 1
        for l in spec.conv_layers:
            padding = (
                l.dilation_time * (l.width_time - 1) // 2,
                l.dilation_freq * (l.width_freq - 1) // 2,
            )
            layers.append(
                nn.Conv2d(
                    in_ch,
                    l.filters,
                    kernel_size=(l.width_time, l.width_freq),
                    dilation=(l.dilation_time, l.dilation_freq),
                    padding=padding,
                )
            )
            if spec.batch_norm:
                layers.append(nn.BatchNorm2d(l.filters))
            layers.append(nn.ReLU())
            in_ch = l.filters
        self.stack = nn.Sequential(*layers)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.stack(x)


class MaskNet(nn.Module):
    def __init__(self, spec: CrnnSpec):
        super().__init__()
        self.spec = spec
        self.noisy_encoder = _ConvStack(spec)
        self.reference_encoder = _ConvStack(spec)
        last_filters = spec.conv_layers[-1].filters
        self.blstm = nn.LSTM(
            input_size=2 * last_filters * spec.fc2_units,
            hidden_size=spec.blstm_units,
            batch_first=True,
            bidirectional=True,
        )
        self.fc1 = nn.Linear(2 * spec.blstm_units, spec.fc1_units)
        self.fc2 = nn.Linear(spec.fc1_units, spec.fc2_units)

    def forward(self, noisy_mag: torch.Tensor, reference_mag: torch.Tensor) -> torch.Tensor:
        """[frames, bins] or [batch, frames, bins] in; same shape out."""
        if noisy_mag.shape != reference_mag.shape:
            raise ValueError(
                f"noisy {tuple(noisy_mag.shape)} and reference "
                f"{tuple(reference_mag.shape)} shapes differ"
            )
        unbatched = noisy_mag.dim() == 2
        if unbatched:
            noisy_mag = noisy_mag.unsqueeze(0)
            reference_mag = reference_mag.unsqueeze(0)
        if noisy_mag.dim() != 3 or noisy_mag.shape[-1] != self.spec.fc2_units:
            raise ValueError(
                f"expected inputs shaped [*, frames, {self.spec.fc2_units}], "
                f"got {tuple(noisy_mag.shape)}"
            )
        b, t, f = noisy_mag.shape
        p = self.spec.input_compression
        noisy_mag = noisy_mag.clamp_min(0) ** p
        reference_mag = reference_mag.clamp_min(0) ** p
        n = self.noisy_encoder(noisy_mag.unsqueeze(1))
        r = self.reference_encoder(reference_mag.unsqueeze(1))
        # [B, C, T, F] -> [B, T, C * F], then the two streams side by side
        n = n.permute(0, 2, 1, 3).reshape(b, t, -1)
        r = r.permute(0, 2, 1, 3).reshape(b, t, -1)
        h, _ = self.blstm(torch.cat([n, r], dim=2))
        mask = torch.sigmoid(self.fc2(torch.relu(self.fc1(h))))
        return mask.squeeze(0) if unbatched else mask


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
