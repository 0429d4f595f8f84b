"""Network and feature-extraction hyperparameters.

The default layer table is the full-size model: two identical (but
independently weighted) eight-layer CNN stacks, a 400-unit BLSTM over the
concatenated streams, a 600-unit rectified layer, and a sigmoid output of
one unit per frequency bin. ``tiny()`` keeps the same shape at a fraction
of the width for fast experiments and tests.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass(frozen=True)
class ConvLayerSpec:
    width_time: int
    width_freq: int
    dilation_time: int
    dilation_freq: int
    filters: int


FULL_CONV_LAYERS: tuple[ConvLayerSpec, ...] = (
    ConvLayerSpec(1, 7, 1, 1, 64),
    ConvLayerSpec(7, 1, 1, 1, 64),
    ConvLayerSpec(5, 5, 1, 1, 64),
    ConvLayerSpec(5, 5, 2, 1, 64),
    ConvLayerSpec(5, 5, 4, 1, 64),
    ConvLayerSpec(5, 5, 8, 1, 64),
    ConvLayerSpec(5, 5, 16, 1, 64),
    ConvLayerSpec(1, 1, 1, 1, 8),
)


@dataclass(frozen=True)
class CrnnSpec:
    conv_layers: tuple[ConvLayerSpec, ...] = FULL_CONV_LAYERS
    blstm_units: int = 400
    fc1_units: int = 600
    fc2_units: int = 601
    batch_norm: bool = False
    # Power-law compression of the input magnitudes. Raw speech magnitudes
    # sit around 1e-2, where fresh conv layers are bias-dominated and nearly
    # input-blind; elementwise compression restores sensitivity without any
    # cross-item statistics.
    input_compression: float = 0.3

    def __post_init__(self):
        if not self.conv_layers:
            raise ValueError("need at least one conv layer")
        for layer in self.conv_layers:
            if layer.width_time % 2 == 0 or layer.width_freq % 2 == 0:
                raise ValueError("kernel widths must be odd for same-size output")
        if not 0 < self.input_compression <= 1:
            raise ValueError("input_compression must be in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "conv_layers": [asdict(l) for l in self.conv_layers],
            "blstm_units": self.blstm_units,
            "fc1_units": self.fc1_units,
            "fc2_units": self.fc2_units,
            "batch_norm": self.batch_norm,
            "input_compression": self.input_compression,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CrnnSpec":
        return cls(
            conv_layers=tuple(ConvLayerSpec(**l) for l in d["conv_layers"]),
            blstm_units=d["blstm_units"],
            fc1_units=d["fc1_units"],
            fc2_units=d["fc2_units"],
            batch_norm=d["batch_norm"],
            input_compression=d.get("input_compression", 0.3),
        )


def tiny(bins: int = 129, batch_norm: bool = False) -> CrnnSpec:
    """Reduced-width spec with the full model's layer pattern."""
    layers = tuple(
        ConvLayerSpec(l.width_time, l.width_freq, l.dilation_time, l.dilation_freq,
                      8 if i < len(FULL_CONV_LAYERS) - 1 else 2)
        for i, l in enumerate(FULL_CONV_LAYERS)
    )
    return CrnnSpec(conv_layers=layers, blstm_units=64, fc1_units=96,
                    fc2_units=bins, batch_norm=batch_norm)


@dataclass(frozen=True)
class StftSetup:
    """Analysis parameters; frequency bins must match the network output."""

    fft_size: int = 1200
    window_length: int = 400
    hop_length: int = 160
    sample_rate: int = 16000

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "StftSetup":
        return cls(**d)


def tiny_stft() -> StftSetup:
    return StftSetup(fft_size=256, window_length=256, hop_length=160)
