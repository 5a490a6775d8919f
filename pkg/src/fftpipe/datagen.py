"""Synthetic data source: a radiating distance field with seeded white noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FieldKindError
from .grid import Field, FieldKind


@dataclass(frozen=True)
class GenConfig:
    """Generator settings.

    ``center`` defaults to the grid midpoint ((ny0-1)/2, (ny1-1)/2) and
    ``noise_amplitude`` to half the maximum field value; both are resolved at
    use. ``wavelength``, when set, post-maps values through sin(2*pi*v/wavelength)
    to produce richer spectra; it is off by default.
    """

    ny0: int = 200
    ny1: int = 200
    center: tuple[float, float] | None = None
    noise_fraction: float = 0.5
    noise_amplitude: float | None = None
    seed: int = 0
    wavelength: float | None = None

    def __post_init__(self) -> None:
        if self.ny0 < 1 or self.ny1 < 1:
            raise DimensionError(f"grid must be positive, got ({self.ny0}, {self.ny1})")
        if not 0.0 <= self.noise_fraction <= 1.0:
            raise ValueError(f"noise_fraction must be in [0, 1], got {self.noise_fraction}")
        if self.noise_amplitude is not None and self.noise_amplitude < 0:
            raise ValueError(f"noise_amplitude must be >= 0, got {self.noise_amplitude}")
        if self.wavelength is not None and self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")

    def resolved_center(self) -> tuple[float, float]:
        if self.center is not None:
            return self.center
        return ((self.ny0 - 1) / 2.0, (self.ny1 - 1) / 2.0)


def radial_field(config: GenConfig, name: str = "dataArray") -> Field:
    """Field whose value at (i, j) is the distance to the configured center."""
    c0, c1 = config.resolved_center()
    i = np.arange(config.ny0, dtype=np.float64)[:, np.newaxis]
    j = np.arange(config.ny1, dtype=np.float64)[np.newaxis, :]
    values = np.hypot(i - c0, j - c1)
    if config.wavelength is not None:
        values = np.sin(2.0 * np.pi * values / config.wavelength)
    return Field(name, values)


def add_noise(field: Field, config: GenConfig) -> Field:
    """Add bounded white noise to a random subset of cells, reproducibly.

    Each cell is selected independently with probability ``noise_fraction``;
    selected cells receive an additive uniform offset in
    [-noise_amplitude, +noise_amplitude].

    The random stream is numpy's PCG64 seeded with ``config.seed``; one
    (ny0, ny1) block of selection draws is consumed first, then one block of
    offset draws, so identical (field, config) inputs give bitwise-identical
    output on any platform.
    """
    if field.kind is not FieldKind.REAL:
        raise FieldKindError(f"noise is defined for real fields, got '{field.name}'")
    amplitude = config.noise_amplitude
    if amplitude is None:
        amplitude = 0.5 * float(np.max(field.values))
    rng = np.random.Generator(np.random.PCG64(config.seed))
    shape = field.values.shape
    selected = rng.random(shape) < config.noise_fraction
    offsets = rng.uniform(-amplitude, amplitude, shape)
    return Field(field.name, field.values + np.where(selected, offsets, 0.0))
