"""Convenience helpers for the denoising workflow, shared by scripts and tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bridge import ScaleConfig, scale_field
from .datagen import GenConfig, add_noise, radial_field
from .fft_core import Direction
from .fft_endpoint import FftConfig, fft_execute
from .filters import BandpassConfig, bandpass
from .grid import Mesh


@dataclass(frozen=True)
class DenoiseResult:
    clean: np.ndarray
    noisy: np.ndarray
    spectrum: np.ndarray
    filtered: np.ndarray
    denoised: np.ndarray  # real part of the normalized inverse transform

    @property
    def rmse_noisy(self) -> float:
        return float(np.sqrt(np.mean((self.noisy - self.clean) ** 2)))

    @property
    def rmse_denoised(self) -> float:
        return float(np.sqrt(np.mean((self.denoised - self.clean) ** 2)))


def denoise(
    ny0: int = 200,
    ny1: int = 200,
    seed: int = 42,
    keep_fraction: float = 0.0075,
    ranks: int = 1,
) -> DenoiseResult:
    """Run generate -> forward -> bandpass -> inverse -> normalize and
    collect the field at every stage."""
    gen = GenConfig(ny0=ny0, ny1=ny1, seed=seed)
    clean = radial_field(gen)
    mesh = Mesh("mesh", ny0, ny1).add_field(add_noise(clean, gen))
    noisy = mesh.get_field("dataArray").values

    mesh = fft_execute(mesh, FftConfig("mesh", "dataArray", Direction.FORWARD, ranks=ranks))
    spectrum = mesh.get_field("dataArray").values
    mesh = bandpass(mesh, BandpassConfig("mesh", "dataArray", keep_fraction))
    filtered = mesh.get_field("dataArray").values
    mesh = fft_execute(mesh, FftConfig("mesh", "dataArray", Direction.BACKWARD, ranks=ranks))
    mesh = scale_field(mesh, ScaleConfig("dataArray", 1.0 / (ny0 * ny1)))
    denoised = mesh.get_field("dataArray").values.real

    return DenoiseResult(
        clean=clean.values,
        noisy=noisy,
        spectrum=spectrum,
        filtered=filtered,
        denoised=denoised,
    )
