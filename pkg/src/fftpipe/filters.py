"""Spectral-domain stages: corner-retention bandpass and display magnitude.

The bandpass operates on the unshifted spectrum layout, where the lowest
frequencies sit at the four array corners. Coefficient (k0, k1) is kept iff

    min(k0, ny0 - k0) <= r0  and  min(k1, ny1 - k1) <= r1

with per-axis radius r_i = round(keep_fraction * ny_i), rounding halves away
from zero. Everything else is zeroed. The DC coefficient always survives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FieldKindError
from .grid import Field, FieldKind, Mesh


@dataclass(frozen=True)
class BandpassConfig:
    mesh_name: str
    array_name: str
    keep_fraction: float = 0.0075

    def __post_init__(self) -> None:
        if not 0.0 <= self.keep_fraction <= 1.0:
            raise ValueError(f"keep_fraction must be in [0, 1], got {self.keep_fraction}")


def retention_radius(keep_fraction: float, n: int) -> int:
    """Per-axis radius: keep_fraction * n rounded half away from zero."""
    return int(math.floor(keep_fraction * n + 0.5))


def _axis_mask(n: int, radius: int) -> np.ndarray:
    k = np.arange(n)
    return np.minimum(k, n - k) <= radius


def bandpass(mesh: Mesh, config: BandpassConfig) -> Mesh:
    """Zero all spectral coefficients outside the corner retention radius."""
    field = mesh.get_field(config.array_name)
    if field.kind is not FieldKind.COMPLEX:
        raise FieldKindError(
            f"bandpass expects a complex spectral field, '{field.name}' is real"
        )
    r0 = retention_radius(config.keep_fraction, field.ny0)
    r1 = retention_radius(config.keep_fraction, field.ny1)
    keep = _axis_mask(field.ny0, r0)[:, np.newaxis] & _axis_mask(field.ny1, r1)[np.newaxis, :]
    return mesh.with_field(Field(field.name, np.where(keep, field.values, 0.0)))


def display_magnitude(field: Field) -> Field:
    """Real field log(1 + |z|), suffixed "_mag"; tames the DC-dominated range."""
    if field.kind is not FieldKind.COMPLEX:
        raise FieldKindError(f"display magnitude expects a complex field, got '{field.name}'")
    return Field(field.name + "_mag", np.log1p(np.abs(field.values)))
