"""Grayscale raster sink: binary PGM (P5) with per-image min-max scaling.

Format: ASCII header ``P5\\n<width> <height>\\n255\\n`` followed by exactly
ny0*ny1 raw bytes, row-major, top row first. Pixels are
round(255 * (v - min) / (max - min)); a constant field renders all black.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import FieldKindError
from .filters import display_magnitude
from .grid import Field, FieldKind, Mesh


class ImageScaling(Enum):
    LINEAR = "linear"
    LOG_MAGNITUDE = "log_magnitude"


@dataclass(frozen=True)
class ImageConfig:
    mesh_name: str
    array_name: str
    path: str
    scaling: ImageScaling = ImageScaling.LINEAR

    def __post_init__(self) -> None:
        if not self.path:
            raise ValueError("image path must be non-empty")


def quantize(values: np.ndarray) -> np.ndarray:
    mn = values.min()
    mx = values.max()
    if mx == mn:
        return np.zeros(values.shape, dtype=np.uint8)
    scaled = np.rint(255.0 * (values - mn) / (mx - mn))
    return np.clip(scaled, 0, 255).astype(np.uint8)


def write_image(mesh: Mesh, config: ImageConfig) -> Path:
    """Render the named field to `config.path`; returns the written path."""
    field = mesh.get_field(config.array_name)
    if config.scaling is ImageScaling.LOG_MAGNITUDE:
        if field.kind is not FieldKind.COMPLEX:
            raise FieldKindError(
                f"log-magnitude rendering needs a complex field, '{field.name}' is real"
            )
        values = display_magnitude(field).values
    else:
        if field.kind is not FieldKind.REAL:
            raise FieldKindError(
                f"linear rendering needs a real field, '{field.name}' is complex"
            )
        values = field.values
    pixels = quantize(values)
    path = Path(config.path)
    header = f"P5\n{field.ny1} {field.ny0}\n255\n".encode("ascii")
    path.write_bytes(header + pixels.tobytes())
    return path


def read_image(path) -> Field:
    """Read a binary PGM (P5, maxval 255) back as a real field named after the file."""
    raw = Path(path).read_bytes()
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":  # comment runs to end of line
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 is supported, got {maxval}")
    pos += 1  # single whitespace byte after the header
    payload = raw[pos : pos + width * height]
    if len(payload) != width * height:
        raise ValueError(f"{path}: truncated payload")
    values = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return Field(Path(path).stem, values.astype(np.float64))
