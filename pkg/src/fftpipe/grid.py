"""Structured-mesh data model: named real/complex fields on 2D grids.

Meshes are the unit of exchange between pipeline stages. Fields are
immutable after construction, so a mesh can be shared freely between
concurrent readers; stages that change a field build a new one and attach
it with :meth:`Mesh.with_field`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType

import numpy as np

from .errors import (
    DimensionError,
    FieldKindError,
    MissingArrayError,
    NameCollisionError,
    RankError,
)


class FieldKind(Enum):
    REAL = "real"
    COMPLEX = "complex"


class Field:
    """A named 2D array, row-major, either real (float64) or complex (complex128).

    The backing array is copied on construction and marked read-only. All
    entries must be finite.
    """

    __slots__ = ("name", "values")

    def __init__(self, name: str, values) -> None:
        if not name:
            raise ValueError("field name must be non-empty")
        arr = np.asarray(values)
        if arr.ndim != 2:
            raise DimensionError(f"field '{name}' must be 2D, got {arr.ndim}D")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"field '{name}' has empty dimension {arr.shape}")
        dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
        arr = np.array(arr, dtype=dtype, order="C")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"field '{name}' contains non-finite values")
        arr.setflags(write=False)
        self.name = name
        self.values = arr

    @property
    def ny0(self) -> int:
        return self.values.shape[0]

    @property
    def ny1(self) -> int:
        return self.values.shape[1]

    @property
    def kind(self) -> FieldKind:
        return FieldKind.COMPLEX if self.values.dtype == np.complex128 else FieldKind.REAL

    def __repr__(self) -> str:
        return f"Field({self.name!r}, {self.ny0}x{self.ny1}, {self.kind.value})"


class Mesh:
    """A named collection of same-shaped fields on one structured grid."""

    def __init__(self, name: str, ny0: int, ny1: int) -> None:
        if not name:
            raise ValueError("mesh name must be non-empty")
        if ny0 < 1 or ny1 < 1:
            raise DimensionError(f"mesh dimensions must be positive, got ({ny0}, {ny1})")
        self.name = name
        self.ny0 = int(ny0)
        self.ny1 = int(ny1)
        self._fields: dict[str, Field] = {}

    @property
    def fields(self):
        """Read-only name -> Field mapping, in insertion order."""
        return MappingProxyType(self._fields)

    def field_names(self) -> tuple[str, ...]:
        return tuple(self._fields)

    def add_field(self, field: Field) -> "Mesh":
        if (field.ny0, field.ny1) != (self.ny0, self.ny1):
            raise DimensionError(
                f"field '{field.name}' is {field.ny0}x{field.ny1}, "
                f"mesh '{self.name}' is {self.ny0}x{self.ny1}"
            )
        if field.name in self._fields:
            raise NameCollisionError(f"mesh '{self.name}' already has field '{field.name}'")
        self._fields[field.name] = field
        return self

    def get_field(self, name: str) -> Field:
        try:
            return self._fields[name]
        except KeyError:
            raise MissingArrayError(f"mesh '{self.name}' has no array '{name}'") from None

    def __contains__(self, name: str) -> bool:
        return name in self._fields

    def with_field(self, field: Field) -> "Mesh":
        """New mesh with `field` replacing (or appended after) the same-named one."""
        out = Mesh(self.name, self.ny0, self.ny1)
        for existing in self._fields.values():
            out.add_field(existing if existing.name != field.name else field)
        if field.name not in out._fields:
            out.add_field(field)
        return out

    def __repr__(self) -> str:
        return f"Mesh({self.name!r}, {self.ny0}x{self.ny1}, fields={list(self._fields)})"


def make_mesh(name: str, ny0: int, ny1: int) -> Mesh:
    return Mesh(name, ny0, ny1)


def to_complex(field: Field) -> Field:
    """Promote a real field to complex with zero imaginary parts."""
    if field.kind is not FieldKind.REAL:
        raise FieldKindError(f"field '{field.name}' is already complex")
    return Field(field.name, field.values.astype(np.complex128))


@dataclass(frozen=True)
class Slab:
    """One rank's contiguous block of rows of the global grid."""

    local_n0: int
    local_0_start: int

    @property
    def stop(self) -> int:
        return self.local_0_start + self.local_n0

    @property
    def rows(self) -> slice:
        return slice(self.local_0_start, self.stop)


def local_slab(ny0: int, ranks: int, rank: int) -> Slab:
    """Block row distribution over `ranks` ranks.

    The first ``ny0 mod ranks`` ranks get one extra row; slabs are disjoint,
    contiguous, ordered by rank, and cover [0, ny0). Ranks beyond ny0 own
    zero rows.
    """
    if ny0 < 1:
        raise DimensionError(f"row count must be positive, got {ny0}")
    if ranks < 1:
        raise RankError(f"rank count must be positive, got {ranks}")
    if not 0 <= rank < ranks:
        raise RankError(f"rank {rank} out of range for {ranks} ranks")
    base, rem = divmod(ny0, ranks)
    n = base + (1 if rank < rem else 0)
    start = rank * base + min(rank, rem)
    return Slab(local_n0=n, local_0_start=start)
