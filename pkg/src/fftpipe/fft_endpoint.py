"""The pipeline-facing FFT stage: slab-decomposed 2D transforms over W ranks.

Ranks are worker threads inside one process that communicate only through a
:class:`RankMailbox`, preserving message-passing structure so a multi-process
transport could be swapped in later. The transform runs in five phases:

  1. each rank takes its row slab of the grid;
  2. length-ny1 transforms on the slab rows;
  3. global transpose: all-to-all block exchange, after which each rank
     holds a row slab of the transposed (ny1, ny0) grid;
  4. length-ny0 transforms;
  5. transpose back and gather in the original layout.

Per-row kernel results are bitwise identical however rows are batched (see
fft_core), so the output is independent of the rank count, bit for bit.
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, RankError
from .fft_core import Direction, _build_kernel
from .grid import Field, FieldKind, Mesh, local_slab, to_complex


@dataclass(frozen=True)
class FftConfig:
    mesh_name: str
    array_name: str
    direction: Direction
    ranks: int = 1
    downstream_config: str | None = None

    def __post_init__(self) -> None:
        if not self.mesh_name or not self.array_name:
            raise ConfigError("fft stage needs non-empty mesh and array names")
        if self.ranks < 1:
            raise RankError(f"rank count must be positive, got {self.ranks}")


class RankMailbox:
    """Ordered per-(source, destination) message queues between ranks.

    ``send`` never blocks; ``receive`` blocks until the named source has
    sent. Messages between a fixed pair are delivered in send order.
    """

    def __init__(self, ranks: int) -> None:
        if ranks < 1:
            raise RankError(f"rank count must be positive, got {ranks}")
        self.ranks = ranks
        self._queues = [[queue.SimpleQueue() for _ in range(ranks)] for _ in range(ranks)]

    def send(self, source: int, destination: int, payload) -> None:
        self._queues[destination][source].put(payload)

    def receive(self, destination: int, source: int):
        return self._queues[destination][source].get()


def transpose_exchange(
    mailbox: RankMailbox, rank: int, block: np.ndarray, d0: int, d1: int
) -> np.ndarray:
    """All-to-all exchange turning row slabs of a (d0, d1) grid into row
    slabs of its (d1, d0) transpose.

    `block` holds this rank's rows of the (d0, d1) grid; the result holds its
    rows of the transposed grid. Applying the exchange twice with swapped
    dims restores the original block exactly.
    """
    ranks = mailbox.ranks
    out_slab = local_slab(d1, ranks, rank)
    for dest in range(ranks):
        cols = local_slab(d1, ranks, dest)
        mailbox.send(rank, dest, block[:, cols.rows].T.copy())
    out = np.empty((out_slab.local_n0, d0), dtype=np.complex128)
    for source in range(ranks):
        rows = local_slab(d0, ranks, source)
        received = mailbox.receive(rank, source)
        if isinstance(received, BaseException):
            raise received
        out[:, rows.rows] = received
    return out


def distributed_fft_2d(
    data: np.ndarray, ny0: int, ny1: int, direction: Direction, ranks: int
) -> np.ndarray:
    """2D unnormalized DFT computed by `ranks` cooperating workers.

    Returns a new (ny0, ny1) complex array; the input is left untouched.
    Matches the serial plan execution exactly for every rank count,
    including ranks > ny0 (zero-row slabs).
    """
    if ranks < 1:
        raise RankError(f"rank count must be positive, got {ranks}")
    src = np.asarray(data, dtype=np.complex128)
    if src.size != ny0 * ny1:
        raise DimensionError(f"buffer has {src.size} elements, expected {ny0 * ny1}")
    src = src.reshape(ny0, ny1)

    row_kernel = _build_kernel(ny1, direction.sign)
    col_kernel = _build_kernel(ny0, direction.sign)
    mailbox = RankMailbox(ranks)
    results: queue.SimpleQueue = queue.SimpleQueue()

    def worker(rank: int) -> None:
        try:
            slab = local_slab(ny0, ranks, rank)
            block = src[slab.rows, :].copy()
            block = row_kernel.apply(block)
            block = transpose_exchange(mailbox, rank, block, ny0, ny1)
            block = col_kernel.apply(block)
            block = transpose_exchange(mailbox, rank, block, ny1, ny0)
            results.put((rank, block, None))
        except BaseException as exc:
            # Unblock peers waiting on this rank: cover both exchange phases
            # with exception markers, then report the failure.
            for dest in range(ranks):
                mailbox.send(rank, dest, exc)
                mailbox.send(rank, dest, exc)
            results.put((rank, None, exc))

    threads = [threading.Thread(target=worker, args=(r,)) for r in range(ranks)]
    for t in threads:
        t.start()
    out = np.empty((ny0, ny1), dtype=np.complex128)
    failure = None
    for _ in range(ranks):
        rank, block, exc = results.get()
        if exc is not None:
            failure = failure or exc
            continue
        out[local_slab(ny0, ranks, rank).rows, :] = block
    for t in threads:
        t.join()
    if failure is not None:
        raise failure
    return out


def fft_execute(mesh: Mesh, config: FftConfig) -> Mesh:
    """Transform the configured array and publish it back onto the mesh.

    Real inputs are promoted to complex first. The result replaces the field
    under the same name; every other field passes through untouched.
    """
    if mesh.name != config.mesh_name:
        raise ConfigError(
            f"fft stage is configured for mesh '{config.mesh_name}' "
            f"but received '{mesh.name}'"
        )
    field = mesh.get_field(config.array_name)
    if field.kind is FieldKind.REAL:
        field = to_complex(field)
    spectrum = distributed_fft_2d(
        field.values, mesh.ny0, mesh.ny1, config.direction, config.ranks
    )
    return mesh.with_field(Field(field.name, spectrum))
