"""Serial FFT kernels and the plan / execute / destroy transform API.

Transforms are unnormalized in both directions: Forward uses exponent sign
-1, Backward +1, and Backward(Forward(x)) = N * x. Arbitrary lengths are
supported via mixed-radix Cooley-Tukey splitting, with a direct DFT for
small prime lengths and Bluestein's chirp-z algorithm for large primes.

All twiddle, chirp, and combine tables are precomputed when a plan is
created; executing a plan only applies them. The kernels deliberately avoid
BLAS-backed reductions (np.einsum without optimization) so that the result
for any individual row is bitwise identical no matter how rows are batched
-- the rank-decomposed transform in fft_endpoint relies on this.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import DimensionError, FieldKindError, PlanStateError

# Prime lengths up to this bound use the O(p^2) direct DFT; larger primes
# switch to Bluestein.
_DIRECT_PRIME_LIMIT = 61


class Direction(Enum):
    """Transform direction; the value is the exponent sign."""

    FORWARD = -1
    BACKWARD = +1

    @property
    def sign(self) -> int:
        return self.value


def dft_naive(values, direction: Direction) -> np.ndarray:
    """Unnormalized DFT by direct evaluation of X[k] = sum_n x[n] e^(s*2pi*i*k*n/N).

    O(N^2); the independence oracle for the fast kernels.
    """
    x = np.asarray(values, dtype=np.complex128)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1D sequence, got {x.ndim}D")
    n = x.shape[0]
    if n == 0:
        raise DimensionError("cannot transform an empty sequence")
    idx = np.arange(n)
    matrix = np.exp(direction.sign * 2j * np.pi * np.outer(idx, idx) / n)
    return matrix @ x


# ---------------------------------------------------------------------------
# 1D kernel nodes. Each node's apply() maps a (batch, n) complex array to its
# transform, row by row; rows never influence each other.
# ---------------------------------------------------------------------------


class _Identity:
    def apply(self, a: np.ndarray) -> np.ndarray:
        return a.copy()


class _DirectDft:
    """Dense DFT matrix for small (prime) lengths."""

    def __init__(self, n: int, sign: int) -> None:
        idx = np.arange(n)
        self.matrix = np.exp(sign * 2j * np.pi * np.outer(idx, idx) / n)

    def apply(self, a: np.ndarray) -> np.ndarray:
        return np.einsum("bt,kt->bk", a, self.matrix)


class _CooleyTukey:
    """One split n = p * m: m-point sub-transforms recombined by a p-point DFT."""

    def __init__(self, p: int, m: int, sign: int) -> None:
        n = p * m
        self.p, self.m, self.n = p, m, n
        # twiddle[j, k1] = e^(s*2pi*i*j*k1/n); combine[k2, j] = e^(s*2pi*i*j*k2/p)
        j = np.arange(p)
        self.twiddle = np.exp(sign * 2j * np.pi * np.outer(j, np.arange(m)) / n)
        self.combine = np.exp(sign * 2j * np.pi * np.outer(j, j) / p)
        self.sub = _build_kernel(m, sign)

    def apply(self, a: np.ndarray) -> np.ndarray:
        batch = a.shape[0]
        # decimate in time: row t = p*s + j -> subsequence j, position s
        sub = a.reshape(batch, self.m, self.p).transpose(0, 2, 1)
        sub = self.sub.apply(sub.reshape(batch * self.p, self.m))
        sub = sub.reshape(batch, self.p, self.m) * self.twiddle
        out = np.einsum("kj,bjm->bkm", self.combine, sub)
        return out.reshape(batch, self.n)


class _Bluestein:
    """Chirp-z transform: any length as a power-of-two circular convolution."""

    def __init__(self, n: int, sign: int) -> None:
        self.n = n
        t = np.arange(n)
        # t^2 mod 2n keeps the chirp angles small and exact
        self.chirp = np.exp(sign * 1j * np.pi * ((t * t) % (2 * n)) / n)
        self.conv_len = 1 << (2 * n - 1).bit_length()
        kernel = np.zeros(self.conv_len, dtype=np.complex128)
        kernel[:n] = np.conj(self.chirp)
        kernel[self.conv_len - n + 1 :] = np.conj(self.chirp[1:][::-1])
        self._fwd = _build_kernel(self.conv_len, -1)
        self._bwd = _build_kernel(self.conv_len, +1)
        self.kernel_hat = self._fwd.apply(kernel[np.newaxis, :])[0]

    def apply(self, a: np.ndarray) -> np.ndarray:
        batch = a.shape[0]
        padded = np.zeros((batch, self.conv_len), dtype=np.complex128)
        padded[:, : self.n] = a * self.chirp
        conv = self._bwd.apply(self._fwd.apply(padded) * self.kernel_hat)
        return conv[:, : self.n] / self.conv_len * self.chirp


def _smallest_prime_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


@lru_cache(maxsize=None)
def _build_kernel(n: int, sign: int):
    """Kernel tree for a fixed (length, sign); cached, immutable, thread-safe."""
    if n == 1:
        return _Identity()
    p = _smallest_prime_factor(n)
    if p == n:
        if n <= _DIRECT_PRIME_LIMIT:
            return _DirectDft(n, sign)
        return _Bluestein(n, sign)
    return _CooleyTukey(p, n // p, sign)


def fft_1d(values, direction: Direction) -> np.ndarray:
    """Unnormalized 1D FFT of any length; matches dft_naive."""
    x = np.asarray(values, dtype=np.complex128)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1D sequence, got {x.ndim}D")
    if x.shape[0] == 0:
        raise DimensionError("cannot transform an empty sequence")
    return _build_kernel(x.shape[0], direction.sign).apply(x[np.newaxis, :])[0]


class Plan:
    """A reusable 2D transform descriptor of fixed shape and direction.

    Created by :func:`plan_dft_2d`; all table precomputation happens here.
    Plans are immutable and safe to share between threads; ``destroy``
    releases the tables, after which execution raises. Releasing twice is a
    no-op, matching the close() idiom.
    """

    def __init__(self, ny0: int, ny1: int, direction: Direction) -> None:
        if ny0 < 1 or ny1 < 1:
            raise DimensionError(f"plan dimensions must be positive, got ({ny0}, {ny1})")
        self.ny0 = int(ny0)
        self.ny1 = int(ny1)
        self.direction = direction
        self._row_kernel = _build_kernel(self.ny1, direction.sign)
        self._col_kernel = _build_kernel(self.ny0, direction.sign)

    @property
    def released(self) -> bool:
        return self._row_kernel is None

    def execute(self, data: np.ndarray) -> None:
        """Overwrite `data` with its unnormalized 2D DFT.

        `data` may be flat or (ny0, ny1)-shaped but must be complex and hold
        exactly ny0*ny1 elements, row-major.
        """
        if self.released:
            raise PlanStateError("plan was destroyed; create a new one")
        if not isinstance(data, np.ndarray) or not np.iscomplexobj(data):
            raise FieldKindError("execute requires a complex numpy buffer")
        if data.size != self.ny0 * self.ny1:
            raise DimensionError(
                f"buffer has {data.size} elements, plan expects {self.ny0 * self.ny1}"
            )
        work = np.ascontiguousarray(data, dtype=np.complex128).reshape(self.ny0, self.ny1)
        work = self._row_kernel.apply(work)
        work = self._col_kernel.apply(np.ascontiguousarray(work.T))
        data[...] = work.T.reshape(data.shape)

    def destroy(self) -> None:
        self._row_kernel = None
        self._col_kernel = None


def plan_dft_2d(ny0: int, ny1: int, direction: Direction) -> Plan:
    return Plan(ny0, ny1, direction)


def execute(plan: Plan, data: np.ndarray) -> None:
    plan.execute(data)


def destroy(plan: Plan) -> None:
    plan.destroy()
