"""Periodic spectral grid, complex fields, and discrete calculus.

The computational domain is the cube ``[-extent, extent)^3`` sampled
uniformly with ``n`` points per axis (spacing ``h = 2*extent/n``).
Fields are C-ordered ``(n, n, n)`` complex arrays indexed ``(x1, x2,
x3)``, so the ``x3`` index varies fastest; this is also the on-disk
snapshot layout.  All integrals use the rectangle rule with weight
``h**3``, which is spectrally accurate for smooth periodic data.

Derivatives are spectral.  Odd symbols (single derivatives) zero the
Nyquist mode so that the discrete operator stays skew-adjoint; even
symbols (the Laplacian, phase multipliers) keep it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft as _sfft

from .errors import ConfigInvalid

__all__ = [
    "GridSpec",
    "Field",
    "PhysicsParams",
    "fft_workers",
    "fft_forward",
    "fft_inverse",
    "spectral_gradient",
    "gradient_arrays",
    "laplacian_array",
    "norms",
    "lp_norm",
    "inner",
    "pairing",
    "boundary_mass_fraction",
]


def fft_workers() -> int:
    """Worker count for FFT calls, capped by the ROTOR_GPE_THREADS env var."""
    avail = os.cpu_count() or 1
    raw = os.environ.get("ROTOR_GPE_THREADS")
    if raw is None or raw == "":
        return max(1, min(4, avail))
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigInvalid(
            f"ROTOR_GPE_THREADS: expected an integer, got {raw!r}"
        ) from None
    return max(1, min(cap, avail))


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic cube ``[-extent, extent)^3`` with ``n`` points per axis.

    Parameters
    ----------
    n:
        Points per axis.  Must be even (so the Nyquist mode is
        unambiguous) and at least 4.
    extent:
        Half-width of the box.
    """

    n: int
    extent: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ConfigInvalid(f"grid.n: expected an integer, got {self.n!r}")
        if self.n < 4 or self.n % 2:
            raise ConfigInvalid(f"grid.n: expected an even integer >= 4, got {self.n}")
        extent = float(self.extent)
        if not np.isfinite(extent) or extent <= 0:
            raise ConfigInvalid(f"grid.extent: expected a positive length, got {self.extent!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "extent", extent)

    @property
    def h(self) -> float:
        """Grid spacing along each axis."""
        return 2.0 * self.extent / self.n

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @cached_property
    def axis(self) -> np.ndarray:
        """Sample positions along one axis: ``-extent, ..., extent - h``."""
        out = -self.extent + self.h * np.arange(self.n)
        out.flags.writeable = False
        return out

    @cached_property
    def freq(self) -> np.ndarray:
        """Angular wavenumbers in FFT order, Nyquist included (negative)."""
        out = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)
        out.flags.writeable = False
        return out

    @cached_property
    def freq_odd(self) -> np.ndarray:
        """``freq`` with the Nyquist mode zeroed, for odd derivative symbols."""
        out = self.freq.copy()
        out[self.n // 2] = 0.0
        out.flags.writeable = False
        return out

    # Broadcastable coordinate slabs: x1 varies along axis 0, etc.
    @cached_property
    def x1(self) -> np.ndarray:
        return self.axis.reshape(self.n, 1, 1)

    @cached_property
    def x2(self) -> np.ndarray:
        return self.axis.reshape(1, self.n, 1)

    @cached_property
    def x3(self) -> np.ndarray:
        return self.axis.reshape(1, 1, self.n)

    @cached_property
    def r2(self) -> np.ndarray:
        """``|x|^2`` on the full grid."""
        out = self.x1**2 + self.x2**2 + self.x3**2
        out.flags.writeable = False
        return out

    @cached_property
    def k2(self) -> np.ndarray:
        """``|k|^2`` on the full grid (even symbol: Nyquist kept)."""
        k = self.freq
        out = (k**2).reshape(self.n, 1, 1) + (k**2).reshape(1, self.n, 1) + (k**2).reshape(1, 1, self.n)
        out.flags.writeable = False
        return out


@dataclass(frozen=True)
class Field:
    """A complex scalar field sampled on a :class:`GridSpec`.

    The constructor copies/validates: data is coerced to a C-contiguous
    complex128 array of shape ``grid.shape`` and checked for NaN/Inf.
    """

    grid: GridSpec
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.complex128)
        if data.shape != self.grid.shape:
            raise ValueError(
                f"field data has shape {data.shape}, expected {self.grid.shape}"
            )
        if not np.isfinite(data.view(np.float64)).all():
            raise ValueError("field data contains NaN or Inf amplitudes")
        object.__setattr__(self, "data", data)

    def copy(self) -> "Field":
        return Field(self.grid, self.data.copy())


@dataclass(frozen=True)
class PhysicsParams:
    """Trap frequency and interaction strength.

    The rotation rate is locked to the trap frequency ``omega`` -- that
    resonance is the whole point of this package -- so it is not a
    separate knob.  ``window`` is the half-open time interval on which
    the closed-form propagator kernel is valid.
    """

    omega: float
    beta: float = 0.0

    def __post_init__(self) -> None:
        omega = float(self.omega)
        beta = float(self.beta)
        if not np.isfinite(omega) or omega < 1.0:
            raise ConfigInvalid(f"physics.omega: must be a finite number >= 1, got {self.omega!r}")
        if not np.isfinite(beta) or beta < 0.0:
            raise ConfigInvalid(f"physics.beta: must be a finite number >= 0, got {self.beta!r}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "beta", beta)

    @property
    def window(self) -> float:
        """Length ``pi / (4*omega)`` of one kernel-validity window."""
        return np.pi / (4.0 * self.omega)


# --------------------------------------------------------------------------
# transforms and calculus
# --------------------------------------------------------------------------


def _fftn(data: np.ndarray) -> np.ndarray:
    return _sfft.fftn(data, norm="ortho", workers=fft_workers())


def _ifftn(data: np.ndarray) -> np.ndarray:
    return _sfft.ifftn(data, norm="ortho", workers=fft_workers())


def fft_forward(f: Field) -> Field:
    """Unitary FFT of a field (so Parseval holds without extra factors)."""
    return Field(f.grid, _fftn(f.data))


def fft_inverse(f: Field) -> Field:
    """Unitary inverse FFT of a field."""
    return Field(f.grid, _ifftn(f.data))


def gradient_arrays(
    grid: GridSpec, data: np.ndarray, data_hat: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spectral partial derivatives ``(d1, d2, d3)`` as raw arrays.

    Pass ``data_hat`` (the unitary FFT of ``data``) to reuse a transform
    already computed by the caller.
    """
    if data_hat is None:
        data_hat = _fftn(data)
    ko = grid.freq_odd
    n = grid.n
    d1 = _ifftn(1j * ko.reshape(n, 1, 1) * data_hat)
    d2 = _ifftn(1j * ko.reshape(1, n, 1) * data_hat)
    d3 = _ifftn(1j * ko.reshape(1, 1, n) * data_hat)
    return d1, d2, d3


def laplacian_array(
    grid: GridSpec, data: np.ndarray, data_hat: np.ndarray | None = None
) -> np.ndarray:
    """Spectral Laplacian as a raw array (even symbol: Nyquist kept)."""
    if data_hat is None:
        data_hat = _fftn(data)
    return _ifftn(-grid.k2 * data_hat)


def spectral_gradient(f: Field) -> tuple[Field, Field, Field]:
    """Spectral gradient ``(d_1 f, d_2 f, d_3 f)`` of a field."""
    d1, d2, d3 = gradient_arrays(f.grid, f.data)
    return Field(f.grid, d1), Field(f.grid, d2), Field(f.grid, d3)


# --------------------------------------------------------------------------
# norms and pairings
# --------------------------------------------------------------------------


def lp_norm(f: Field, p: float) -> float:
    """Discrete Lebesgue norm with weight ``h^3``; ``p = inf`` for the sup."""
    if p == np.inf:
        return float(np.abs(f.data).max())
    if p <= 0:
        raise ValueError(f"lp_norm: p must be positive or inf, got {p}")
    absdata = np.abs(f.data)
    return float((np.sum(absdata**p) * f.grid.cell_volume) ** (1.0 / p))


def norms(f: Field) -> dict[str, float]:
    """All norms used by the diagnostics, in one pass.

    Returns a dict with keys ``l1, l2, l4, linf, h1, weight_x, sigma``
    where ``h1**2 = l2**2 + ||grad f||**2``, ``weight_x = || |x| f ||``,
    and ``sigma = h1 + weight_x`` (the trap-adapted energy-space norm).
    """
    grid = f.grid
    vol = grid.cell_volume
    abs2 = np.abs(f.data) ** 2
    l2sq = float(abs2.sum() * vol)
    l4 = float((np.sum(abs2**2) * vol) ** 0.25)
    l1 = float(np.sum(np.sqrt(abs2)) * vol)
    linf = float(np.sqrt(abs2.max()))
    data_hat = _fftn(f.data)
    hat2 = np.abs(data_hat) ** 2
    ko2 = grid.freq_odd**2
    n = grid.n
    gradsq = float(
        np.sum(
            (ko2.reshape(n, 1, 1) + ko2.reshape(1, n, 1) + ko2.reshape(1, 1, n)) * hat2
        )
        * vol
    )
    xsq = float(np.sum(grid.r2 * abs2) * vol)
    h1 = float(np.sqrt(l2sq + gradsq))
    weight_x = float(np.sqrt(xsq))
    return {
        "l1": l1,
        "l2": float(np.sqrt(l2sq)),
        "l4": l4,
        "linf": linf,
        "h1": h1,
        "weight_x": weight_x,
        "sigma": h1 + weight_x,
    }


def inner(f: Field, g: Field) -> complex:
    """Hermitian inner product ``sum(conj(f) * g) * h^3`` (conjugate-linear in f)."""
    if f.grid != g.grid:
        raise ValueError("inner: fields live on different grids")
    return complex(np.vdot(f.data, g.data) * f.grid.cell_volume)


def pairing(f: Field, g: Field) -> complex:
    """Bilinear (unconjugated) pairing ``sum(f * g) * h^3``.

    This is the pairing under which the dual propagator is the
    transpose of the forward one; it is *not* the Hermitian inner
    product.
    """
    if f.grid != g.grid:
        raise ValueError("pairing: fields live on different grids")
    return complex(np.sum(f.data * g.data) * f.grid.cell_volume)


def boundary_mass_fraction(f: Field, cells: int = 2) -> float:
    """Fraction of ``||f||^2`` within ``cells`` grid cells of the box boundary."""
    n = f.grid.n
    cells = int(min(max(cells, 1), n // 2))
    abs2 = np.abs(f.data) ** 2
    total = float(abs2.sum())
    if total == 0.0:
        return 0.0
    core = abs2[cells : n - cells, cells : n - cells, cells : n - cells]
    return float(1.0 - core.sum() / total)
