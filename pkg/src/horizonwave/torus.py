"""Flat spatial torus underlying all Fourier representations.

The torus carries the collocation grid, the integer mode lattice and the
metric-adjusted wavenumbers ``2*pi*k/P`` used by every spectral operation.
All built-in geometries use the flat metric, so the wavenumber arrays are
exact multipliers for differentiation and fractional Sobolev weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class SpatialTorus:
    """An n-dimensional torus with fixed periods and Fourier resolution.

    Immutable after construction; grids and wavenumber arrays are cached
    eagerly so concurrent reads are safe.
    """

    dims: int
    periods: tuple[float, ...]
    resolution: tuple[int, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.dims < 1:
            raise ValidationError("torus needs dims >= 1")
        if len(self.periods) != self.dims or len(self.resolution) != self.dims:
            raise ValidationError("periods and resolution must match dims")
        if any(p <= 0 for p in self.periods):
            raise ValidationError("every period must be positive")
        for n in self.resolution:
            if n < 4 or n % 2 != 0:
                raise ValidationError("every resolution must be even and >= 4")
        object.__setattr__(self, "periods", tuple(float(p) for p in self.periods))
        object.__setattr__(self, "resolution", tuple(int(n) for n in self.resolution))

    @property
    def volume(self) -> float:
        return float(np.prod(self.periods))

    @property
    def npoints(self) -> int:
        return int(np.prod(self.resolution))

    def axes(self) -> list[np.ndarray]:
        """Collocation points per axis, x_j = j*P/N."""
        if "axes" not in self._cache:
            self._cache["axes"] = [
                np.arange(n) * (p / n) for p, n in zip(self.periods, self.resolution)
            ]
        return self._cache["axes"]

    def grids(self) -> list[np.ndarray]:
        """Meshgrid (ij indexing) of collocation coordinates."""
        if "grids" not in self._cache:
            self._cache["grids"] = list(np.meshgrid(*self.axes(), indexing="ij"))
        return self._cache["grids"]

    def modes(self) -> list[np.ndarray]:
        """Integer Fourier mode index per axis in FFT ordering."""
        if "modes" not in self._cache:
            self._cache["modes"] = [
                np.fft.fftfreq(n, d=1.0 / n).astype(np.int64) for n in self.resolution
            ]
        return self._cache["modes"]

    def wavenumbers(self) -> list[np.ndarray]:
        """Broadcastable arrays of adjusted frequencies 2*pi*k/P per axis."""
        if "wavenumbers" not in self._cache:
            out = []
            for axis, (k, p) in enumerate(zip(self.modes(), self.periods)):
                shape = [1] * self.dims
                shape[axis] = len(k)
                out.append((2.0 * np.pi / p) * k.astype(float).reshape(shape))
            self._cache["wavenumbers"] = out
        return self._cache["wavenumbers"]

    def wavenumber_norm2(self) -> np.ndarray:
        """|k_tilde|^2 on the full mode lattice."""
        if "k2" not in self._cache:
            k2 = np.zeros(self.resolution)
            for kt in self.wavenumbers():
                k2 = k2 + kt**2
            self._cache["k2"] = k2
        return self._cache["k2"]

    def mode_tuples(self) -> np.ndarray:
        """Array of shape (npoints, dims) listing integer modes in C order."""
        if "mode_tuples" not in self._cache:
            mesh = np.meshgrid(*self.modes(), indexing="ij")
            self._cache["mode_tuples"] = np.stack(
                [m.reshape(-1) for m in mesh], axis=-1
            )
        return self._cache["mode_tuples"]

    def directional_wavenumber(self, v) -> np.ndarray:
        """v . k_tilde on the mode lattice for a constant direction v."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dims,):
            raise ValidationError(f"direction must have {self.dims} entries")
        out = np.zeros(self.resolution)
        for vi, kt in zip(v, self.wavenumbers()):
            out = out + vi * kt
        return out

    def compatible(self, other: "SpatialTorus") -> bool:
        return (
            self.dims == other.dims
            and self.periods == other.periods
            and self.resolution == other.resolution
        )
