"""Fourier representation of real fields on the spatial torus.

A :class:`Field` stores one complex coefficient array per component in FFT
ordering, normalised so that ``f(x) = sum_k c_k exp(i k~ . x)``.  Real fields
keep the full spectrum with Hermitian symmetry; every nonlinear operation
re-symmetrises through a physical-space round trip (imaginary residuals are
checked against a 1e-13 budget and dropped).

Products use 3/2-rule zero padding, which is exact for the quadratic
nonlinearities exercised by the solvers.  Fractional Sobolev norms are the
plain multiplier norms ``|| (1+Delta)^{s/2} f ||_{L2}`` of the flat torus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .torus import SpatialTorus

_HERMITIAN_TOL = 1e-13


@dataclass(frozen=True)
class Field:
    """A real scalar (d = 1) or R^d-valued function stored spectrally.

    ``coeffs`` has shape ``(components, *resolution)``.  Fields are immutable
    values; all operations return new fields.
    """

    torus: SpatialTorus
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim == self.torus.dims:
            c = c[np.newaxis, ...]
        if c.shape[1:] != self.torus.resolution:
            raise ValidationError(
                f"coefficient shape {c.shape} does not match torus resolution "
                f"{self.torus.resolution}"
            )
        object.__setattr__(self, "coeffs", c)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_values(cls, torus: SpatialTorus, values: np.ndarray) -> "Field":
        """Build from grid samples (shape (*res,) or (d, *res))."""
        v = np.asarray(values, dtype=float)
        if v.ndim == torus.dims:
            v = v[np.newaxis, ...]
        if v.shape[1:] != torus.resolution:
            raise ValidationError("value grid does not match torus resolution")
        c = np.fft.fftn(v, axes=range(1, torus.dims + 1)) / torus.npoints
        return cls(torus, c)

    @classmethod
    def constant(cls, torus: SpatialTorus, value, components: int = 1) -> "Field":
        vals = np.asarray(value, dtype=float).reshape(-1)
        if components == 1 and vals.size > 1:
            components = vals.size
        if vals.size == 1:
            vals = np.full(components, vals[0])
        if vals.size != components:
            raise ValidationError("constant vector length must equal components")
        c = np.zeros((components, *torus.resolution), dtype=np.complex128)
        zero_mode = (slice(None),) + (0,) * torus.dims
        c[zero_mode] = vals
        return cls(torus, c)

    @classmethod
    def zero(cls, torus: SpatialTorus, components: int = 1) -> "Field":
        return cls(torus, np.zeros((components, *torus.resolution), dtype=np.complex128))

    @classmethod
    def from_function(cls, torus: SpatialTorus, fn) -> "Field":
        """Sample ``fn(*grids)`` on the collocation grid."""
        return cls.from_values(torus, np.asarray(fn(*torus.grids()), dtype=float))

    # -- basic structure ---------------------------------------------------

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    def values(self) -> np.ndarray:
        """Real grid samples, shape (d, *res); squeeze with [0] for scalars."""
        v = np.fft.ifftn(self.coeffs, axes=range(1, self.torus.dims + 1)) * self.torus.npoints
        return v.real

    def scalar_values(self) -> np.ndarray:
        if self.components != 1:
            raise ValidationError("scalar_values requires a single-component field")
        return self.values()[0]

    def hermitian_defect(self) -> float:
        """Max imaginary residual of the grid samples (0 for real fields)."""
        v = np.fft.ifftn(self.coeffs, axes=range(1, self.torus.dims + 1)) * self.torus.npoints
        return float(np.max(np.abs(v.imag))) if v.size else 0.0

    def resymmetrized(self) -> "Field":
        """Project onto real fields; raise if the defect exceeds the budget."""
        scale = max(1.0, float(np.max(np.abs(self.coeffs))) * self.torus.npoints)
        if self.hermitian_defect() > _HERMITIAN_TOL * scale:
            raise ValidationError("field lost Hermitian symmetry beyond tolerance")
        return Field.from_values(self.torus, self.values())

    # -- arithmetic --------------------------------------------------------

    def _check_same_torus(self, other: "Field"):
        if not self.torus.compatible(other.torus):
            raise ValidationError("fields live on different tori")

    def __add__(self, other):
        if isinstance(other, Field):
            self._check_same_torus(other)
            return Field(self.torus, self.coeffs + other.coeffs)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check_same_torus(other)
            return Field(self.torus, self.coeffs - other.coeffs)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return Field(self.torus, self.coeffs * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.torus, -self.coeffs)

    def component(self, i: int) -> "Field":
        return Field(self.torus, self.coeffs[i : i + 1])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values())))


# -- spectral operations ----------------------------------------------------


def derivative(f: Field, axis: int, order: int = 1) -> Field:
    """Spectral partial derivative: mode k picks up (i 2 pi k/P)^order."""
    if not 0 <= axis < f.torus.dims:
        raise ValidationError(f"axis {axis} out of range for {f.torus.dims}-d torus")
    mult = (1j * f.torus.wavenumbers()[axis]) ** order
    return Field(f.torus, f.coeffs * mult)


def directional_derivative(f: Field, v) -> Field:
    """Derivative along the constant direction v: multiplier i (v . k~)."""
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) == 0.0:
        raise ValidationError("direction must be non-zero")
    return Field(f.torus, f.coeffs * (1j * f.torus.directional_wavenumber(v)))


def _padded_shape(res: tuple[int, ...]) -> tuple[int, ...]:
    # 3/2-rule: pad to the next even integer >= 3N/2.
    out = []
    for n in res:
        m = (3 * n + 1) // 2
        if m % 2:
            m += 1
        out.append(m)
    return tuple(out)


def _pad_spectrum(c: np.ndarray, res, padded) -> np.ndarray:
    big = np.zeros((c.shape[0], *padded), dtype=np.complex128)
    index = [slice(None)]
    for n in res:
        half = n // 2
        index.append(np.r_[0:half, -half:0])
    np_index = np.ix_(range(c.shape[0]), *index[1:])
    big[np_index] = c
    return big


def _truncate_spectrum(big: np.ndarray, res) -> np.ndarray:
    index = [slice(None)]
    for n in res:
        half = n // 2
        index.append(np.r_[0:half, -half:0])
    np_index = np.ix_(range(big.shape[0]), *index[1:])
    return big[np_index]


def multiply(f: Field, g: Field) -> Field:
    """Pointwise product via padded transform (3/2-rule dealiased).

    Componentwise when shapes match; a scalar factor broadcasts over the
    other field's components.
    """
    f._check_same_torus(g)
    res = f.torus.resolution
    padded = _padded_shape(res)
    npad = int(np.prod(padded))
    axes = tuple(range(1, f.torus.dims + 1))
    fa = (np.fft.ifftn(_pad_spectrum(f.coeffs, res, padded), axes=axes) * npad).real
    ga = (np.fft.ifftn(_pad_spectrum(g.coeffs, res, padded), axes=axes) * npad).real
    if f.components == g.components:
        prod = fa * ga
    elif f.components == 1:
        prod = fa[0][np.newaxis] * ga
    elif g.components == 1:
        prod = fa * ga[0][np.newaxis]
    else:
        raise ValidationError("component mismatch in product")
    big = np.fft.fftn(prod, axes=axes) / npad
    return Field(f.torus, _truncate_spectrum(big, res))


def l2_norm(f: Field) -> float:
    """L2 norm over the torus (flat volume element)."""
    return float(np.sqrt(f.torus.volume * np.sum(np.abs(f.coeffs) ** 2)))


def l2_inner(f: Field, g: Field) -> float:
    f._check_same_torus(g)
    return float(f.torus.volume * np.real(np.sum(f.coeffs * np.conj(g.coeffs))))


def sobolev_norm(f: Field, s: float, sigma=None) -> float:
    """|| (1 + Delta)^{s/2} f ||_{L2} via the exact flat-torus multiplier.

    ``sigma`` is accepted for interface completeness; only the flat metric
    (None or an identity matrix) is supported.
    """
    if sigma is not None:
        sig = np.asarray(sigma, dtype=float)
        if sig.shape != (f.torus.dims, f.torus.dims) or not np.allclose(
            sig, np.eye(f.torus.dims)
        ):
            raise ValidationError("only the flat (identity) metric is supported")
    weight = (1.0 + f.torus.wavenumber_norm2()) ** s
    total = np.sum(weight[np.newaxis, ...] * np.abs(f.coeffs) ** 2)
    return float(np.sqrt(f.torus.volume * total))


def convolve_reference(f: Field, g: Field) -> Field:
    """Direct coefficient-space convolution (O(N^2) oracle for multiply)."""
    f._check_same_torus(g)
    if f.components != 1 or g.components != 1:
        raise ValidationError("reference convolution is scalar only")
    res = f.torus.resolution
    modes = f.torus.modes()
    out = np.zeros(res, dtype=np.complex128)
    fc = f.coeffs[0]
    gc = g.coeffs[0]
    flat = f.torus.mode_tuples()
    halves = [n // 2 for n in res]
    index_of = []
    for axis, n in enumerate(res):
        lookup = {int(k): i for i, k in enumerate(modes[axis])}
        index_of.append(lookup)
    for row, kf in enumerate(flat):
        cf = fc.reshape(-1)[row]
        if cf == 0:
            continue
        for row2, kg in enumerate(flat):
            cg = gc.reshape(-1)[row2]
            if cg == 0:
                continue
            ks = kf + kg
            ok = True
            idx = []
            for axis, k in enumerate(ks):
                if not (-halves[axis] <= k < halves[axis]):
                    ok = False
                    break
                idx.append(index_of[axis][int(k)])
            if ok:
                out[tuple(idx)] += cf * cg
    return Field(f.torus, out[np.newaxis])


# -- serialization -----------------------------------------------------------


def field_to_csv(f: Field, path):
    """Grid samples as CSV: one coordinate column per axis, one per component."""
    grids = f.torus.grids()
    vals = f.values()
    header = [f"x{i + 1}" for i in range(f.torus.dims)]
    header += (
        ["value"] if f.components == 1 else [f"u{i + 1}" for i in range(f.components)]
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        coords = [g.reshape(-1) for g in grids]
        comps = [vals[i].reshape(-1) for i in range(f.components)]
        for row in range(f.torus.npoints):
            cells = [repr(float(c[row])) for c in coords]
            cells += [repr(float(c[row])) for c in comps]
            fh.write(",".join(cells) + "\n")


def field_to_binary(f: Field, path, manifest_path=None):
    """Raw little-endian coefficient dump (interleaved re/im f64, C order)."""
    data = np.ascontiguousarray(f.coeffs.astype("<c16"))
    with open(path, "wb") as fh:
        fh.write(data.tobytes(order="C"))
    if manifest_path is not None:
        manifest = {
            "components": f.components,
            "resolution": list(f.torus.resolution),
            "periods": list(f.torus.periods),
            "layout": "little-endian float64 interleaved re/im, row-major modes",
        }
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")


def field_from_binary(torus: SpatialTorus, path, components: int = 1) -> Field:
    raw = np.fromfile(path, dtype="<c16")
    expected = components * torus.npoints
    if raw.size != expected:
        raise ValidationError(
            f"binary dump holds {raw.size} coefficients, expected {expected}"
        )
    return Field(torus, raw.reshape((components, *torus.resolution)).astype(np.complex128))
