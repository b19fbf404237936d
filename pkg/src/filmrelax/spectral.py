"""Doubly periodic spectral calculus on the film surface.

The surface is discretized as an M x M periodic grid over a square box of
side L centered at the origin. All operators here are Fourier multipliers:
the solenoidal (Leray) projection, signed powers of the half-Laplacian
(the Dirichlet-to-Neumann operator of the decaying harmonic extension into
the subfluid), spectral derivatives, and surface-pressure recovery.

Conventions, fixed once for the whole package:
  * samples live at x_i = -L/2 + i*h with h = L/M, axis 0 is x, axis 1 is y;
  * wavevectors are xi = 2*pi*k/L with integer k in [-M/2, M/2);
  * the grid inner product is <f, g> = h^2 * sum(f*g), which matches the
    Fourier-side sum (L^2/M^4) * sum(fhat * conj(ghat)) by Parseval.

Plans are immutable and shareable; every operation is a pure function of
its inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ZeroModeError

ZERO_MEAN_RTOL = 1e-10  # guard for the inverse half-Laplacian


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SpectralPlan:
    """Grid dimensions, box size, and precomputed Fourier symbols."""

    size: int
    box: float
    dealias: bool = False

    spacing: float = field(init=False, repr=False)
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)
    kx: np.ndarray = field(init=False, repr=False)
    ky: np.ndarray = field(init=False, repr=False)
    k2: np.ndarray = field(init=False, repr=False)
    kabs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not _is_power_of_two(self.size) or self.size < 32:
            raise ValueError(f"grid size must be a power of two >= 32, got {self.size}")
        if not self.box > 0:
            raise ValueError(f"box side must be positive, got {self.box}")
        m, ell = self.size, float(self.box)
        h = ell / m
        coords = -ell / 2 + h * np.arange(m)
        k1d = 2 * np.pi * np.fft.fftfreq(m, d=h)
        kx, ky = np.meshgrid(k1d, k1d, indexing="ij")
        k2 = kx**2 + ky**2
        for name, val in (
            ("spacing", h),
            ("x", coords),
            ("y", coords),
            ("kx", kx),
            ("ky", ky),
            ("k2", k2),
            ("kabs", np.sqrt(k2)),
        ):
            object.__setattr__(self, name, val)

    @property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask, for optional advection diagnostics only."""
        kmax = np.pi * self.size / self.box
        return (np.abs(self.kx) < (2 / 3) * kmax) & (np.abs(self.ky) < (2 / 3) * kmax)

    def meshgrid(self):
        return np.meshgrid(self.x, self.y, indexing="ij")


@dataclass
class PlaneField:
    """A sampled scalar (M, M) or surface vector (2, M, M) field on z = 0."""

    values: np.ndarray
    plan: SpectralPlan
    solenoidal: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        m = self.plan.size
        if self.values.shape not in ((m, m), (2, m, m)):
            raise ValueError(
                f"field shape {self.values.shape} does not match plan size {m}"
            )

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 3

    @property
    def components(self) -> int:
        return 2 if self.is_vector else 1

    def copy(self) -> "PlaneField":
        return replace(self, values=self.values.copy())


def scalar_field(plan: SpectralPlan, values) -> PlaneField:
    return PlaneField(np.asarray(values, dtype=float), plan)

def vector_field(plan: SpectralPlan, vx, vy, solenoidal: bool = False) -> PlaneField:
    return PlaneField(np.stack([vx, vy]).astype(float), plan, solenoidal=solenoidal)


# ----------------------------------------------------------------------
# inner products and norms

def inner(f: PlaneField, g: PlaneField) -> float:
    """Grid L2 inner product h^2 * sum(f . g), summed over components."""
    return float(np.sum(f.values * g.values)) * f.plan.spacing**2

def l2_norm(f: PlaneField) -> float:
    return float(np.sqrt(max(inner(f, f), 0.0)))

def max_norm(f: PlaneField) -> float:
    return float(np.max(np.abs(f.values))) if f.values.size else 0.0

def spectral_inner(f: PlaneField, g: PlaneField) -> float:
    """Fourier-side inner product; equals inner() by Parseval."""
    m, ell = f.plan.size, f.plan.box
    fh = np.fft.fft2(f.values)
    gh = np.fft.fft2(g.values)
    return float(np.real(np.sum(fh * np.conj(gh)))) * ell**2 / m**4


# ----------------------------------------------------------------------
# Fourier multiplier operators

def _each_component(values: np.ndarray):
    return values if values.ndim == 3 else values[None, ...]


def _apply_multiplier(values: np.ndarray, mult: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    comps = _each_component(values)
    res = _each_component(out)
    for c in range(comps.shape[0]):
        res[c] = np.real(np.fft.ifft2(mult * np.fft.fft2(comps[c])))
    return out


def leray_project(f: PlaneField) -> PlaneField:
    """Project a surface vector field onto its divergence-free part.

    In Fourier space w_hat = (I - xi xi^T / |xi|^2) f_hat; the zero mode is
    kept unchanged (the projector is the identity on constants), so the
    removed part is the gradient of a periodic surface pressure.
    """
    if not f.is_vector:
        raise ValueError("leray_project expects a vector field")
    p = f.plan
    fxh = np.fft.fft2(f.values[0])
    fyh = np.fft.fft2(f.values[1])
    k2 = np.where(p.k2 == 0, 1.0, p.k2)
    dot = (p.kx * fxh + p.ky * fyh) / k2
    wx = np.real(np.fft.ifft2(fxh - p.kx * dot))
    wy = np.real(np.fft.ifft2(fyh - p.ky * dot))
    return vector_field(p, wx, wy, solenoidal=True)


def half_laplacian(f: PlaneField, power: int) -> PlaneField:
    """Apply |xi|^power componentwise, for power in {+1, -1}.

    power=+1 is the Dirichlet-to-Neumann operator of the decaying harmonic
    extension into the subfluid; power=-1 is its inverse on zero-mean
    fields. The zero mode maps to zero either way; applying the inverse to
    a field with a nonzero mean raises ZeroModeError, which in the coupled
    pipeline signals that force spreading lost the closed-curve
    zero-net-force identity.
    """
    if power not in (+1, -1):
        raise ValueError(f"power must be +1 or -1, got {power}")
    p = f.plan
    if power == -1:
        for comp in _each_component(f.values):
            scale = float(np.max(np.abs(comp)))
            if scale > 0 and abs(float(np.mean(comp))) > ZERO_MEAN_RTOL * scale:
                raise ZeroModeError(
                    "inverse half-Laplacian requires zero-mean input; "
                    f"component mean {float(np.mean(comp)):.3e} exceeds "
                    f"{ZERO_MEAN_RTOL:.0e} x max|f| = {ZERO_MEAN_RTOL * scale:.3e}"
                )
        mult = np.where(p.kabs == 0, 0.0, 1.0 / np.where(p.kabs == 0, 1.0, p.kabs))
    else:
        mult = p.kabs
    return PlaneField(_apply_multiplier(f.values, mult), p, solenoidal=f.solenoidal)


def derivative(f: PlaneField, axis: int) -> PlaneField:
    """Spectral partial derivative along axis 0 (x) or 1 (y)."""
    p = f.plan
    mult = 1j * (p.kx if axis == 0 else p.ky)
    out = np.empty_like(f.values)
    comps = _each_component(f.values)
    res = _each_component(out)
    for c in range(comps.shape[0]):
        res[c] = np.real(np.fft.ifft2(mult * np.fft.fft2(comps[c])))
    return PlaneField(out, p)


def gradient(f: PlaneField) -> PlaneField:
    """Horizontal gradient (d/dx, d/dy) of a scalar field."""
    if f.is_vector:
        raise ValueError("gradient expects a scalar field")
    p = f.plan
    fh = np.fft.fft2(f.values)
    gx = np.real(np.fft.ifft2(1j * p.kx * fh))
    gy = np.real(np.fft.ifft2(1j * p.ky * fh))
    return vector_field(p, gx, gy)


def skew_gradient(f: PlaneField) -> PlaneField:
    """Rotated gradient (-d/dy, d/dx); exactly solenoidal on the grid."""
    if f.is_vector:
        raise ValueError("skew_gradient expects a scalar field")
    p = f.plan
    fh = np.fft.fft2(f.values)
    vx = np.real(np.fft.ifft2(-1j * p.ky * fh))
    vy = np.real(np.fft.ifft2(1j * p.kx * fh))
    return vector_field(p, vx, vy, solenoidal=True)


def surface_divergence(f: PlaneField) -> PlaneField:
    """Spectral divergence d(f1)/dx + d(f2)/dy of a surface vector field."""
    if not f.is_vector:
        raise ValueError("surface_divergence expects a vector field")
    p = f.plan
    div_hat = 1j * p.kx * np.fft.fft2(f.values[0]) + 1j * p.ky * np.fft.fft2(f.values[1])
    return scalar_field(p, np.real(np.fft.ifft2(div_hat)))


def recover_surface_pressure(f_total: PlaneField) -> PlaneField:
    """Surface pressure whose horizontal gradient is the non-solenoidal part.

    Pi_hat = -i xi . f_hat / |xi|^2, zero mode set to zero (the pressure is
    only determined up to a constant).
    """
    if not f_total.is_vector:
        raise ValueError("recover_surface_pressure expects a vector field")
    p = f_total.plan
    fxh = np.fft.fft2(f_total.values[0])
    fyh = np.fft.fft2(f_total.values[1])
    k2 = np.where(p.k2 == 0, 1.0, p.k2)
    pi_hat = -1j * (p.kx * fxh + p.ky * fyh) / k2
    pi_hat[0, 0] = 0.0
    return scalar_field(p, np.real(np.fft.ifft2(pi_hat)))


def subtract_mean(f: PlaneField) -> PlaneField:
    out = f.values.copy()
    for comp in _each_component(out):
        comp -= comp.mean()
    return PlaneField(out, f.plan, solenoidal=f.solenoidal)


# ----------------------------------------------------------------------
# band-limited random fields (audit test vectors, verification inputs)

def random_band_scalar(
    plan: SpectralPlan,
    rng: np.random.Generator,
    band: int,
    min_mode: int = 1,
    rms: float = 1.0,
) -> PlaneField:
    """Random real scalar with spectrum supported on min_mode <= |k| <= band."""
    if not 1 <= min_mode <= band < plan.size // 2:
        raise ValueError(f"band [{min_mode}, {band}] invalid for M={plan.size}")
    noise = rng.standard_normal((plan.size, plan.size))
    nh = np.fft.fft2(noise)
    k1d = np.fft.fftfreq(plan.size, d=1.0 / plan.size)
    kxi, kyi = np.meshgrid(k1d, k1d, indexing="ij")
    kmag = np.sqrt(kxi**2 + kyi**2)
    nh[(kmag < min_mode) | (kmag > band)] = 0.0
    out = np.real(np.fft.ifft2(nh))
    scale = float(np.sqrt(np.mean(out**2)))
    if scale > 0:
        out *= rms / scale
    return scalar_field(plan, out)


def random_solenoidal_field(
    plan: SpectralPlan,
    rng: np.random.Generator,
    band: int,
    min_mode: int = 1,
    rms: float = 1.0,
) -> PlaneField:
    """Random zero-mean solenoidal vector field, the skew gradient of a
    band-limited stream function."""
    psi = random_band_scalar(plan, rng, band, min_mode=min_mode)
    v = skew_gradient(psi)
    scale = float(np.sqrt(np.mean(v.values**2)))
    if scale > 0:
        v.values *= rms / scale
    return v


# ----------------------------------------------------------------------
# off-grid evaluation of the trigonometric interpolant

def evaluate_at_points(f: PlaneField, points: np.ndarray, band: int | None = None) -> np.ndarray:
    """Evaluate the trigonometric interpolant of a field at arbitrary points.

    The Nyquist modes are split symmetrically so that the interpolant is
    real and reproduces the grid samples. Pass band=k to restrict the sum
    to modes |kx|,|ky| <= k (exact and much cheaper for band-limited
    fields). Returns shape (npts,) for scalars, (npts, 2) for vectors.
    """
    p = f.plan
    m = p.size
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    comps = _each_component(f.values)

    # symmetrized spectrum on modes -M/2 .. +M/2 inclusive
    kmodes = np.concatenate([np.arange(-m // 2, 0), np.arange(0, m // 2 + 1)])
    xi = 2 * np.pi * kmodes / p.box
    lo = 0 if band is None else np.searchsorted(kmodes, -band)
    hi = kmodes.size if band is None else np.searchsorted(kmodes, band, side="right")

    ex = np.exp(1j * np.outer(pts[:, 0] - p.x[0], xi[lo:hi]))
    ey = np.exp(1j * np.outer(pts[:, 1] - p.y[0], xi[lo:hi]))

    out = np.empty((pts.shape[0], comps.shape[0]))
    for c in range(comps.shape[0]):
        ch = np.fft.fftshift(np.fft.fft2(comps[c]))  # modes -M/2 .. M/2-1
        ext = np.zeros((m + 1, m + 1), dtype=complex)
        ext[:m, :m] = ch
        # split the -M/2 row/column between -M/2 and +M/2
        ext[m, :] = ext[0, :]
        ext[0, :] *= 0.5
        ext[m, :] *= 0.5
        ext[:, m] = ext[:, 0]
        ext[:, 0] *= 0.5
        ext[:, m] *= 0.5
        block = ext[lo:hi, lo:hi]
        out[:, c] = np.real(np.einsum("pa,ap->p", ex, block @ ey.T)) / m**2
    return out[:, 0] if not f.is_vector else out


# ----------------------------------------------------------------------
# raw binary field dump (row-major little-endian float64 + JSON sidecar)

def dump_field(f: PlaneField, path) -> None:
    path = str(path)
    f.values.astype("<f8").tofile(path)
    sidecar = {
        "components": f.components,
        "size": f.plan.size,
        "box": f.plan.box,
        "solenoidal": f.solenoidal,
        "dtype": "<f8",
        "order": "C",
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2)


def load_field(path) -> PlaneField:
    path = str(path)
    with open(path + ".json") as fh:
        meta = json.load(fh)
    raw = np.fromfile(path, dtype="<f8")
    m = meta["size"]
    shape = (m, m) if meta["components"] == 1 else (2, m, m)
    plan = SpectralPlan(m, meta["box"])
    return PlaneField(raw.reshape(shape), plan, solenoidal=meta.get("solenoidal", False))
