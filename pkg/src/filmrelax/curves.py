"""Closed marker curves and their differential geometry.

The phase boundary is a single closed curve carried by N Lagrangian
markers, uniformly spaced in a periodic parameter theta = 2*pi*i/N.
Derivatives in theta are computed spectrally, so all geometric quantities
(tangent, outward normal, curvature, arc weights, perimeter, enclosed
area) converge spectrally for smooth marker data.

Sign conventions: markers traverse the boundary counterclockwise with the
enclosed domain on the left; the normal points out of the domain; the
curvature is negative for a convex domain (kappa = -1/R on a circle of
radius R). With these choices the line-tension force density kappa*n
points inward on convex arcs and sum(kappa * w) = -2*pi on any simple
closed curve.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import GeometryError
from .spectral import PlaneField, evaluate_at_points


@dataclass(frozen=True)
class Curve:
    """Ordered marker positions (N, 2) of a closed counterclockwise curve."""

    points: np.ndarray
    counterclockwise: bool = True

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise GeometryError(f"points must have shape (N, 2), got {pts.shape}")
        if pts.shape[0] < 8:
            raise GeometryError(f"need at least 8 markers, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise GeometryError("marker positions must be finite")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def translated(self, offset) -> "Curve":
        return Curve(self.points + np.asarray(offset, dtype=float), self.counterclockwise)

    def rotated(self, angle: float) -> "Curve":
        c, s = np.cos(angle), np.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return Curve(self.points @ rot.T, self.counterclockwise)

    def scaled(self, factor: float) -> "Curve":
        return Curve(self.points * factor, self.counterclockwise)


@dataclass(frozen=True)
class CurveGeometry:
    """Per-marker geometry of a closed curve plus its integral invariants."""

    points: np.ndarray        # (N, 2)
    tangent: np.ndarray       # (N, 2) unit
    normal: np.ndarray        # (N, 2) unit, outward
    curvature: np.ndarray     # (N,), negative on convex arcs
    arc_weights: np.ndarray   # (N,), quadrature weights ds
    speed: np.ndarray         # (N,), |dgamma/dtheta|
    perimeter: float
    area: float

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _spectral_derivatives(pts: np.ndarray):
    """First and second theta-derivatives of the marker positions."""
    n = pts.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    kd1 = 1j * k.copy()
    kd1[n // 2] = 0.0  # drop the Nyquist mode in odd derivatives
    kd2 = -(k**2)
    hat = np.fft.fft(pts, axis=0)
    d1 = np.real(np.fft.ifft(kd1[:, None] * hat, axis=0))
    d2 = np.real(np.fft.ifft(kd2[:, None] * hat, axis=0))
    return d1, d2


def geometry(curve: Curve) -> CurveGeometry:
    """Evaluate all geometric quantities of a closed marker curve."""
    pts = curve.points
    n = curve.n
    gaps = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    scale = float(np.max(np.abs(pts - pts.mean(axis=0)))) or 1.0
    if np.min(gaps) < 1e-13 * scale:
        idx = int(np.argmin(gaps))
        raise GeometryError(
            f"markers {idx} and {(idx + 1) % n} coincide (gap {gaps[idx]:.3e})"
        )

    d1, d2 = _spectral_derivatives(pts)
    speed = np.linalg.norm(d1, axis=1)
    if np.min(speed) < 1e-13 * scale:
        idx = int(np.argmin(speed))
        raise GeometryError(f"parametrization degenerate at marker {idx}")

    dtheta = 2 * np.pi / n
    tangent = d1 / speed[:, None]
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    curvature = -cross / speed**3
    arc_weights = speed * dtheta
    perimeter = float(np.sum(arc_weights))
    area = 0.5 * float(np.sum(pts[:, 0] * d1[:, 1] - pts[:, 1] * d1[:, 0])) * dtheta

    if curve.counterclockwise and area <= 0:
        raise GeometryError(
            "marker order is clockwise but the curve is flagged counterclockwise"
        )
    return CurveGeometry(
        points=pts,
        tangent=tangent,
        normal=normal,
        curvature=curvature,
        arc_weights=arc_weights,
        speed=speed,
        perimeter=perimeter,
        area=area,
    )


def perimeter(curve: Curve) -> float:
    """Interface energy: the perimeter of the closed curve."""
    return geometry(curve).perimeter


def enclosed_area(curve: Curve) -> float:
    """Signed enclosed area via Green's theorem (positive when ccw)."""
    return geometry(curve).area


def perimeter_first_variation(geom: CurveGeometry, velocity, band: int | None = None) -> float:
    """Directional derivative of the perimeter along a displacement field.

    Returns -sum(kappa * (n . V) * ds); the minus sign pairs with the
    convention that curvature is negative on convex arcs. `velocity` is
    either per-marker values (N, 2) or a PlaneField, which is evaluated at
    the markers through its trigonometric interpolant.
    """
    if isinstance(velocity, PlaneField):
        v = evaluate_at_points(velocity, geom.points, band=band)
    else:
        v = np.asarray(velocity, dtype=float)
        if v.shape != geom.points.shape:
            raise ValueError(f"velocity shape {v.shape} != markers {geom.points.shape}")
    return -float(np.sum(geom.curvature * np.sum(geom.normal * v, axis=1) * geom.arc_weights))


# ----------------------------------------------------------------------
# trigonometric resampling

def evaluate_curve(curve: Curve, thetas: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of the curve at parameters."""
    pts = curve.points
    n = pts.shape[0]
    hat = np.fft.fftshift(np.fft.fft(pts, axis=0), axes=0)  # modes -N/2 .. N/2-1
    ext = np.zeros((n + 1, 2), dtype=complex)
    ext[:n] = hat
    ext[n] = 0.5 * ext[0]
    ext[0] *= 0.5
    kmodes = np.arange(-(n // 2), n // 2 + 1)
    phases = np.exp(1j * np.outer(np.asarray(thetas, dtype=float), kmodes))
    return np.real(phases @ ext) / n


def spectral_tail_fraction(curve: Curve, cutoff_fraction: float = 0.25) -> float:
    """Fraction of marker spectrum energy above the given mode fraction.

    Smoothness monitor: a well resolved curve has a negligible tail.
    """
    pts = curve.points - curve.points.mean(axis=0)
    hat = np.fft.fft(pts, axis=0)
    n = pts.shape[0]
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    energy = np.sum(np.abs(hat) ** 2, axis=1)
    total = float(np.sum(energy[k > 0]))
    tail = float(np.sum(energy[k >= cutoff_fraction * (n // 2)]))
    return tail / total if total > 0 else 0.0


# ----------------------------------------------------------------------
# simplicity (self-intersection) check

def is_simple(curve: Curve) -> bool:
    """True when no two non-adjacent segments of the polyline intersect.

    O(N^2) all-pairs orientation test; run every few steps at desk scale.
    """
    pts = curve.points
    n = pts.shape[0]
    a = pts
    b = np.roll(pts, -1, axis=0)

    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (
            q[..., 1] - p[..., 1]
        ) * (r[..., 0] - p[..., 0])

    ai = a[:, None, :]
    bi = b[:, None, :]
    aj = a[None, :, :]
    bj = b[None, :, :]
    d1 = orient(ai, bi, aj)
    d2 = orient(ai, bi, bj)
    d3 = orient(aj, bj, ai)
    d4 = orient(aj, bj, bi)
    crossing = (d1 * d2 < 0) & (d3 * d4 < 0)

    idx = np.arange(n)
    adjacent = (np.abs(idx[:, None] - idx[None, :]) <= 1) | (
        np.abs(idx[:, None] - idx[None, :]) == n - 1
    )
    return not bool(np.any(crossing & ~adjacent))


# ----------------------------------------------------------------------
# serialization: CSV rows with a JSON header line

def save_curve(curve: Curve, path, sim_time: float | None = None) -> None:
    """Write "index,x,y" rows after a JSON header comment line.

    Coordinates are written with shortest round-trip precision, so loading
    reproduces the doubles bit-exactly.
    """
    header = {
        "n": curve.n,
        "orientation": "ccw" if curve.counterclockwise else "cw",
        "time": sim_time,
        "written": datetime.now(timezone.utc).isoformat(),
    }
    lines = ["# " + json.dumps(header), "index,x,y"]
    for i, (x, y) in enumerate(curve.points):
        lines.append(f"{i},{float(x)!r},{float(y)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_curve(path) -> tuple[Curve, dict]:
    """Read a curve file written by save_curve; returns (curve, header)."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise GeometryError(f"{path}: missing JSON header line")
    header = json.loads(lines[0][1:].strip())
    rows = [ln.split(",") for ln in lines[1:] if not ln.startswith("index")]
    pts = np.array([[float(r[1]), float(r[2])] for r in rows])
    if header.get("n") != pts.shape[0]:
        raise GeometryError(
            f"{path}: header claims {header.get('n')} markers, file has {pts.shape[0]}"
        )
    if header.get("orientation") == "cw":
        pts = pts[::-1].copy()
    return Curve(pts), header
