"""Harmonic angle functions on the hyperbolic disk.

geodesic_angle(p, q, xi) is the angle at p between the hyperbolic
geodesic to q and the one running to the boundary point xi.  It is
computed by mapping the disk to the upper half-plane with xi at
infinity, where the angle has the closed form arg((P-Q)(P-conj(Q))).
Everything is defined modulo 2*pi; gradients are exact complex-analytic
expressions, with central finite differences available as a cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


TWO_PI = 2.0 * math.pi


def wrap_angle(x: float) -> float:
    """Reduce to (-pi, pi]."""
    y = math.fmod(x + math.pi, TWO_PI)
    if y <= 0.0:
        y += TWO_PI
    return y - math.pi


def to_halfplane(z: complex, xi_angle: float) -> complex:
    """Cayley-type map T(z) = i(xi+z)/(xi-z) sending the disk to the upper
    half-plane and the boundary point xi = exp(i xi_angle) to infinity."""
    xi = cmath.exp(1j * xi_angle)
    return 1j * (xi + z) / (xi - z)


def halfplane_map_derivative(z: complex, xi_angle: float) -> complex:
    """dT/dz = 2i xi / (xi - z)^2."""
    xi = cmath.exp(1j * xi_angle)
    return 2j * xi / (xi - z) ** 2


def _check_interior(z: complex, name: str):
    if abs(z) >= 1.0:
        raise ValueError("%s must lie strictly inside the unit disk" % name)


def geodesic_angle(p: complex, q: complex, xi_angle: float) -> float:
    """Harmonic angle phi_xi(p, q), returned in [0, 2*pi)."""
    if p == q:
        raise ValueError("p and q must be distinct")
    _check_interior(p, "p")
    _check_interior(q, "q")
    P = to_halfplane(p, xi_angle)
    Q = to_halfplane(q, xi_angle)
    val = cmath.phase(P - Q) + cmath.phase(P - Q.conjugate())
    return val % TWO_PI


def geodesic_angle_gradient(p: complex, q: complex, xi_angle: float):
    """(d/dx_p, d/dy_p, d/dx_q, d/dy_q) of the harmonic angle."""
    if p == q:
        raise ValueError("p and q must be distinct")
    _check_interior(p, "p")
    _check_interior(q, "q")
    P = to_halfplane(p, xi_angle)
    Q = to_halfplane(q, xi_angle)
    tp = halfplane_map_derivative(p, xi_angle)
    tq = halfplane_map_derivative(q, xi_angle)
    s1 = P - Q
    s2 = P - Q.conjugate()
    both = tp * (1.0 / s1 + 1.0 / s2)
    g_px = both.imag
    g_py = both.real
    g_qx = (-tq / s1).imag + (-tq.conjugate() / s2).imag
    g_qy = (-1j * tq / s1).imag + (1j * tq.conjugate() / s2).imag
    return (g_px, g_py, g_qx, g_qy)


def geodesic_angle_gradient_fd(p: complex, q: complex, xi_angle: float, step: float = 1e-6):
    """Central-difference gradient, branch-aware."""
    def d(center, move):
        hi = geodesic_angle(*move(center + step))
        lo = geodesic_angle(*move(center - step))
        return wrap_angle(hi - lo) / (2.0 * step)

    return (
        d(0.0, lambda h: (p + h, q, xi_angle)),
        d(0.0, lambda h: (p + 1j * h, q, xi_angle)),
        d(0.0, lambda h: (p, q + h, xi_angle)),
        d(0.0, lambda h: (p, q + 1j * h, xi_angle)),
    )


@dataclass(frozen=True)
class AngleContext:
    """Boundary data for alpha-weighted angles: m points xi_k pinned at
    strictly increasing angles, and one real weight alpha_k per point."""

    alphas: tuple
    boundary_angles: tuple

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "boundary_angles", tuple(float(t) for t in self.boundary_angles))
        if len(self.alphas) != len(self.boundary_angles):
            raise ValueError("alphas and boundary_angles must have equal length")
        angles = self.boundary_angles
        if any(not 0.0 <= t < TWO_PI for t in angles):
            raise ValueError("boundary angles must lie in [0, 2*pi)")
        if any(angles[i] >= angles[i + 1] for i in range(len(angles) - 1)):
            raise ValueError("boundary angles must be strictly increasing")

    @property
    def m(self) -> int:
        return len(self.alphas)

    @classmethod
    def standard(cls, alphas) -> "AngleContext":
        """Equally spaced boundary points starting at angle 0."""
        m = len(alphas)
        return cls(tuple(alphas), tuple(TWO_PI * k / m for k in range(m)))

    def boundary_point(self, k: int) -> complex:
        """xi_k as a point of the unit circle, 1-based."""
        return cmath.exp(1j * self.boundary_angles[k - 1])


def alpha_angle(ctx: AngleContext, p: complex, q: complex) -> float:
    """Weighted angle sum_k alpha_k phi_k(p, q), modulo 2*pi conventions."""
    return sum(
        a * geodesic_angle(p, q, t)
        for a, t in zip(ctx.alphas, ctx.boundary_angles)
        if a != 0.0
    )


def alpha_angle_gradient(ctx: AngleContext, p: complex, q: complex):
    """Weighted (d/dx_p, d/dy_p, d/dx_q, d/dy_q)."""
    out = [0.0, 0.0, 0.0, 0.0]
    for a, t in zip(ctx.alphas, ctx.boundary_angles):
        if a == 0.0:
            continue
        g = geodesic_angle_gradient(p, q, t)
        for i in range(4):
            out[i] += a * g[i]
    return tuple(out)


def key_lemma_residual(ctx: AngleContext, ctx2: AngleContext, p: complex, q_points,
                       scheme: str = "analytic", step: float = 1e-6) -> float:
    """Max q-gradient norm of alpha_angle(ctx,p,q) - alpha_angle(ctx2,p,q).

    Near zero iff the difference is independent of q, which holds whenever
    sum(alphas) matches between the two contexts.
    """
    if ctx.m != ctx2.m or ctx.boundary_angles != ctx2.boundary_angles:
        raise ValueError("contexts must share boundary data")
    if scheme not in ("analytic", "fd"):
        raise ValueError("scheme must be 'analytic' or 'fd'")
    q_points = list(q_points)
    if not q_points:
        raise ValueError("degenerate grid: no q points")
    deltas = [a - b for a, b in zip(ctx.alphas, ctx2.alphas)]
    worst = 0.0
    for q in q_points:
        gx = gy = 0.0
        for d, t in zip(deltas, ctx.boundary_angles):
            if d == 0.0:
                continue
            if scheme == "analytic":
                _, _, qx, qy = geodesic_angle_gradient(p, q, t)
            elif scheme == "fd":
                qx = wrap_angle(geodesic_angle(p, q + step, t) - geodesic_angle(p, q - step, t)) / (2 * step)
                qy = wrap_angle(geodesic_angle(p, q + 1j * step, t) - geodesic_angle(p, q - 1j * step, t)) / (2 * step)
            else:
                raise ValueError("scheme must be 'analytic' or 'fd'")
            gx += d * qx
            gy += d * qy
        worst = max(worst, math.hypot(gx, gy))
    return worst


# -- upper half-plane forms (the m=2 cross-check route) ----------------------

def harmonic_angle_halfplane(p: complex, q: complex) -> float:
    """arg((p-q)(p-conj(q))) for p in the open upper half-plane; q may lie
    on the real axis (a boundary target)."""
    if p == q:
        raise ValueError("p and q must be distinct")
    if p.imag <= 0:
        raise ValueError("p must lie in the open upper half-plane")
    return cmath.phase((p - q) * (p - q.conjugate())) % TWO_PI


def harmonic_angle_halfplane_gradient(p: complex, q: complex):
    """(d/dx_p, d/dy_p, d/dx_q, d/dy_q) of the half-plane harmonic angle."""
    s1 = p - q
    s2 = p - q.conjugate()
    both = 1.0 / s1 + 1.0 / s2
    g_px = both.imag
    g_py = both.real
    g_qx = (-1.0 / s1).imag + (-1.0 / s2).imag
    g_qy = (-1j / s1).imag + (1j / s2).imag
    return (g_px, g_py, g_qx, g_qy)
