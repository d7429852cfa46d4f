"""The cone-side geometry: rank-one cone, horizontal lifts, (x, pi) data.

The punctured quaternionic space fibers over the rank-one cone through
Z -> n Z Z^dag, with unit quaternions acting on the right as the fiber
group.  The connection splits velocities into vertical and horizontal
parts; the horizontal lift of a tangent vector xdot at x = n Z Z^dag is

    Zdot = (xdot Z - (Re tr xdot / 2) Z) / (n |Z|^2),

characterized by n(Zdot Z^dag + Z Zdot^dag) = xdot and Im(Z^dag Zdot) = 0.
The momentum pi lives in the tangent space of the cone and is pinned by
its pairings <pi|xdot> against tangent vectors; the key identity
<pi | u o x> = <W, uZ>/2 connects it to the upstairs family.
"""

from __future__ import annotations

import numpy as np

from . import jordan
from .poisson import DOMAIN_EPS
from .quat import QVector, dagger_product, mat_apply, trace_re, outer

_TANGENT_TOL = 1e-10


class ConePoint:
    """A rank-one cone point x = n Z Z^dag with r = Re tr(x)/n = |Z|^2."""

    __slots__ = ("x", "r", "n")

    def __init__(self, x, r):
        self.x = x
        self.r = float(r)
        self.n = x.n

    def __repr__(self):
        return "ConePoint(n=%d, r=%.6g)" % (self.n, self.r)


def cone_point(z):
    """The cone point n Z Z^dag for Z != 0."""
    if z.norm() <= DOMAIN_EPS:
        raise ValueError("cone point requires Z != 0")
    x = jordan.HermElement._trusted(outer(z, z).scale(float(z.n)))
    return ConePoint(x, z.norm() ** 2)


def _spanning_tangents(z):
    """The spanning set n(v Z^dag + Z v^dag) over coordinate directions v."""
    n = z.n
    out = []
    for idx in range(4 * n):
        flat = np.zeros(4 * n)
        flat[idx] = 1.0
        v = QVector.from_flat(flat)
        m = (outer(v, z) + outer(z, v)).scale(float(n))
        out.append(jordan.HermElement._trusted(m))
    return out

def tangent_basis(z):
    """Orthonormal basis of the cone tangent space at n Z Z^dag; 4n-3 elements.

    Gram-Schmidt over the coordinate spanning set, dropping directions whose
    residual norm falls below tolerance (the three fiber directions).
    """
    if z.norm() <= DOMAIN_EPS:
        raise ValueError("tangent basis requires Z != 0")
    basis = []
    for cand in _spanning_tangents(z):
        v = cand
        for b in basis:
            v = v - b.scale(jordan.inner(b, v))
        nrm = np.sqrt(max(jordan.inner(v, v), 0.0))
        if nrm > _TANGENT_TOL * max(1.0, cand.norm()):
            basis.append(v.scale(1.0 / nrm))
    return basis


def _tangent_project(z, u, basis=None):
    basis = basis if basis is not None else tangent_basis(z)
    coeff = np.array([jordan.inner(b, u) for b in basis])
    proj = jordan.HermElement._trusted(jordan.identity(z.n).mat.scale(0.0))
    for c, b in zip(coeff, basis):
        proj = proj + b.scale(c)
    return proj, coeff


def horizontal_lift(z, xdot):
    """The horizontal lift Zdot of a tangent vector xdot at n Z Z^dag."""
    if z.norm() <= DOMAIN_EPS:
        raise ValueError("horizontal lift requires Z != 0")
    proj, _ = _tangent_project(z, xdot)
    if (proj - xdot).norm() > 1e-8 * max(1.0, xdot.norm()):
        raise ValueError("xdot is not tangent to the cone at this point")
    xdot = proj
    scale = 1.0 / (z.n * z.norm() ** 2)
    lead = mat_apply(xdot.mat, z)
    shift = z.scale(0.5 * trace_re(xdot.mat))
    return (lead - shift).scale(scale)


class CotangentData:
    """A cone point with its tangent-space momentum pi.

    Built from an upstairs pair (Z, W), which is retained: the downstairs
    X_u for u != e is evaluated through the upstairs identification.
    """

    __slots__ = ("x", "pi", "z", "w")

    def __init__(self, x, pi, z=None, w=None):
        if z is not None:
            proj, _ = _tangent_project(z, pi)
            if (proj - pi).norm() > _TANGENT_TOL * max(1.0, pi.norm()):
                raise ValueError("pi is not tangent to the cone")
        self.x = x
        self.pi = pi
        self.z = z
        self.w = w

    def __repr__(self):
        return "CotangentData(n=%d, r=%.6g)" % (self.x.n, self.x.r)


def pi_from_W(z, w):
    """The momentum pi at n Z Z^dag induced by the upstairs pair (Z, W).

    pi is the unique tangent element whose pairing with every tangent
    vector t equals <W, tZ - (Re tr t / 2) Z> / (n |Z|^2); assembled in an
    orthonormal tangent basis, so the linear system is diagonal.
    """
    if z.norm() <= DOMAIN_EPS:
        raise ValueError("pi requires Z != 0")
    basis = tangent_basis(z)
    scale = 1.0 / (z.n * z.norm() ** 2)
    pi = jordan.HermElement._trusted(jordan.identity(z.n).mat.scale(0.0))
    for t in basis:
        lifted = mat_apply(t.mat, z) - z.scale(0.5 * trace_re(t.mat))
        pairing = scale * float(np.dot(w.data.reshape(-1), lifted.data.reshape(-1)))
        pi = pi + t.scale(pairing)
    return CotangentData(cone_point(z), pi, z, w)


def sternberg_x_e(d, mu):
    """The cone-side X_e = <x | pi o pi> + mu^2 / <e | x>."""
    pi2 = jordan.jordan_product(d.pi, d.pi)
    return jordan.inner(d.x.x, pi2) + mu * mu / d.x.r


def pullback_check(z, w):
    """Residuals of the two pullback identities at (Z, W).

    residual 1: max_u |<x|u> - <Z, uZ>| over the orthonormal basis;
    residual 2: |cone-side X_e - |W|^2/4| with mu = |Im(W^dag Z)|/2.
    """
    d = pi_from_W(z, w)
    basis = jordan.orthonormal_basis(z.n)
    r1 = 0.0
    for u in basis:
        lhs = jordan.inner(d.x.x, u)
        uz = mat_apply(u.mat, z)
        rhs = float(np.dot(z.data.reshape(-1), uz.data.reshape(-1)))
        r1 = max(r1, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))
    mu = 0.5 * dagger_product(w, z).im().norm()
    lhs = sternberg_x_e(d, mu)
    rhs = 0.25 * w.norm() ** 2
    r2 = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
    return r1, r2


def hamiltonian_downstairs(d, mu):
    """H = <x|pi^2>/(2r) + mu^2/(2r^2) - 1/r on the cone side."""
    r = d.x.r
    if r <= 0:
        raise ValueError("cone radius must be positive")
    pi2 = jordan.jordan_product(d.pi, d.pi)
    return 0.5 * jordan.inner(d.x.x, pi2) / r + 0.5 * mu * mu / (r * r) - 1.0 / r


def lrl_downstairs(d, mu, u):
    """The LRL component A_u = (X_u - Y_u X_e / Y_e)/2 + Y_u / Y_e.

    Y-values come from the cone point, X_e from the cone-side formula,
    X_u through the retained upstairs pair.
    """
    r = d.x.r
    if r <= 0:
        raise ValueError("cone radius must be positive")
    y_u = jordan.inner(d.x.x, u)
    y_e = r
    x_e = sternberg_x_e(d, mu)
    if d.w is None:
        raise ValueError("X_u needs the upstairs pair; build via pi_from_W")
    uw = mat_apply(u.mat, d.w)
    x_u = 0.25 * float(np.dot(d.w.data.reshape(-1), uw.data.reshape(-1)))
    return 0.5 * (x_u - y_u * x_e / y_e) + y_u / y_e
