"""Thin wrappers around QUADPACK for complex and Fourier-type integrals.

All routines are deterministic and raise QuadratureError when QUADPACK's own
error estimate exceeds the requested absolute tolerance.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureError

_EPS = np.finfo(float).eps


def _checked(f, a, b, tol, what, rtol=0.0, **kw):
    val, err, *_ = quad(f, a, b, epsabs=tol, epsrel=rtol, full_output=1, **kw)
    # below ~64 ulps of the value an error estimate is roundoff, not truncation
    if not math.isfinite(val) or not err <= max(tol, rtol * abs(val), 64 * _EPS * abs(val), 1e-15):
        raise QuadratureError(f"{what}: error estimate {err:.3e} exceeds tolerance {tol:.1e}", err)
    return val, err


def quad_real(f, a, b, tol=1e-12, rtol=0.0, limit=200, points=None, what="integral"):
    return _checked(f, a, b, tol, what, rtol=rtol, limit=limit, points=points)


def quad_complex(f, a, b, tol=1e-12, rtol=0.0, limit=200, points=None, what="integral"):
    """Integral of a complex-valued function of a real variable."""
    re, e1 = _checked(lambda x: f(x).real, a, b, tol / 2, what, rtol=rtol, limit=limit, points=points)
    im, e2 = _checked(lambda x: f(x).imag, a, b, tol / 2, what, rtol=rtol, limit=limit, points=points)
    return complex(re, im), e1 + e2


def fourier(f, a, b, t, tol=1e-12, rtol=0.0, limit=200, what="Fourier integral", head=None):
    """Integral of f(x) * exp(-i x t) over [a, b] for real-valued f.

    Finite ranges use QAWO; ``t == 0`` falls back to plain adaptive
    quadrature. For ``b = inf``, ``[a, head]`` (which should cover any narrow
    peak of f) and then panels of doubling width go to QAWO, and QAWF takes
    over once a panel spans several periods. QAWF alone silently loses its
    first cycle, of length pi/|t|, whenever that is much longer than the
    scale on which f varies.
    """
    if t == 0:
        val, err = _checked(f, a, b, tol, what, rtol=rtol, limit=limit)
        return complex(val), err
    if np.isinf(b):
        start = a if head is None else max(a, head)
        edges = [a] if start == a else [a, start]
        width = max(abs(start), 1.0)
        # Beyond 1e18 widths an integrable, decaying f has no mass left to lose.
        reach = 1e18 * width
        while width < 8.0 * np.pi / abs(t) and edges[-1] < reach:
            edges.append(edges[-1] + width)
            width *= 2.0
        # Each piece gets tol/8; distant panels hold little mass and land far
        # below that, and the summed estimate is checked at the end.
        total, err = 0.0 + 0.0j, 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e = fourier(f, lo, hi, t, tol / 8, rtol, limit, what)
            total += v
            err += e
        x_end = edges[-1]
        if x_end >= reach:
            # |t| so small that the first period lies past the reach; the
            # remainder is bounded by |f(x_end)| * x_end for 1/x^2 decay.
            err += abs(f(x_end)) * x_end
        else:
            kw = dict(weight="cos", wvar=abs(t), limlst=200)
            c, e1 = _fourier_tail(f, x_end, tol / 8, what, **kw)
            kw["weight"] = "sin"
            s, e2 = _fourier_tail(f, x_end, tol / 8, what, **kw)
            total += complex(c, -math.copysign(1.0, t) * s)
            err += e1 + e2
        if not err <= max(tol, rtol * abs(total), 64 * _EPS * abs(total), 1e-15):
            raise QuadratureError(f"{what}: error estimate {err:.3e} exceeds tolerance {tol:.1e}", err)
        return total, err
    c, e1 = _checked(f, a, b, tol / 2, what, rtol=rtol, weight="cos", wvar=abs(t), limit=limit)
    s, e2 = _checked(f, a, b, tol / 2, what, rtol=rtol, weight="sin", wvar=abs(t), limit=limit)
    return complex(c, -math.copysign(1.0, t) * s), e1 + e2


def _fourier_tail(f, a, tol, what, **kw):
    # QAWF's error estimate occasionally jumps by orders of magnitude while
    # the value is fine. Retry with a few epsabs scales and with the start
    # shifted by a fraction of a period (the head then goes to QAWO).
    period = 2.0 * np.pi / kw["wvar"]
    err = np.inf
    for shift in (0.0, 0.31, 0.77):
        head, head_err = 0.0, 0.0
        start = a + shift * period
        if shift:
            head, head_err, *_ = quad(f, a, start, epsabs=tol / 4, weight=kw["weight"], wvar=kw["wvar"], full_output=1)
        for scale in (1.0, 0.37, 0.1, 2.7, 0.03):
            val, err, *_ = quad(f, start, np.inf, epsabs=tol * scale, full_output=1, **kw)
            err += head_err
            if math.isfinite(val) and err <= max(tol, 1e-15) * 10:
                return head + val, err
    raise QuadratureError(f"{what}: error estimate {err:.3e} exceeds tolerance {tol:.1e}", err)


def circle_residue(f, center: complex, radius: float, n: int = 256) -> complex:
    """Residue of ``f`` at ``center`` by the trapezoidal rule on a circle.

    Exponentially accurate when ``f`` has no other singularity within a
    few radii of ``center``.
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    dz = radius * np.exp(1j * theta)
    return complex(np.mean(f(center + dz) * dz))
