"""S-wave scattering off a delta-shell potential.

Units: hbar = 2m = 1, so E = k**2 and lifetimes are 1/Gamma.

The radial equation is

    u'' + k**2 u = lam * delta(r - a) * u,

whose regular solution (u ~ sin(kr)/k at the origin) is, outside the shell,

    u(r) = [F(-k) exp(ikr) - F(k) exp(-ikr)] / (2ik)

with Jost function

    F(k) = 1 + lam * exp(ika) * sin(ka) / k.

F is entire in k (the 1/k is removable, F(0) = 1 + lam*a). Its zeros in the
lower half-plane are resonance poles of S(k) = F(-k)/F(k); zeros on the
positive imaginary axis are bound states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OracleError, PoleError


@dataclass(frozen=True)
class DeltaShellModel:
    """Delta-shell potential ``V(r) = lam * delta(r - a)`` in the s-wave.

    ``lam`` has units of inverse length; positive values are repulsive and
    produce a family of narrow resonances near ``k = n*pi/a``.
    """

    lam: float
    a: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.lam):
            raise DomainError(f"coupling must be finite, got {self.lam!r}")
        if not (np.isfinite(self.a) and self.a > 0):
            raise DomainError(f"shell radius must be positive, got {self.a!r}")


def _check_finite(k):
    if not np.all(np.isfinite(k)):
        raise DomainError(f"momentum must be finite, got {k!r}")


def jost_function(model: DeltaShellModel, k):
    """Jost function F(k); accepts scalars or arrays of complex momenta."""
    k = np.asarray(k, dtype=complex)
    _check_finite(k)
    ka = k * model.a
    # np.sinc(x) = sin(pi x)/(pi x) and carries the k -> 0 limit.
    out = 1.0 + model.lam * model.a * np.exp(1j * ka) * np.sinc(ka / np.pi)
    return out[()] if out.ndim == 0 else out


def jost_function_derivative(model: DeltaShellModel, k):
    """Closed-form dF/dk."""
    k = np.asarray(k, dtype=complex)
    _check_finite(k)
    a, lam = model.a, model.lam
    x = 2j * k * a
    # F = 1 + lam*a*(exp(x) - 1)/x, so dF/dk = 2i*a^2*lam * d/dx[(exp(x) - 1)/x].
    # The closed form cancels badly for small |x|; there sum the series
    # sum_n n x^(n-1)/(n+1)! instead (18 terms reach 1e-20 at |x| = 0.5).
    small = np.abs(x) < 0.5
    xs = np.where(small, 1.0, x)
    big = (xs * np.exp(xs) - np.expm1(xs)) / xs**2
    ser = np.zeros_like(x)
    for n in range(18, 0, -1):
        ser = ser * x + n / math.factorial(n + 1)
    scale = 2j * a * a * lam
    big, ser = scale * big, scale * ser
    out = np.where(small, ser, big)
    return out[()] if out.ndim == 0 else out


def s_matrix(model: DeltaShellModel, k, pole_tol: float = 1e-10) -> complex:
    """S(k) = F(-k)/F(k).

    Raises PoleError when |F(k)| < pole_tol, i.e. when k sits on an S-matrix
    pole.
    """
    fk = jost_function(model, k)
    if np.any(np.abs(fk) < pole_tol):
        raise PoleError(f"S-matrix pole at k={k!r} (|F(k)|={np.min(np.abs(fk)):.3e})")
    return jost_function(model, -np.asarray(k)) / fk


def _rk4_regular_solution(model: DeltaShellModel, k: np.ndarray, step: float, r_out: float):
    """Integrate the regular solution from r=0 to r_out with classical RK4.

    The shell is handled by integrating up to r=a exactly, applying the
    derivative jump u'(a+) - u'(a-) = lam*u(a), then continuing.
    """
    k2 = k * k

    def integrate(u, du, r0, r1):
        n = max(1, int(np.ceil((r1 - r0) / step)))
        h = (r1 - r0) / n
        for _ in range(n):
            # u'' = -k^2 u outside the shell
            k1u, k1d = du, -k2 * u
            k2u, k2d = du + 0.5 * h * k1d, -k2 * (u + 0.5 * h * k1u)
            k3u, k3d = du + 0.5 * h * k2d, -k2 * (u + 0.5 * h * k2u)
            k4u, k4d = du + h * k3d, -k2 * (u + h * k3u)
            u = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
            du = du + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
        return u, du

    u = np.zeros_like(k)
    du = np.ones_like(k)
    u, du = integrate(u, du, 0.0, model.a)
    du = du + model.lam * u
    return integrate(u, du, model.a, r_out)


def radial_ode_oracle(
    model: DeltaShellModel, k, step: float = 1e-4, rtol: float = 1e-8
):
    """Jost function from direct numerical integration of the radial equation.

    Independent of the closed form in :func:`jost_function`; it only uses the
    asymptotic identity ``F(k) = exp(ikr) * (u'(r) - ik u(r))`` valid beyond
    the shell. The integration is repeated at half the step and the two
    results must agree to ``rtol`` (relative), otherwise OracleError.
    """
    if not step > 0:
        raise DomainError(f"step must be positive, got {step!r}")
    k_arr = np.atleast_1d(np.asarray(k, dtype=complex))
    _check_finite(k_arr)
    if np.any(k_arr == 0):
        raise DomainError("the ODE oracle needs k != 0")
    r_out = 2.0 * model.a

    def extract(h):
        u, du = _rk4_regular_solution(model, k_arr, h, r_out)
        return np.exp(1j * k_arr * r_out) * (du - 1j * k_arr * u)

    coarse = extract(step)
    fine = extract(step / 2.0)
    err = np.abs(fine - coarse) / np.maximum(np.abs(fine), 1e-300)
    if np.any(err > rtol):
        raise OracleError(
            f"ODE oracle not converged under step halving: max rel change {err.max():.3e} > {rtol:.1e}"
        )
    return fine[0] if np.ndim(k) == 0 else fine.reshape(np.shape(k))
