"""Gamow states: Breit-Wigner wavefunctions and semigroup time evolution.

A decaying Gamow state has energy wavefunction

    psi_G(E) = i*sqrt(Gamma/2pi) / (E - (E_R - i*Gamma/2))

on the whole real line, and evolves by exp(-i E_R t) exp(-Gamma t/2) for
t >= 0 only. The growing partner (z = E_R + i*Gamma/2) evolves for t <= 0
only. Evaluating either outside its half-line raises SemigroupDomainError.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError, SemigroupDomainError
from .poles import ResonancePole
from .quadrature import fourier, quad_complex

DECAYING = "decaying"
GROWING = "growing"


@dataclass(frozen=True)
class GamowState:
    pole: ResonancePole
    kind: str = DECAYING

    def __post_init__(self):
        if self.kind not in (DECAYING, GROWING):
            raise DomainError(f"kind must be 'decaying' or 'growing', got {self.kind!r}")
        if not self.pole.Gamma > 0:
            raise DomainError("Gamow state needs Gamma > 0")

    @classmethod
    def from_energy(cls, E_R: float, Gamma: float, kind: str = DECAYING) -> GamowState:
        return cls(ResonancePole.from_energy(E_R, Gamma), kind)

    @property
    def E_R(self) -> float:
        return self.pole.E_R

    @property
    def Gamma(self) -> float:
        return self.pole.Gamma

    @property
    def z(self) -> complex:
        """Complex eigenvalue: E_R - i*Gamma/2 (decaying) or E_R + i*Gamma/2."""
        sign = -1.0 if self.kind == DECAYING else 1.0
        return complex(self.E_R, sign * 0.5 * self.Gamma)

    def admits(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        return bool(np.all(t >= 0) if self.kind == DECAYING else np.all(t <= 0))


def _require_decaying(g: GamowState):
    if g.kind != DECAYING:
        raise DomainError("operation defined for the decaying Gamow state only")


def _require_domain(g: GamowState, t):
    if not g.admits(t):
        half = "t >= 0" if g.kind == DECAYING else "t <= 0"
        raise SemigroupDomainError(f"{g.kind} Gamow state evolves for {half} only; got t={t!r}")


@dataclass(frozen=True)
class HardyTestFunction:
    """Rational test function ``normalization / prod (E - w_j)**p_j``.

    With every ``Im w_j > 0`` the function is analytic in the closed lower
    half-plane. Total power >= 2 keeps both pairing integrals absolutely
    convergent.
    """

    poles_w: tuple[complex, ...]
    powers: tuple[int, ...]
    normalization: complex = 1.0

    def __post_init__(self):
        if len(self.poles_w) != len(self.powers) or not self.poles_w:
            raise DomainError("poles_w and powers must be non-empty and of equal length")
        if any(int(p) != p or p < 1 for p in self.powers):
            raise DomainError(f"powers must be positive integers, got {self.powers!r}")
        if sum(self.powers) < 2:
            raise DomainError("total power must be at least 2 for absolute convergence")

    @property
    def is_hardy(self) -> bool:
        return all(complex(w).imag > 0 for w in self.poles_w)

    def __call__(self, E):
        E = np.asarray(E, dtype=complex)
        den = np.ones_like(E)
        for w, p in zip(self.poles_w, self.powers):
            den = den * (E - w) ** p
        return self.normalization / den

    def scaled(self, factor: complex) -> HardyTestFunction:
        return HardyTestFunction(self.poles_w, self.powers, self.normalization * factor)


def hardy_suite() -> list[HardyTestFunction]:
    """A fixed family of lower-half-plane-analytic test functions."""
    return [
        HardyTestFunction((1j,), (2,)),
        HardyTestFunction((2j,), (3,)),
        HardyTestFunction((1 + 1j,), (2,)),
        HardyTestFunction((-3 + 0.5j,), (2,)),
        HardyTestFunction((5 + 0.2j,), (2,), 0.3 - 0.1j),
        HardyTestFunction((1j, 4 + 2j), (1, 1)),
        HardyTestFunction((-1 + 1j, 2 + 3j), (1, 2)),
        HardyTestFunction((0.5j, 6 + 0.5j, -2 + 1j), (1, 1, 1), 2.0),
        HardyTestFunction((10 + 5j,), (4,), 1e3),
        HardyTestFunction((3 + 0.05j, 3.5 + 0.1j), (1, 1), 1j),
        HardyTestFunction((-8 + 4j, 8 + 4j), (2, 1)),
        HardyTestFunction((0.1j,), (2,)),
    ]


def anti_hardy_example() -> HardyTestFunction:
    """Test function with a pole at -i; it violates the Hardy condition.

    A lone higher-order pole integrates to zero on the real line whichever
    side it sits on, so the -i pole is paired with a Hardy pole at +i.
    """
    return HardyTestFunction((-1j, 1j), (1, 1))


def bw_amplitude(g: GamowState, E):
    """Idealized Breit-Wigner energy wavefunction of a decaying Gamow state."""
    _require_decaying(g)
    E = np.asarray(E, dtype=complex)
    diff = E - g.z
    if np.any(diff == 0):
        raise PoleError(f"Breit-Wigner amplitude evaluated at its pole z={g.z!r}")
    out = 1j * np.sqrt(g.Gamma / (2 * np.pi)) / diff
    return out[()] if out.ndim == 0 else out


def lineshape(g: GamowState, E):
    """|bw_amplitude|**2, the normalized Lorentzian, for real E."""
    E = np.asarray(E, dtype=float)
    half = 0.5 * g.Gamma
    return (g.Gamma / (2 * np.pi)) / ((E - g.E_R) ** 2 + half * half)


def semigroup_phase(g: GamowState, t):
    """Time factor of the Gamow ket; defined on its semigroup half-line only."""
    _require_domain(g, t)
    t = np.asarray(t, dtype=float)
    out = np.exp(-1j * g.z * t)
    return out[()] if out.ndim == 0 else out


def eigenvalue_pairing_residual(g: GamowState, psi: HardyTestFunction, rtol: float = 1e-12) -> float:
    """Relative defect of <H psi|G> = z_R <psi|G> for one test function.

    Both sides are real-line integrals of the test function against the
    Breit-Wigner wavefunction (times E for the left side); the substitution
    E = E_R + (Gamma/2) tan(u) maps the line to (-pi/2, pi/2) and removes the
    Lorentzian peak.
    """
    _require_decaying(g)
    half = 0.5 * g.Gamma

    def mapped(weight):
        def f(u):
            E = g.E_R + half * np.tan(u)
            jac = half / np.cos(u) ** 2
            return psi(E) * weight(E) * bw_amplitude(g, E) * jac

        return f

    lim = 0.5 * np.pi
    breaks = sorted({float(np.arctan((complex(w).real - g.E_R) / half)) for w in psi.poles_w})
    A, _ = quad_complex(mapped(lambda E: E), -lim, lim, tol=1e-300, rtol=rtol, limit=400, points=breaks, what="<H psi|G>")
    B, _ = quad_complex(mapped(lambda E: 1.0), -lim, lim, tol=1e-300, rtol=rtol, limit=400, points=breaks, what="<psi|G>")
    return float(abs(A - g.z * B) / abs(g.z * B))


def causal_amplitude(g: GamowState, t: float, tol: float = 1e-12) -> complex:
    """Normalized time transform of the Gamow wavefunction, for any real t.

    (1/(2 pi sqrt(Gamma/2pi))) * integral psi_G(E) exp(-iEt) dE. Closing the
    contour gives exp(-i z_R t) for t > 0, 1/2 at t = 0 and exactly 0 for
    t < 0 (the only pole is in the lower half-plane). Diagnostic only.
    """
    _require_decaying(g)
    b = 0.5 * g.Gamma
    s = abs(t)
    # integral over x = E - E_R of exp(-ixt)/(x + ib), split into even parts
    ic, _ = fourier(lambda x: 1.0 / (x * x + b * b), 0.0, np.inf, s, tol=tol, head=100.0 * b)
    if s == 0:
        i_s = 0.0
    else:
        val, _ = fourier(lambda x: x / (x * x + b * b), 0.0, np.inf, s, tol=tol, head=100.0 * b)
        i_s = -val.imag
    J = -2j * b * ic.real - 2j * np.sign(t) * i_s
    return complex(np.exp(-1j * g.E_R * t) * 1j * J / (2 * np.pi))


def bw_survival(
    g: GamowState,
    t: float,
    lower_cutoff: str = "extended",
    diagnostic: bool = False,
    tol: float = 1e-12,
) -> complex:
    """Survival amplitude of the Breit-Wigner distribution.

    a(t) = integral |psi_G(E)|**2 exp(-iEt) dE with lower limit -inf
    ("extended") or 0 ("physical"). The extended form is exactly
    exp(-i z_R t); the physical one develops a power-law tail.

    Negative ``t`` raises SemigroupDomainError unless ``diagnostic`` is set,
    in which case the extended causal transform (:func:`causal_amplitude`,
    identically 0 for t < 0) is returned.
    """
    _require_decaying(g)
    if lower_cutoff not in ("extended", "physical"):
        raise DomainError(f"lower_cutoff must be 'extended' or 'physical', got {lower_cutoff!r}")
    if t < 0:
        if diagnostic and lower_cutoff == "extended":
            return causal_amplitude(g, t, tol)
        _require_domain(g, t)
    b = 0.5 * g.Gamma
    norm = g.Gamma / (2 * np.pi)
    if lower_cutoff == "extended":
        half, _ = fourier(lambda x: norm / (x * x + b * b), 0.0, np.inf, t, tol=tol / 2, head=100.0 * b)
        return complex(np.exp(-1j * g.E_R * t) * 2.0 * half.real)
    head = max(g.E_R, 0.0) + 100.0 * b
    val, _ = fourier(lambda E: norm / ((E - g.E_R) ** 2 + b * b), 0.0, np.inf, t, tol=tol, head=head)
    return val
