"""Survival amplitude of a prepared state: direct integral and pole expansion.

The prepared state has energy wavefunction phi(E) = c * N(E) / F(sqrt E)
with N a rational function whose poles lie in the upper half E-plane. Its
survival amplitude

    A(t) = integral_0^inf |phi(E)|^2 exp(-iEt) dE
         = integral_0^inf h(k, t) dk,   h = 2k c^2 N(k^2) N*(k^2) / (F(k) F(-k)) exp(-ik^2 t)

is computed directly on the real axis, and again after deforming [0, R] of
the k-axis onto the ray k = kappa * exp(-i theta) closed by the arc |k| = R.
Jost zeros swept by the deformation give the Gamow terms c_i exp(-i z_i t);
everything else (ray, arc, the untouched real tail beyond R and residues at
swept singularities of the reflected numerator N*) is the background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContourError,
    DecompositionError,
    DegeneratePoleError,
    DomainError,
    IncompleteScanError,
    QuadratureError,
    SemigroupDomainError,
)
from .poles import (
    ResonancePole,
    SearchRegion,
    _panel_nodes,
    jost_derivative,
    scan_poles,
    winding_on_nodes,
)
from .quadrature import circle_residue, fourier, quad_complex, quad_real
from .scattering import DeltaShellModel, jost_function

POLE_MARGIN = 1e-3


@dataclass(frozen=True)
class PreparedState:
    """Normalized state ``phi(E) = scale * N(E) / F(sqrt E)``.

    ``N(E) = prod(E - zeros) / prod((E - poles)**powers)``. The scale is
    fixed at construction so that the integral of |phi|^2 over E >= 0 is 1.
    """

    model: DeltaShellModel
    zeros: tuple[complex, ...] = ()
    poles: tuple[complex, ...] = (8 + 8j,)
    powers: tuple[int, ...] = (2,)
    scale: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "zeros", tuple(complex(z) for z in self.zeros))
        object.__setattr__(self, "poles", tuple(complex(w) for w in self.poles))
        object.__setattr__(self, "powers", tuple(int(p) for p in self.powers))
        if not self.poles or len(self.poles) != len(self.powers):
            raise DomainError("numerator needs at least one pole and one power per pole")
        if any(p < 1 for p in self.powers):
            raise DomainError(f"powers must be positive, got {self.powers}")
        if any(w.imag <= 0 for w in self.poles):
            raise DomainError(f"numerator poles must lie in the upper half E-plane, got {self.poles}")
        if sum(self.powers) - len(self.zeros) < 1:
            raise DomainError("numerator must decay at least like 1/E to be normalizable")
        object.__setattr__(self, "scale", 1.0)
        norm, _ = self._integrate_density(0.0, tol=1e-13)
        object.__setattr__(self, "scale", 1.0 / math.sqrt(norm.real))

    def numerator(self, E):
        E = np.asarray(E, dtype=complex)
        out = np.ones_like(E)
        for z in self.zeros:
            out = out * (E - z)
        for w, p in zip(self.poles, self.powers):
            out = out / (E - w) ** p
        return out

    def reflected_numerator(self, E):
        """conj(N(conj E)): the continuation of conj(N) off the real axis."""
        return np.conj(self.numerator(np.conj(np.asarray(E, dtype=complex))))

    def wavefunction(self, E):
        """phi(E) on the physical sheet, E >= 0."""
        E = np.asarray(E, dtype=float)
        return self.scale * self.numerator(E) / jost_function(self.model, np.sqrt(E))

    def density(self, E):
        """|phi(E)|^2 for E >= 0."""
        if isinstance(E, float):
            return self._density_scalar(E)
        E = np.asarray(E, dtype=float)
        n = self.numerator(E)
        f = jost_function(self.model, np.sqrt(E))
        return self.scale**2 * (n.real**2 + n.imag**2) / (f.real**2 + f.imag**2)

    def _density_scalar(self, E: float) -> float:
        # Plain-float path for the adaptive integrators, which call one point
        # at a time; |F|^2 = 1 + lam*sin(2ka)/k + (lam*sin(ka)/k)^2 for real k.
        lam, a = self.model.lam, self.model.a
        n = 1.0 + 0.0j
        for z in self.zeros:
            n *= E - z
        for w, p in zip(self.poles, self.powers):
            n /= (E - w) ** p
        k = math.sqrt(E)
        if k * a < 1e-8:
            f2 = (1.0 + lam * a) ** 2
        else:
            sk = math.sin(k * a) / k
            f2 = 1.0 + lam * math.sin(2.0 * k * a) / k + (lam * sk) ** 2
        return self.scale**2 * (n.real * n.real + n.imag * n.imag) / f2

    def continued_density(self, k):
        """Analytic continuation of 2k |phi(k^2)|^2 into the complex k-plane."""
        k = np.asarray(k, dtype=complex)
        e = k * k
        num = 2.0 * k * self.numerator(e) * self.reflected_numerator(e)
        return self.scale**2 * num / (jost_function(self.model, k) * jost_function(self.model, -k))

    def reflected_singularities(self) -> list[tuple[complex, int]]:
        """Poles of N*(k^2) in the fourth quadrant, with their order."""
        return [(complex(np.sqrt(np.conj(w))), p) for w, p in zip(self.poles, self.powers)]

    def _energy_edges(self) -> np.ndarray:
        a = self.model.a
        k_split = max(20.0 * np.pi / a, 4.0 * max(math.sqrt(abs(w)) for w in self.poles))
        k_edges = np.arange(0.0, k_split + 1e-12, 0.5 * np.pi / a)
        return k_edges**2

    def _integrate_density(self, t: float, tol: float):
        edges = self._energy_edges()
        n = len(edges)
        total, err = 0.0 + 0.0j, 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e = fourier(self.density, lo, hi, t, tol=tol / n, rtol=1e-13, what="direct survival panel")
            total += v
            err += e
        v, e = self.energy_tail(edges[-1], t, tol / 4)
        return total + v, err + e

    def energy_tail(self, E0: float, t: float, tol: float):
        """Integral of |phi(E)|^2 exp(-iEt) over [E0, inf)."""
        if t == 0:
            return self._static_tail(math.sqrt(E0), tol)
        return self._panel_tail(math.sqrt(E0), t, tol)

    def averaged_density(self, E):
        """|phi(E)|^2 with |F|^2 replaced by its average over one period in k.

        |F|^2 = A + B sin 2ka + C cos 2ka, whose reciprocal averages to
        1/sqrt(A^2 - B^2 - C^2).
        """
        lam = self.model.lam
        k2 = np.asarray(E, dtype=float)
        A = 1.0 + lam * lam / (2 * k2)
        B2 = lam * lam / k2
        C = -lam * lam / (2 * k2)
        n = self.numerator(k2)
        return self.scale**2 * (n.real**2 + n.imag**2) / np.sqrt(A * A - B2 - C * C)

    def _far_cutoff(self, k0: float, t: float = 0.0) -> float:
        k_far = max(2000.0, 50.0 * k0)
        # The dropped harmonics of |F|^-2 are stationary near k = n*a/t. Keep
        # the first inside when that is affordable; once a/t > 5e3 its weight,
        # ~lam*t^3.5, is already below 1e-11.
        if t and 4.0 * self.model.a / abs(t) <= 2e4:
            k_far = max(k_far, 4.0 * self.model.a / abs(t))
        return k_far

    def _panel_tail(self, k0: float, t: float, tol: float, ratio: float = 1.25, max_periods: int = 32):
        # QAWF applied straight to the density can return values off by far
        # more than its error estimate, because |F|^2 modulates the integrand.
        # Instead: adaptive oscillatory panels (growing geometrically, capped
        # at max_periods periods of |F|^2) out to k_far, then the averaged
        # density, whose dropped oscillating remainder is below ~lam/k_far^4.
        k_far = self._far_cutoff(k0, t)
        cap = max_periods * np.pi / self.model.a
        k_edges = [k0]
        while k_edges[-1] < k_far:
            k_edges.append(k_edges[-1] + min((ratio - 1.0) * k_edges[-1], cap))
        n = len(k_edges)
        total, err = 0.0 + 0.0j, 0.0
        for lo, hi in zip(k_edges[:-1], k_edges[1:]):
            v, e = fourier(self.density, lo * lo, hi * hi, t, tol=tol / (2 * n), rtol=1e-13, limit=500, what="tail panel")
            total += v
            err += e
        k_end = k_edges[-1]
        far, e = fourier(self.averaged_density, k_end * k_end, np.inf, t, tol=tol / 4, what="averaged tail")
        err += e + self.model.lam / k_end**4
        if not err <= max(tol, 1e-13 * abs(total + far)):
            raise QuadratureError(f"real-axis tail: error estimate {err:.3e} exceeds tolerance {tol:.1e}", err)
        return total + far, err

    def _static_tail(self, k0: float, tol: float, order: int = 32):
        # At t = 0 the only oscillation is |F(k)|^2 itself, periodic in k with
        # period pi/a. Whole periods are summed by Gauss-Legendre out to
        # k_far, and the averaged density covers the rest with an error of
        # order lam/k_far^5.
        period = np.pi / self.model.a
        k_far = self._far_cutoff(k0)
        n_panels = int(np.ceil((k_far - k0) / period))
        x, w = np.polynomial.legendre.leggauss(order)
        lo = k0 + period * np.arange(n_panels)
        nodes = (lo[:, None] + 0.5 * period * (x + 1)).ravel()
        weights = np.tile(0.5 * period * w, n_panels)
        body = np.sum(weights * 2.0 * nodes * self.density(nodes * nodes))
        k_end = k0 + period * n_panels

        def far_integrand(u):
            if u == 0:
                return 0.0
            k = 1.0 / u
            return 2.0 * k * float(self.averaged_density(k * k)) / (u * u)

        far, err = quad_real(far_integrand, 0.0, 1.0 / k_end, tol=tol, rtol=1e-13, what="averaged tail")
        return complex(body + far), err + self.model.lam / k_end**5


def standard_state(model: DeltaShellModel) -> PreparedState:
    """Reference state: N(E) = E / (E - 8 - 8i)**2."""
    return PreparedState(model, zeros=(0.0,), poles=(8 + 8j,), powers=(2,))


@dataclass(frozen=True)
class RotatedContour:
    """Ray ``k = kappa * exp(-i theta)``, 0 <= kappa <= radial_cutoff.

    ``node_count`` caps the number of adaptive subintervals used on the ray
    and on the closing arc.
    """

    theta: float = np.pi / 4
    radial_cutoff: float = 14.0
    node_count: int = 400

    def __post_init__(self):
        if not 0 < self.theta <= np.pi / 4 + 1e-15:
            raise DomainError(f"theta must lie in (0, pi/4], got {self.theta!r}")
        if not self.radial_cutoff > 0:
            raise DomainError(f"radial_cutoff must be positive, got {self.radial_cutoff!r}")
        if self.node_count < 16:
            raise DomainError(f"node_count must be at least 16, got {self.node_count!r}")

    def sweeps(self, k: complex) -> bool:
        """True when ``k`` lies strictly inside the swept sector."""
        return -self.theta < np.angle(k) < 0 and abs(k) < self.radial_cutoff

    def distance(self, k: complex) -> float:
        """Distance from ``k`` to the ray plus closing arc."""
        direction = np.exp(-1j * self.theta)
        s = min(max((k * np.conj(direction)).real, 0.0), self.radial_cutoff)
        d_ray = abs(k - s * direction)
        if -self.theta <= np.angle(k) <= 0:
            d_arc = abs(abs(k) - self.radial_cutoff)
        else:
            d_arc = min(abs(k - self.radial_cutoff), abs(k - self.radial_cutoff * direction))
        return float(min(d_ray, d_arc))

    def boundary_nodes(self, n: int = 4096):
        """Counter-clockwise sector boundary: ray out, arc up, real axis back."""
        R, th = self.radial_cutoff, self.theta
        arc_len = R * th
        total = 2 * R + arc_len
        n_ray = max(1, round(n / 8 * R / total))
        n_arc = max(1, round(n / 8 * arc_len / total))
        k_ray, w_ray = _panel_nodes(0.0, R * np.exp(-1j * th), n_ray)
        phi, w_phi = _panel_nodes(-th, 0.0, n_arc)
        k_arc = R * np.exp(1j * phi.real)
        w_arc = w_phi.real * 1j * k_arc
        k_re, w_re = _panel_nodes(R, 0.0, n_ray)
        return np.concatenate([k_ray, k_arc, k_re]), np.concatenate([w_ray, w_arc, w_re])


@dataclass(frozen=True)
class PoleTerm:
    pole: ResonancePole
    coefficient: complex
    value: complex


@dataclass(frozen=True)
class BackgroundParts:
    ray: complex
    arc: complex
    tail: complex
    state: complex

    @property
    def total(self) -> complex:
        return self.ray + self.arc + self.tail + self.state


@dataclass(frozen=True)
class SurvivalDecomposition:
    t: float
    pole_terms: tuple[PoleTerm, ...]
    background: complex
    direct: complex
    parts: BackgroundParts
    tolerance: float

    @property
    def pole_sum(self) -> complex:
        return complex(sum(p.value for p in self.pole_terms))

    @property
    def reconstructed(self) -> complex:
        return self.pole_sum + self.background

    @property
    def residual(self) -> float:
        return abs(self.reconstructed - self.direct)


def _require_forward(t: float):
    if t < 0:
        raise SemigroupDomainError(f"survival amplitude is evaluated for t >= 0 only; got t={t!r}")


def direct_survival(state: PreparedState, t: float, tol: float = 1e-11) -> complex:
    """A(t) by adaptive quadrature along the physical energy axis."""
    _require_forward(t)
    value, _ = state._integrate_density(t, tol)
    return complex(value)


def gamow_coefficient(state: PreparedState, pole: ResonancePole, rel_step: float | None = None) -> complex:
    """c_i = -2 pi i Res_{k = k_pole} of the continued density.

    The residue is h(k_pole) / F'(k_pole) with h = continued_density * F(k).
    ``rel_step`` recomputes F' with that relative difference step instead of
    using ``pole.jost_derivative``.
    """
    k = pole.k_pole
    if rel_step is not None or pole.jost_derivative is None:
        dF = jost_derivative(state.model, k, rel_step or 2e-4)
    else:
        dF = pole.jost_derivative
    if abs(dF) < 1e-12:
        raise DegeneratePoleError(f"F'(k) vanishes at k={k!r}; pole is not simple")
    e = k * k
    h = 2.0 * k * state.numerator(e) * state.reflected_numerator(e) / jost_function(state.model, -k)
    return complex(-2j * np.pi * state.scale**2 * h / dF)


def _integrand(state: PreparedState, t: float):
    def h(k):
        k = np.asarray(k, dtype=complex)
        return state.continued_density(k) * np.exp(-1j * k * k * t)

    return h


def _check_clear(contour: RotatedContour, points, what: str, margin: float = POLE_MARGIN):
    for k in points:
        if contour.distance(k) < margin:
            raise ContourError(
                f"{what} at k={k!r} is within {margin:g} of the contour; choose a different theta or cutoff"
            )


def background_parts(
    state: PreparedState,
    contour: RotatedContour,
    t: float,
    tol: float = 1e-11,
    poles: list[ResonancePole] | None = None,
) -> BackgroundParts:
    _require_forward(t)
    R, th = contour.radial_cutoff, contour.theta
    singular = state.reflected_singularities()
    _check_clear(contour, [s for s, _ in singular], "numerator singularity")
    if poles is not None:
        _check_clear(contour, [p.k_pole for p in poles], "Jost zero")
    else:
        probe, _ = contour.boundary_nodes(2048)
        if np.min(np.abs(jost_function(state.model, probe))) < 1e-6:
            raise ContourError("a Jost zero lies on the contour; choose a different theta or cutoff")
    h = _integrand(state, t)
    direction = np.exp(-1j * th)
    limit = contour.node_count
    ray, _ = quad_complex(lambda s: h(s * direction) * direction, 0.0, R, tol=tol, limit=limit, what="ray")
    arc, _ = quad_complex(
        lambda p: h(R * np.exp(1j * p)) * 1j * R * np.exp(1j * p), -th, 0.0, tol=tol, limit=limit, what="arc"
    )
    tail, _ = state.energy_tail(R * R, t, tol)

    state_part = 0.0 + 0.0j
    swept = [s for s, _ in singular if contour.sweeps(s)]
    for s in swept:
        others = [abs(s - o) for o in swept if o != s]
        if poles is not None:
            others += [abs(s - p.k_pole) for p in poles]
        r = 0.4 * min([contour.distance(s), abs(s), 0.25] + others)
        n = 256
        phase = np.exp(2j * np.pi * np.arange(n) / n)
        inside = winding_on_nodes(state.model, s + r * phase, (2 * np.pi / n) * 1j * r * phase, boundary_tol=0.0)
        if abs(inside) > 0.5:
            raise ContourError(f"Jost zero within {r:.3g} of numerator singularity {s!r}")
        state_part += -2j * np.pi * circle_residue(h, s, r, n)
    return BackgroundParts(complex(ray), complex(arc), complex(tail), complex(state_part))


def background_integral(
    state: PreparedState,
    contour: RotatedContour,
    t: float,
    tol: float = 1e-11,
    poles: list[ResonancePole] | None = None,
) -> complex:
    """Everything in A(t) that is not a swept Gamow pole term."""
    return background_parts(state, contour, t, tol, poles).total


def sector_poles(
    model: DeltaShellModel, contour: RotatedContour, tol: float = 1e-12, grid_density: float = 2.0
) -> list[ResonancePole]:
    """Scan the rectangle enclosing the contour's sector and keep swept poles."""
    R = contour.radial_cutoff
    region = SearchRegion(1e-6, R, -R * math.sin(contour.theta), 0.0, grid_density)
    return [p for p in scan_poles(model, region, tol) if contour.sweeps(p.k_pole)]


def decompose(
    state: PreparedState,
    poles: list[ResonancePole],
    contour: RotatedContour,
    t: float,
    recon_tol: float = 1e-6,
    tol: float = 1e-11,
    direct: complex | None = None,
) -> SurvivalDecomposition:
    """Split A(t) into Gamow pole terms plus background and cross-check."""
    _require_forward(t)
    swept = [p for p in poles if contour.sweeps(p.k_pole)]
    _check_clear(contour, [p.k_pole for p in poles], "Jost zero")
    enclosed = winding_on_nodes(state.model, *contour.boundary_nodes())
    if abs(enclosed - len(swept)) > 0.1:
        raise IncompleteScanError(
            f"{len(swept)} poles supplied inside the sector, argument principle counts {enclosed.real:.3f}",
            len(swept),
            int(round(enclosed.real)),
        )
    terms = []
    for p in swept:
        c = gamow_coefficient(state, p)
        terms.append(PoleTerm(p, c, complex(c * np.exp(-1j * p.z_R * t))))
    parts = background_parts(state, contour, t, tol, poles)
    if direct is None:
        direct = direct_survival(state, t, tol)
    result = SurvivalDecomposition(float(t), tuple(terms), parts.total, complex(direct), parts, recon_tol)
    if result.residual > recon_tol * abs(result.direct):
        raise DecompositionError(
            f"pole terms + background = {result.reconstructed:.12g} but direct = {result.direct:.12g} "
            f"(|diff| = {result.residual:.3e})",
            result.reconstructed,
            result.direct,
        )
    return result
