"""Resonance poles: Jost zeros in the lower half k-plane.

Poles are located by damped Newton iteration and the set found in a region is
certified against an independent argument-principle count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryError,
    ConvergenceError,
    DomainError,
    IncompleteScanError,
    NotAResonance,
    QuadratureError,
)
from .scattering import DeltaShellModel, jost_function, jost_function_derivative

NEWTON_REL_STEP = 1e-7
DERIVATIVE_REL_STEP = 2e-4


@dataclass(frozen=True)
class SearchRegion:
    """Axis-aligned rectangle in the complex k-plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    grid_density: float = 4.0

    def __post_init__(self):
        if not self.re_min < self.re_max:
            raise DomainError(f"re_min < re_max required, got {self.re_min}, {self.re_max}")
        if not self.im_min < self.im_max:
            raise DomainError(f"im_min < im_max required, got {self.im_min}, {self.im_max}")
        if not self.grid_density > 0:
            raise DomainError(f"grid_density must be positive, got {self.grid_density}")

    def contains(self, k: complex) -> bool:
        return self.re_min <= k.real <= self.re_max and self.im_min <= k.imag <= self.im_max

    def split(self) -> tuple[SearchRegion, SearchRegion]:
        """Halve along the longer side."""
        if self.re_max - self.re_min >= self.im_max - self.im_min:
            mid = 0.5 * (self.re_min + self.re_max)
            return (
                SearchRegion(self.re_min, mid, self.im_min, self.im_max, self.grid_density),
                SearchRegion(mid, self.re_max, self.im_min, self.im_max, self.grid_density),
            )
        mid = 0.5 * (self.im_min + self.im_max)
        return (
            SearchRegion(self.re_min, self.re_max, self.im_min, mid, self.grid_density),
            SearchRegion(self.re_min, self.re_max, mid, self.im_max, self.grid_density),
        )


@dataclass(frozen=True)
class ResonancePole:
    """A simple Jost zero ``k_pole`` with Im k < 0.

    For Re k > 0 the energy is ``z_R = E_R - i*Gamma/2`` (decaying). The
    mirror zero at ``-conj(k)`` has ``z = E_R + i*Gamma/2``; it is reported
    with the same positive ``Gamma`` and ``kind == "growing"``.
    """

    k_pole: complex
    jost_derivative: complex | None = None

    @property
    def z_R(self) -> complex:
        return self.k_pole * self.k_pole

    @property
    def E_R(self) -> float:
        return self.z_R.real

    @property
    def Gamma(self) -> float:
        return abs(2.0 * self.z_R.imag)

    @property
    def kind(self) -> str:
        return "decaying" if self.k_pole.real > 0 else "growing"

    @property
    def lifetime(self) -> float:
        return 1.0 / self.Gamma

    @classmethod
    def from_energy(cls, E_R: float, Gamma: float) -> ResonancePole:
        """Synthetic pole at z = E_R - i*Gamma/2 with no model attached."""
        if not Gamma > 0:
            raise DomainError(f"Gamma must be positive, got {Gamma!r}")
        return cls(complex(np.sqrt(complex(E_R, -0.5 * Gamma))))


def _newton_derivative(model, k):
    h = NEWTON_REL_STEP * max(1.0, abs(k))
    return (jost_function(model, k + h) - jost_function(model, k - h)) / (2 * h)


def jost_derivative(model: DeltaShellModel, k: complex, rel_step: float = DERIVATIVE_REL_STEP) -> complex:
    """Five-point central difference for F'(k)."""
    h = rel_step * max(1.0, abs(k))
    f = lambda x: jost_function(model, x)  # noqa: E731
    return complex((f(k - 2 * h) - 8 * f(k - h) + 8 * f(k + h) - f(k + 2 * h)) / (12 * h))


def find_pole(
    model: DeltaShellModel,
    k_seed: complex,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> ResonancePole:
    """Damped Newton iteration on F(k) = 0 from ``k_seed``."""
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    with np.errstate(over="ignore", invalid="ignore"):
        k = _newton(model, complex(k_seed), tol, max_iter)
    if k.imag >= 0:
        raise NotAResonance(f"zero at k={k!r} lies in the upper half-plane (bound state)", k)
    if abs(k.real) <= 1e3 * tol * max(1.0, abs(k)):
        raise NotAResonance(f"zero at k={k!r} lies on the negative imaginary axis (virtual state)", k)
    return ResonancePole(k, jost_derivative(model, k))


def _newton(model, k_seed, tol, max_iter):
    k = k_seed
    fk = complex(jost_function(model, k))
    for _ in range(max_iter):
        dfk = complex(_newton_derivative(model, k))
        if dfk == 0 or not np.isfinite(dfk):
            raise ConvergenceError(f"vanishing derivative at k={k!r}; no zero reachable from seed {k_seed!r}")
        step = fk / dfk
        # halve until |F| decreases
        for _ in range(40):
            k_new = k - step
            f_new = complex(jost_function(model, k_new)) if np.isfinite(k_new) else np.inf
            if np.isfinite(f_new) and abs(f_new) < abs(fk):
                break
            step *= 0.5
        else:
            if abs(fk) < tol:
                k_new, f_new = k, fk
            else:
                raise ConvergenceError(f"damped Newton stalled at k={k!r} with |F|={abs(fk):.3e}")
        k, fk = k_new, f_new
        if abs(fk) < tol and abs(step) < max(tol, 4 * np.finfo(float).eps * abs(k)):
            break
    else:
        raise ConvergenceError(
            f"no convergence from seed {k_seed!r} after {max_iter} iterations (|F|={abs(fk):.3e})"
        )
    return k


def _panel_nodes(z0: complex, z1: complex, n_panels: int, order: int = 8):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    s = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    ws = (0.5 * (hi - lo) * w).ravel()
    return z0 + (z1 - z0) * s, (z1 - z0) * ws


def winding_on_nodes(model: DeltaShellModel, nodes, weights, boundary_tol: float = 1e-8) -> complex:
    """(1/2 pi i) * sum(weights * F'/F) for a discretised closed path.

    ``weights`` already carry dk, so any parametrisation works.
    """
    fk = jost_function(model, nodes)
    if np.min(np.abs(fk)) < boundary_tol:
        raise BoundaryError("Jost zero on or near the contour; perturb it")
    dfk = jost_function_derivative(model, nodes)
    # |F/F'| estimates the distance to the nearest zero; closer than about
    # two node spacings and the panel rule can no longer resolve F'/F.
    if boundary_tol > 0 and np.any(np.abs(fk) < 2.0 * np.abs(weights) * np.abs(dfk)):
        i = int(np.argmin(np.abs(fk / dfk)))
        raise BoundaryError(f"Jost zero within ~{abs(fk[i] / dfk[i]):.2e} of the contour near k={nodes[i]:.6g}; perturb it")
    return complex(np.sum(weights * dfk / fk) / (2j * np.pi))


def polygon_nodes(vertices, n_boundary: int = 4096):
    """Composite Gauss-Legendre nodes and dk-weights along a closed polygon."""
    vertices = [complex(v) for v in vertices]
    edges = list(zip(vertices, vertices[1:] + vertices[:1]))
    lengths = np.array([abs(b - a) for a, b in edges])
    panels = np.maximum(1, np.round(n_boundary / 8 * lengths / lengths.sum())).astype(int)
    parts = [_panel_nodes(z0, z1, int(n)) for (z0, z1), n in zip(edges, panels)]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def winding_number(model: DeltaShellModel, vertices, n_boundary: int = 4096) -> complex:
    """Raw winding number of F around a closed polygon (not rounded)."""
    return winding_on_nodes(model, *polygon_nodes(vertices, n_boundary))


def count_zeros(model: DeltaShellModel, region: SearchRegion, n_boundary: int = 4096) -> int:
    """Number of Jost zeros inside ``region`` by the argument principle."""
    verts = [
        complex(region.re_min, region.im_min),
        complex(region.re_max, region.im_min),
        complex(region.re_max, region.im_max),
        complex(region.re_min, region.im_max),
    ]
    w = winding_number(model, verts, n_boundary)
    n = int(round(w.real))
    if abs(w - n) > 0.1:
        raise QuadratureError(f"winding number {w:.6f} is not close to an integer; raise n_boundary", abs(w - n))
    return n


def seed_grid(region: SearchRegion) -> np.ndarray:
    nx = max(2, int(np.ceil((region.re_max - region.re_min) * region.grid_density)) + 1)
    ny = max(2, int(np.ceil((region.im_max - region.im_min) * region.grid_density)) + 1)
    re = np.linspace(region.re_min, region.re_max, nx)
    im = np.linspace(region.im_min, region.im_max, ny)
    return (re[None, :] + 1j * im[:, None]).ravel()


def scan_poles(
    model: DeltaShellModel,
    region: SearchRegion,
    tol: float = 1e-12,
    n_boundary: int = 4096,
) -> list[ResonancePole]:
    """All resonance poles inside ``region``, sorted by E_R.

    Raises IncompleteScanError when the number found differs from
    :func:`count_zeros` on the same rectangle.
    """
    if region.im_max > 0:
        raise DomainError(f"resonance searches need im_max <= 0, got {region.im_max}")
    found = []
    for seed in seed_grid(region):
        try:
            pole = find_pole(model, seed, tol)
        except (ConvergenceError, NotAResonance):
            continue
        if region.contains(pole.k_pole):
            found.append(pole)
    found.sort(key=lambda p: (p.E_R, p.Gamma, p.k_pole.real))
    unique: list[ResonancePole] = []
    for p in found:
        if not any(abs(p.k_pole - q.k_pole) < 10 * tol for q in unique):
            unique.append(p)
    expected = count_zeros(model, region, n_boundary)
    if len(unique) != expected:
        raise IncompleteScanError(
            f"scan found {len(unique)} poles but the argument principle counts {expected}",
            len(unique),
            expected,
        )
    return unique
