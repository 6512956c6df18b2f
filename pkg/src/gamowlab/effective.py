"""Finite effective theories: a few Gamow levels with the background dropped.

In the Gamow basis the effective Hamiltonian is diagonal with complex entries
z_i = E_i - i*Gamma_i/2, so each amplitude evolves as c_i exp(-i z_i t). Only
forward evolution (t >= 0) exists; there is deliberately no inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SemigroupDomainError
from .poles import ResonancePole
from .spectral import PreparedState, gamow_coefficient


@dataclass(frozen=True)
class EffectiveModel:
    """Decaying levels ``(z_i, c_i)``; N = 2 is the Lee-Oehme-Yang case."""

    energies: tuple[complex, ...]
    coefficients: tuple[complex, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "energies", tuple(complex(z) for z in self.energies))
        object.__setattr__(self, "coefficients", tuple(complex(c) for c in self.coefficients))
        if not self.energies:
            raise DomainError("an effective model needs at least one level")
        if len(self.energies) != len(self.coefficients):
            raise DomainError("one coefficient per level required")
        if any(z.imag >= 0 for z in self.energies):
            raise DomainError(f"every level must decay (Im z < 0), got {self.energies}")
        if self.labels is not None and len(self.labels) != len(self.energies):
            raise DomainError("one label per level required")

    @property
    def widths(self) -> np.ndarray:
        return -2.0 * np.array([z.imag for z in self.energies])

    def advanced(self, t: float) -> EffectiveModel:
        """The same levels with coefficients evolved forward by ``t``."""
        return EffectiveModel(self.energies, tuple(evolve_effective(self, t)), self.labels)

    @classmethod
    def from_poles(
        cls,
        state: PreparedState,
        poles: list[ResonancePole],
        labels: tuple[str, ...] | None = None,
    ) -> EffectiveModel:
        """Levels at the given poles with coefficients from the prepared state."""
        return cls(
            tuple(p.z_R for p in poles),
            tuple(gamow_coefficient(state, p) for p in poles),
            labels,
        )


def evolve_effective(m: EffectiveModel, t) -> np.ndarray:
    """c_i(t) = c_i exp(-i z_i t); shape (N,) for scalar t, (len(t), N) otherwise."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise SemigroupDomainError(f"effective evolution is a semigroup: t >= 0 only, got t={t!r}")
    z = np.asarray(m.energies)
    c = np.asarray(m.coefficients)
    return c * np.exp(-1j * np.multiply.outer(t_arr, z))


def intensity(m: EffectiveModel, t):
    """|sum_i c_i(t)|^2."""
    amp = evolve_effective(m, t).sum(axis=-1)
    return amp.real**2 + amp.imag**2
