"""Representation kits ``{b, a, eta}`` of convolution semigroups of measures.

Lévy measures are finite sums of point masses on ``G \\ {e}``. The Hunt
function and adapted coordinates share the hard-cutoff chart of
:mod:`twirling.lie_core`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import InvalidInput
from .lie_core import GroupElement, LieRepresentation, adapted_coordinates, group_exp

PSD_TOL = 1e-10
SYM_TOL = 1e-12
ATOM_DROP = 1e-15

HuntEvaluator = Callable[[GroupElement], float]


@dataclass(frozen=True, eq=False)
class LevyMeasure:
    """Finite atomic measure ``sum_k w_k delta_{g_k}``."""

    atoms: tuple = ()

    def __post_init__(self):
        atoms = tuple((g, float(w)) for g, w in self.atoms)
        for g, w in atoms:
            if not isinstance(g, GroupElement):
                raise InvalidInput("Lévy atoms must be GroupElement instances")
            if not (w > 0 and math.isfinite(w)):
                raise InvalidInput(f"Lévy weights must be positive and finite, got {w}")
            if np.linalg.norm(g.unitary - np.eye(g.dim)) <= 1e-12:
                raise InvalidInput("a Lévy measure cannot charge the identity")
        object.__setattr__(self, "atoms", atoms)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __add__(self, other: "LevyMeasure") -> "LevyMeasure":
        return LevyMeasure(self.atoms + other.atoms)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum()) if self.atoms else 0.0

    def scaled(self, factor: float) -> "LevyMeasure":
        if factor == 0:
            return LevyMeasure()
        return LevyMeasure(tuple((g, w * factor) for g, w in self.atoms))


def atoms_from_coords(rep: LieRepresentation, coords: Iterable, weights: Iterable[float]) -> LevyMeasure:
    """Convenience constructor placing atoms at ``exp(sum x_j X_j)``."""
    return LevyMeasure(tuple((group_exp(rep, x), w) for x, w in zip(coords, weights)))


@dataclass(frozen=True, eq=False)
class RepresentationKit:
    """Drift ``b``, PSD diffusion matrix ``a`` and Lévy measure ``eta``."""

    b: np.ndarray
    a: np.ndarray
    eta: LevyMeasure = field(default_factory=LevyMeasure)

    def __post_init__(self):
        b = np.array(self.b, dtype=float).reshape(-1)
        a = np.array(self.a, dtype=float)
        n = b.shape[0]
        if a.shape != (n, n):
            raise InvalidInput(f"diffusion matrix must be {n}x{n}, got {a.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidInput("kit entries must be finite")
        scale = max(1.0, float(np.abs(a).max(initial=0.0)))
        if np.abs(a - a.T).max(initial=0.0) > SYM_TOL * scale:
            raise InvalidInput("diffusion matrix must be symmetric")
        a = (a + a.T) / 2
        if n:
            w, v = np.linalg.eigh(a)
            if w.min() < -PSD_TOL * scale:
                raise InvalidInput(f"diffusion matrix is not PSD (min eigenvalue {w.min():.3e})")
            if w.min() < 0:
                a = (v * np.clip(w, 0, None)) @ v.T
                a = (a + a.T) / 2
        if not isinstance(self.eta, LevyMeasure):
            raise InvalidInput("eta must be a LevyMeasure")
        b.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @classmethod
    def zero(cls, n: int) -> "RepresentationKit":
        return cls(np.zeros(n), np.zeros((n, n)))


class KitClass(enum.Enum):
    GAUSSIAN = "gaussian"
    FIRST_KIND_JUMP = "first_kind_jump"
    PURE_DRIFT = "pure_drift"
    MIXED = "mixed"


def classify(kit: RepresentationKit) -> KitClass:
    has_a = bool(np.any(kit.a != 0))
    has_b = bool(np.any(kit.b != 0))
    if len(kit.eta) == 0:
        return KitClass.GAUSSIAN if has_a else KitClass.PURE_DRIFT
    if not has_a and not has_b:
        return KitClass.FIRST_KIND_JUMP
    return KitClass.MIXED


def atom_coordinates(rep: LieRepresentation, eta: LevyMeasure) -> np.ndarray:
    """Adapted coordinates of every atom, zero rows for atoms outside the chart."""
    out = np.zeros((len(eta), rep.dim_group))
    for k, (g, _) in enumerate(eta):
        x = adapted_coordinates(rep, g)
        if x is not None:
            out[k] = x
    return out


def drift_correction(rep: LieRepresentation, eta: LevyMeasure) -> np.ndarray:
    """``c^j(eta) = -sum_k w_k xbar^j(g_k)``."""
    if len(eta) == 0:
        return np.zeros(rep.dim_group)
    return -(eta.weights @ atom_coordinates(rep, eta))


def hunt_function(rep: LieRepresentation) -> HuntEvaluator:
    """``Phi(g) = min(|xbar(g)|^2, 1)`` inside the chart and ``1`` outside."""

    def phi(g: GroupElement) -> float:
        x = adapted_coordinates(rep, g)
        if x is None:
            return 1.0
        return min(float(x @ x), 1.0)

    return phi


def truncate(eta_large: LevyMeasure, m: float, hunt: HuntEvaluator) -> LevyMeasure:
    """Reweight atoms by ``1 - exp(-m Phi(g))``; tiny atoms are dropped."""
    if not m > 0:
        raise InvalidInput(f"truncation index must be positive, got {m}")
    atoms = []
    for g, w in eta_large:
        new_w = w * -math.expm1(-m * hunt(g))
        if new_w >= ATOM_DROP:
            atoms.append((g, new_w))
    return LevyMeasure(tuple(atoms))


def truncate_kit(rep: LieRepresentation, kit: RepresentationKit, m: float) -> RepresentationKit:
    return RepresentationKit(kit.b, kit.a, truncate(kit.eta, m, hunt_function(rep)))


def random_kit(rep: LieRepresentation, rng: np.random.Generator, *, n_atoms: Optional[int] = None,
               drift_scale: float = 1.0, diffusion_scale: float = 0.5,
               max_atoms: int = 3, rank: Optional[int] = None) -> RepresentationKit:
    """Draw a kit with Gaussian drift, Wishart-like diffusion and a few atoms.

    Atom coordinates are spread on both sides of the cutoff radius, so some
    atoms carry a compensator and some do not.
    """
    n = rep.dim_group
    b = drift_scale * rng.standard_normal(n)
    r = n if rank is None else rank
    f = diffusion_scale * rng.standard_normal((n, r))
    a = f @ f.T
    if n_atoms is None:
        n_atoms = int(rng.integers(0, max_atoms + 1))
    atoms = []
    for _ in range(n_atoms):
        direction = rng.standard_normal(n)
        direction /= np.linalg.norm(direction)
        radius = rng.uniform(0.05, 1.4) * rep.cutoff_radius
        atoms.append((group_exp(rep, radius * direction), float(rng.uniform(0.1, 2.0))))
    eta = LevyMeasure(tuple(atoms)) if atoms else LevyMeasure()
    return RepresentationKit(b, a, eta)
