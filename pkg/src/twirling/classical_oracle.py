"""Closed-form Lévy–Khintchine quantities on the real line and on U(1).

These serve as independent oracles: on a charge representation every
coherence ``|j><l|`` of the twirling semigroup is multiplied by
``exp(t * psi(k_j - k_l))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, InvalidSpec
from .kit import LevyMeasure, RepresentationKit
from .lie_core import LieRepresentation, group_exp, u1_charges


@dataclass(frozen=True)
class ScalarKit:
    """Drift ``b``, diffusion ``a >= 0`` and jumps ``(x, w)`` for a Lévy process on R.

    ``cutoff`` is the radius inside which a jump offset is its own adapted
    coordinate; outside, the compensator vanishes.
    """

    b: float = 0.0
    a: float = 0.0
    jumps: tuple = field(default=())
    cutoff: float = 0.9 * math.pi

    def __post_init__(self):
        if self.a < 0:
            raise InvalidInput("diffusion coefficient must be non-negative")
        jumps = tuple((float(x), float(w)) for x, w in self.jumps)
        if any(w <= 0 for _, w in jumps):
            raise InvalidInput("jump rates must be positive")
        object.__setattr__(self, "jumps", jumps)

    def xbar(self, x: float) -> float:
        return x if abs(x) < self.cutoff else 0.0


def char_exponent(kit: ScalarKit, lam: float) -> complex:
    """``psi(l) = i b l - a l^2 + sum_k w_k (e^{i l x_k} - 1 - i l xbar(x_k))``."""
    psi = 1j * kit.b * lam - kit.a * lam * lam
    for x, w in kit.jumps:
        psi += w * (np.exp(1j * lam * x) - 1 - 1j * lam * kit.xbar(x))
    return complex(psi)


def u1_coherence_factor(kit: ScalarKit, m: int, t: float) -> complex:
    if t < 0:
        raise InvalidInput("time must be non-negative")
    return complex(np.exp(t * char_exponent(kit, m)))


def heat_kernel(a: float, t: float, y):
    """Fundamental solution of ``d/dt p = a p''`` on R."""
    y = np.asarray(y, dtype=float)
    return np.exp(-y * y / (4 * a * t)) / math.sqrt(4 * math.pi * a * t)


def lift_to_charges(kit: ScalarKit, charges) -> tuple[LieRepresentation, RepresentationKit]:
    """Charge representation plus kit with the same generator data as ``kit``.

    The charges must be coprime and jump offsets lie in ``(-pi, pi]`` with
    ``cutoff * max|k| < pi``; otherwise the matrix chart of U(G) and the
    scalar cutoff rule disagree about which jumps are compensated.
    """
    k = [int(c) for c in charges]
    nonzero = [abs(c) for c in k if c]
    if not nonzero or math.gcd(*nonzero) != 1:
        raise InvalidSpec("charges must include coprime non-zero entries")
    if kit.cutoff * max(nonzero) >= math.pi:
        raise InvalidSpec("cutoff too large for a single-valued logarithm on these charges")
    for x, _ in kit.jumps:
        if not -math.pi < x <= math.pi:
            raise InvalidInput(f"jump offset {x} outside (-pi, pi]")
    rep = u1_charges(k, cutoff_radius=kit.cutoff)
    eta = LevyMeasure(tuple((group_exp(rep, [x]), w) for x, w in kit.jumps))
    return rep, RepresentationKit([kit.b], [[kit.a]], eta)
