"""Finite-dimensional unitary representations of matrix Lie groups.

A representation is stored through the images ``X_j = pi_U(xi_j)`` of a fixed
Lie-algebra basis. These are skew-Hermitian ``N x N`` matrices, and group
elements are the unitaries ``U(g)`` they exponentiate to. The abstract group is
never materialised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import InvalidInput, InvalidSpec, NumericFailure

SKEW_TOL = 1e-12
UNITARY_TOL = 1e-10
SPAN_RESIDUAL_TOL = 1e-8

FAMILIES = ("su2_spin", "suN_defining", "u1_charges", "torus_charges", "custom")


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def realify(m: np.ndarray) -> np.ndarray:
    """Real vector whose Euclidean product equals Re tr(A^dagger B)."""
    m = np.asarray(m)
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


def is_skew_hermitian(m: np.ndarray, tol: float = SKEW_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    return float(np.abs(m + m.conj().T).max(initial=0.0)) <= tol * scale


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


@dataclass(frozen=True, eq=False)
class LieRepresentation:
    """Derived representation ``pi_U`` in a fixed basis.

    Attributes
    ----------
    generators:
        Array of shape ``(n, N, N)`` holding the skew-Hermitian ``X_j``.
    cutoff_radius:
        Radius, in coordinate space, of the chart on which adapted coordinates
        agree with canonical coordinates. Outside it they are zero.
    family_tag, params:
        Provenance of the matrices; ``custom`` for user-supplied lists.
    """

    generators: np.ndarray
    cutoff_radius: float
    family_tag: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        gens = np.asarray(self.generators, dtype=complex)
        if gens.ndim != 3 or gens.shape[1] != gens.shape[2] or gens.shape[0] < 1:
            raise InvalidSpec(f"generators must have shape (n, N, N), got {gens.shape}")
        for j, x in enumerate(gens):
            if not is_skew_hermitian(x):
                raise InvalidSpec(f"generator {j} is not skew-Hermitian")
        if not (self.cutoff_radius > 0 and math.isfinite(self.cutoff_radius)):
            raise InvalidSpec("cutoff_radius must be a positive finite number")
        if self.family_tag not in FAMILIES:
            raise InvalidSpec(f"unknown family tag {self.family_tag!r}")
        object.__setattr__(self, "generators", _freeze(gens))
        # real least-squares design matrix for decomposing into the generator span
        design = np.stack([realify(x) for x in gens], axis=1)
        design.setflags(write=False)
        object.__setattr__(self, "_design", design)

    @property
    def dim_group(self) -> int:
        return self.generators.shape[0]

    @property
    def dim_hilbert(self) -> int:
        return self.generators.shape[1]

    def algebra_element(self, x: Sequence[float]) -> np.ndarray:
        """Return ``sum_j x_j X_j``."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim_group,):
            raise InvalidInput(f"expected {self.dim_group} coordinates, got shape {x.shape}")
        return np.tensordot(x, self.generators, axes=1)

    def decompose(self, m: np.ndarray) -> tuple[np.ndarray, float]:
        """Least-squares real coefficients of ``m`` in the generator span and the residual."""
        target = realify(m)
        coef, *_ = np.linalg.lstsq(self._design, target, rcond=None)
        resid = float(np.linalg.norm(self._design @ coef - target))
        return coef, resid

    def __repr__(self):
        return (f"LieRepresentation(family={self.family_tag}, params={self.params}, "
                f"n={self.dim_group}, N={self.dim_hilbert}, r={self.cutoff_radius:.6g})")


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A unitary ``U(g)``, with canonical coordinates when known to be in the chart."""

    unitary: np.ndarray
    coords: Optional[np.ndarray] = None

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise InvalidInput("unitary must be a square matrix")
        object.__setattr__(self, "unitary", _freeze(u))
        if self.coords is not None:
            c = np.array(self.coords, dtype=float)
            c.setflags(write=False)
            object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.unitary @ other.unitary)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.unitary.conj().T,
                            None if self.coords is None else -self.coords)


def group_element(unitary, tol: float = 1e-9) -> GroupElement:
    """Validate and wrap a user-supplied unitary."""
    u = np.asarray(unitary, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidInput("unitary must be a square matrix")
    if unitarity_defect(u) > tol:
        raise InvalidInput("matrix is not unitary")
    return GroupElement(u)


def identity(rep: LieRepresentation) -> GroupElement:
    return GroupElement(np.eye(rep.dim_hilbert), np.zeros(rep.dim_group))


# ---------------------------------------------------------------------------
# Representation families
# ---------------------------------------------------------------------------

def _default_cutoff(gens: np.ndarray, conservative: bool) -> float:
    norms = np.array([np.linalg.norm(x, 2) for x in gens])
    if conservative:
        # bounds ||sum x_j X_j||_op by ||x||_2 for arbitrary generator lists
        scale = float(np.sqrt(np.sum(norms ** 2)))
    else:
        scale = float(norms.max())
    if scale == 0.0:
        return math.inf
    return 0.9 * math.pi / scale


def _finish(gens, family, params, cutoff_radius, conservative=False) -> LieRepresentation:
    gens = np.asarray(gens, dtype=complex)
    if cutoff_radius is None:
        cutoff_radius = _default_cutoff(gens, conservative)
        if not math.isfinite(cutoff_radius):
            # all generators vanish: any finite radius works
            cutoff_radius = 1.0
    return LieRepresentation(gens, float(cutoff_radius), family, dict(params))


def spin_matrices(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angular-momentum matrices ``(J_x, J_y, J_z)`` of spin ``j``."""
    two_j = Fraction(j) * 2
    if two_j.denominator != 1 or two_j < 0:
        raise InvalidSpec(f"spin must be a non-negative half-integer, got {j!r}")
    dim = int(two_j) + 1
    jv = float(Fraction(j))
    m = jv - np.arange(dim)
    jp = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        # <m+1| J_+ |m> with m = m[k]
        jp[k - 1, k] = math.sqrt(jv * (jv + 1) - m[k] * (m[k] + 1))
    jx = (jp + jp.conj().T) / 2
    jy = (jp - jp.conj().T) / 2j
    jz = np.diag(m).astype(complex)
    return jx, jy, jz


def su2_spin(j, cutoff_radius: Optional[float] = None) -> LieRepresentation:
    """Spin-``j`` irrep of su(2) with ``X_k = -i J_k``, so ``[X_1, X_2] = X_3``."""
    jx, jy, jz = spin_matrices(j)
    gens = -1j * np.stack([jx, jy, jz])
    return _finish(gens, "su2_spin", {"spin": float(Fraction(j))}, cutoff_radius)


def gell_mann(n: int) -> np.ndarray:
    """Generalised Gell-Mann matrices in the standard ordering, ``tr(l_a l_b) = 2 delta_ab``."""
    mats = []
    for k in range(1, n):
        for j in range(k):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            mats += [s, a]
        d = np.zeros((n, n), dtype=complex)
        d[:k, :k] = np.eye(k)
        d[k, k] = -k
        mats.append(d * math.sqrt(2.0 / (k * (k + 1))))
    return np.array(mats)


def suN_defining(n: int, cutoff_radius: Optional[float] = None) -> LieRepresentation:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidSpec(f"suN_defining needs an integer N >= 2, got {n!r}")
    gens = -0.5j * gell_mann(int(n))
    return _finish(gens, "suN_defining", {"N": int(n)}, cutoff_radius)


def _integer_list(values, what) -> list[int]:
    out = []
    for v in values:
        if isinstance(v, bool) or not float(v).is_integer():
            raise InvalidSpec(f"{what} must be integers, got {v!r}")
        out.append(int(v))
    return out


def u1_charges(charges: Sequence[int], cutoff_radius: Optional[float] = None) -> LieRepresentation:
    """U(1) acting by ``theta -> diag(exp(i k_1 theta), ..., exp(i k_N theta))``."""
    k = _integer_list(charges, "charges")
    if not k:
        raise InvalidSpec("u1_charges needs at least one charge")
    gens = (1j * np.diag(np.array(k, dtype=float)))[None]
    return _finish(gens, "u1_charges", {"charges": k}, cutoff_radius)


def torus_charges(charges, cutoff_radius: Optional[float] = None) -> LieRepresentation:
    """n-torus with generator ``X_j = i diag(K[j, :])`` for an integer matrix ``K``."""
    rows = [_integer_list(row, "charges") for row in charges]
    if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
        raise InvalidSpec("torus_charges needs a non-empty rectangular integer matrix")
    km = np.array(rows, dtype=float)
    gens = np.stack([1j * np.diag(row) for row in km])
    return _finish(gens, "torus_charges", {"charges": rows}, cutoff_radius, conservative=True)


def custom(generators, cutoff_radius: Optional[float] = None) -> LieRepresentation:
    gens = np.asarray(generators, dtype=complex)
    if gens.ndim == 2:
        gens = gens[None]
    return _finish(gens, "custom", {}, cutoff_radius, conservative=True)


def build_representation(family: str, **params) -> LieRepresentation:
    """Instantiate a representation family by tag.

    >>> build_representation("u1_charges", charges=[0, 1]).dim_hilbert
    2
    """
    if family not in FAMILIES:
        raise InvalidSpec(f"unknown representation family {family!r}")
    cutoff = params.pop("cutoff_radius", None)
    try:
        if family == "su2_spin":
            return su2_spin(params.pop("spin"), cutoff)
        if family == "suN_defining":
            return suN_defining(params.pop("N"), cutoff)
        if family == "u1_charges":
            return u1_charges(params.pop("charges"), cutoff)
        if family == "torus_charges":
            return torus_charges(params.pop("charges"), cutoff)
        if family == "custom":
            return custom(params.pop("generators"), cutoff)
    except KeyError as exc:
        raise InvalidSpec(f"missing parameter {exc.args[0]!r} for family {family!r}") from None
    finally:
        if params:
            raise InvalidSpec(f"unexpected parameters for {family!r}: {sorted(params)}")


# ---------------------------------------------------------------------------
# Exponential and logarithm charts
# ---------------------------------------------------------------------------

def expm_skew(x: np.ndarray) -> np.ndarray:
    """Exponential of a skew-Hermitian matrix via the spectral theorem."""
    w, v = np.linalg.eigh(1j * x)
    out = (v * np.exp(-1j * w)) @ v.conj().T
    if not np.all(np.isfinite(out)):
        raise NumericFailure("matrix exponential overflowed")
    return out


def group_exp(rep: LieRepresentation, x) -> GroupElement:
    """``U = exp(sum_j x_j X_j)``; coordinates are recorded inside the chart."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInput("coordinates must be finite")
    u = expm_skew(rep.algebra_element(x))
    inside = float(np.linalg.norm(x)) < rep.cutoff_radius
    return GroupElement(u, x.copy() if inside else None)


def principal_log(u: np.ndarray) -> np.ndarray:
    """Principal logarithm of a unitary, computed from its complex Schur form."""
    t, q = scipy.linalg.schur(np.asarray(u, dtype=complex), output="complex")
    phases = np.angle(np.diag(t))
    return (q * (1j * phases)) @ q.conj().T


def adapted_coordinates(rep: LieRepresentation, g: GroupElement) -> Optional[np.ndarray]:
    """Adapted coordinates of ``g``, or ``None`` outside the chart (read as zero).

    The chart is the set of unitaries whose principal logarithm lies in the
    real span of the generators with coordinate norm below ``cutoff_radius``.
    """
    u = g.unitary
    if u.shape != (rep.dim_hilbert, rep.dim_hilbert):
        raise InvalidInput("group element dimension does not match representation")
    if unitarity_defect(u) > 1e-9:
        raise InvalidInput("group element is not unitary")
    log = principal_log(u)
    coef, resid = rep.decompose(log)
    if resid > SPAN_RESIDUAL_TOL * max(1.0, float(np.linalg.norm(log))):
        return None
    if float(np.linalg.norm(coef)) >= rep.cutoff_radius:
        return None
    return coef


def adapted_or_zero(rep: LieRepresentation, g: GroupElement) -> np.ndarray:
    x = adapted_coordinates(rep, g)
    return np.zeros(rep.dim_group) if x is None else x
