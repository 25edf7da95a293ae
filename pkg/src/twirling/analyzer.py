"""Verification of channels and generators.

Choi matrices use ``J(S) = sum_ij |i><j| (x) S(|i><j|)``; complete positivity
is ``J(S) >= 0``, and conditional complete positivity of a generator is
positivity of ``J(L)`` on the orthocomplement of the maximally entangled vector.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import InvalidInput, NotPauli
from .kit import RepresentationKit, truncate_kit
from .lie_core import GroupElement, LieRepresentation
from .superop import Superoperator, full_generator, uvee, vec

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


@dataclass
class ChannelReport:
    is_trace_preserving: bool
    trace_margin: float
    is_unital: bool
    unital_margin: float
    choi_min_eig: float
    is_cptp: bool
    pauli_probs: Optional[list] = None
    notes: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def choi(s: Superoperator) -> np.ndarray:
    n = s.dim_hilbert
    # s.matrix[a + b N, i + j N] = <a| S(|i><j|) |b>
    t = s.matrix.reshape(n, n, n, n)  # [b, a, j, i]
    return t.transpose(3, 1, 2, 0).reshape(n * n, n * n)


def _hermitian_eigvals(m: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def is_cptp(s: Superoperator, tol: float = 1e-9) -> ChannelReport:
    if not tol > 0:
        raise InvalidInput("tolerance must be positive")
    n = s.dim_hilbert
    v = vec(np.eye(n))
    trace_margin = float(np.abs(v.conj() @ s.matrix - v.conj()).max())
    unital_margin = float(np.abs(s.matrix @ v - v).max())
    j = choi(s)
    min_eig = float(_hermitian_eigvals(j).min())
    herm_defect = float(np.abs(j - j.conj().T).max())
    tp = trace_margin <= tol
    notes = "" if herm_defect <= tol else f"Choi matrix not Hermitian (defect {herm_defect:.3e})"
    return ChannelReport(
        is_trace_preserving=tp,
        trace_margin=trace_margin,
        is_unital=unital_margin <= tol,
        unital_margin=unital_margin,
        choi_min_eig=min_eig,
        is_cptp=bool(tp and min_eig >= -tol and herm_defect <= tol),
        notes=notes,
    )


def projected_choi(L: Superoperator) -> np.ndarray:
    n = L.dim_hilbert
    omega = vec(np.eye(n)) / np.sqrt(n)
    p = np.eye(n * n) - np.outer(omega, omega.conj())
    return p @ choi(L) @ p


def is_ccp_generator(L: Superoperator, tol: Optional[float] = None) -> bool:
    """Conditional complete positivity; default tolerance ``1e-9 * ||L||_F``."""
    if tol is None:
        tol = 1e-9 * max(1.0, L.norm())
    pj = projected_choi(L)
    if np.abs(pj - pj.conj().T).max() > tol:
        return False
    return bool(_hermitian_eigvals(pj).min() >= -tol)


def choi_rank(s: Superoperator, tol: float = 1e-9) -> int:
    return int(np.sum(_hermitian_eigvals(choi(s)) > tol))


# ---------------------------------------------------------------------------
# Qubit random-unitary decomposition
# ---------------------------------------------------------------------------

def pauli_transfer_matrix(s: Superoperator) -> np.ndarray:
    """``4 x 4`` matrix ``R_ab = tr(sigma_a S(sigma_b)) / 2``, real iff S preserves Hermiticity."""
    if s.dim_hilbert != 2:
        raise InvalidInput("Pauli transfer matrix needs N = 2")
    r = np.empty((4, 4), dtype=complex)
    for b in range(4):
        out = s(PAULI[b])
        for a in range(4):
            r[a, b] = np.trace(PAULI[a] @ out) / 2
    return r


def rotation_unitary(rot: np.ndarray) -> np.ndarray:
    """SU(2) element ``V`` with ``V sigma_i V^dagger = sum_j rot[j, i] sigma_j``."""
    rv = Rotation.from_matrix(rot).as_rotvec()
    theta = float(np.linalg.norm(rv))
    if theta == 0:
        return np.eye(2, dtype=complex)
    nvec = rv / theta
    gen = np.tensordot(nvec, PAULI[1:], axes=1)
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * gen


@dataclass
class PauliDecomposition:
    """``S(A) = sum_a p_a (L sigma_a R) A (L sigma_a R)^dagger``."""

    probs: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def unitaries(self) -> list:
        return [self.left @ PAULI[a] @ self.right for a in range(4)]

    def superop(self) -> Superoperator:
        m = sum(p * np.kron(v.conj(), v) for p, v in zip(self.probs, self.unitaries))
        return Superoperator(m, 2)


def _pauli_probs(lam: np.ndarray) -> np.ndarray:
    lx, ly, lz = lam
    return np.array([1 + lx + ly + lz, 1 + lx - ly - lz, 1 - lx + ly - lz, 1 - lx - ly + lz]) / 4


def pauli_decompose(s: Superoperator, tol: float = 1e-9) -> PauliDecomposition:
    """Write a unital qubit channel as a frame-rotated Pauli channel.

    Axis-aligned maps (the non-unitary factor of the polar decomposition of
    the Bloch matrix is diagonal) are returned with ``right = I``; other maps
    go through a real SVD with both frames in SO(3). Raises :class:`NotPauli`
    when the map is not unital and trace preserving or the resulting weights
    are negative.
    """
    if s.dim_hilbert != 2:
        raise InvalidInput("pauli_decompose needs N = 2")
    r = pauli_transfer_matrix(s)
    if np.abs(r.imag).max() > tol:
        raise NotPauli("map does not preserve Hermiticity")
    r = r.real
    if np.abs(r[0, :] - [1, 0, 0, 0]).max() > tol or np.abs(r[1:, 0]).max() > tol:
        raise NotPauli("map is not unital and trace preserving")
    m = r[1:, 1:]
    w, sig, vt = np.linalg.svd(m)
    # each sign flip of a singular vector is paired with a flip of sig[2]
    if np.linalg.det(w) < 0:
        w[:, 2] *= -1
        sig[2] *= -1
    if np.linalg.det(vt) < 0:
        vt[2, :] *= -1
        sig[2] *= -1
    # m = w diag(sig) vt with w, vt in SO(3)
    rot = w @ vt
    p_sym = vt.T @ np.diag(sig) @ vt
    if np.abs(p_sym - np.diag(np.diag(p_sym))).max() <= tol:
        lam, left, right = np.diag(p_sym), rotation_unitary(rot), np.eye(2, dtype=complex)
    else:
        lam, left, right = sig, rotation_unitary(w), rotation_unitary(vt)
    probs = _pauli_probs(lam)
    if probs.min() < -tol:
        raise NotPauli(f"negative Pauli weight {probs.min():.3e}; map is not completely positive")
    dec = PauliDecomposition(probs, left, right)
    if np.abs(dec.superop().matrix - s.matrix).max() > max(tol, 1e-9) * 10:
        raise NotPauli("frame-rotated Pauli channel does not reproduce the map")
    return dec


# ---------------------------------------------------------------------------
# Covariance and truncation studies
# ---------------------------------------------------------------------------

def covariance_defect(rep: LieRepresentation, L: Superoperator, g: GroupElement) -> float:
    u = uvee(rep, g).matrix
    return float(np.linalg.norm(L.matrix @ u - u @ L.matrix))


def covariance_check(rep: LieRepresentation, L: Superoperator, g: GroupElement, tol: float = 1e-9) -> bool:
    """Whether ``g`` belongs to the covariance subgroup of the semigroup generated by ``L``."""
    return covariance_defect(rep, L, g) <= tol


def truncation_convergence(rep: LieRepresentation, kit_large: RepresentationKit,
                           ms: Sequence[float]) -> list[tuple[float, float]]:
    """``||L(kit truncated at m) - L(kit_large)||_F`` for each ``m``."""
    reference = full_generator(rep, kit_large)
    rows = []
    for m in ms:
        dev = (full_generator(rep, truncate_kit(rep, kit_large, m)) - reference).norm()
        rows.append((m, dev))
    return rows
