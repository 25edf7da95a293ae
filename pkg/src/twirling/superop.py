"""Superoperators on B(H) and the generator of a twirling semigroup.

Operators are column-stacked, ``vec(X A Y) = (Y^T kron X) vec(A)``, so an
``N x N`` operator becomes a length ``N**2`` vector and a superoperator an
``N**2 x N**2`` matrix.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import AmbiguousPreimage, InvalidInput, NotRepresentable
from .kit import LevyMeasure, RepresentationKit, atom_coordinates, drift_correction
from .lie_core import GroupElement, LieRepresentation, realify

VEC_CONVENTION = "vec-col-stack"


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, n: Optional[int] = None) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    return v.reshape((n, n), order="F")


@dataclass(frozen=True, eq=False)
class Superoperator:
    matrix: np.ndarray
    dim_hilbert: int

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        n2 = self.dim_hilbert ** 2
        if m.shape != (n2, n2):
            raise InvalidInput(f"superoperator on N={self.dim_hilbert} must be {n2}x{n2}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, n: int) -> "Superoperator":
        return cls(np.eye(n * n), n)

    @classmethod
    def zero(cls, n: int) -> "Superoperator":
        return cls(np.zeros((n * n, n * n)), n)

    def _check(self, other: "Superoperator"):
        if other.dim_hilbert != self.dim_hilbert:
            raise InvalidInput("superoperator dimensions differ")

    def __add__(self, other):
        self._check(other)
        return Superoperator(self.matrix + other.matrix, self.dim_hilbert)

    def __sub__(self, other):
        self._check(other)
        return Superoperator(self.matrix - other.matrix, self.dim_hilbert)

    def __neg__(self):
        return Superoperator(-self.matrix, self.dim_hilbert)

    def __mul__(self, scalar):
        return Superoperator(scalar * self.matrix, self.dim_hilbert)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return Superoperator(self.matrix @ other.matrix, self.dim_hilbert)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return apply(self, a)


# ---------------------------------------------------------------------------
# Elementary superoperators
# ---------------------------------------------------------------------------

def left_mult(x: np.ndarray) -> np.ndarray:
    """Matrix of ``A -> X A``."""
    return np.kron(np.eye(x.shape[0]), x)


def right_mult(y: np.ndarray) -> np.ndarray:
    """Matrix of ``A -> A Y``."""
    return np.kron(y.T, np.eye(y.shape[0]))


def sandwich(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix of ``A -> X A Y``."""
    return np.kron(y.T, x)


def commutator(x: np.ndarray) -> np.ndarray:
    """Matrix of ``A -> [X, A]``."""
    return left_mult(x) - right_mult(x)


def anticommutator(x: np.ndarray) -> np.ndarray:
    return left_mult(x) + right_mult(x)


def dissipator(f: np.ndarray) -> np.ndarray:
    """Matrix of ``A -> F A F^dagger - {F^dagger F, A}/2``."""
    fd = f.conj().T
    return sandwich(f, fd) - 0.5 * anticommutator(fd @ f)


def apply(s: Superoperator, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (s.dim_hilbert, s.dim_hilbert):
        raise InvalidInput(f"operator shape {a.shape} does not match N={s.dim_hilbert}")
    return unvec(s.matrix @ vec(a), s.dim_hilbert)


def uvee_matrix(u: np.ndarray) -> np.ndarray:
    return np.kron(u.conj(), u)


def uvee(rep: LieRepresentation, g: GroupElement) -> Superoperator:
    """Conjugation ``A -> U(g) A U(g)^dagger`` as a superoperator."""
    if g.unitary.shape != (rep.dim_hilbert, rep.dim_hilbert):
        raise InvalidInput("group element dimension does not match representation")
    return Superoperator(uvee_matrix(g.unitary), rep.dim_hilbert)


def twirl_exact(rep: LieRepresentation, mu: Sequence[tuple[GroupElement, float]]) -> Superoperator:
    """``sum_i w_i U(g_i) (.) U(g_i)^dagger`` for an atomic probability measure."""
    weights = np.array([w for _, w in mu], dtype=float)
    if weights.size == 0 or np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise InvalidInput("weights must be non-negative and sum to 1")
    n = rep.dim_hilbert
    out = np.zeros((n * n, n * n), dtype=complex)
    for (g, w) in mu:
        out += w * uvee(rep, g).matrix
    return Superoperator(out, n)


def commutator_superop(rep: LieRepresentation, coeffs) -> np.ndarray:
    """``sum_j c_j [X_j, .]``."""
    return commutator(rep.algebra_element(coeffs))


# ---------------------------------------------------------------------------
# Generator assembly
# ---------------------------------------------------------------------------

def gaussian_generator(rep: LieRepresentation, b, a) -> Superoperator:
    """``sum_j b_j [X_j, .] + sum_jk a_jk ({X_j X_k, .} - 2 X_j (.) X_k)``."""
    kit = RepresentationKit(b, a)  # validates shape, symmetry and positivity
    if kit.n != rep.dim_group:
        raise InvalidInput("kit size does not match representation")
    gens = rep.generators
    out = commutator_superop(rep, kit.b).astype(complex)
    for j in range(rep.dim_group):
        for k in range(rep.dim_group):
            ajk = kit.a[j, k]
            if ajk != 0:
                out += ajk * (anticommutator(gens[j] @ gens[k]) - 2 * sandwich(gens[j], gens[k]))
    return Superoperator(out, rep.dim_hilbert)


def jump_generator(rep: LieRepresentation, eta: LevyMeasure) -> Superoperator:
    """``sum_k w_k (U_k v U_k - I) + sum_j c_j(eta) [X_j, .]``."""
    n = rep.dim_hilbert
    if len(eta) == 0:
        return Superoperator.zero(n)
    out = np.zeros((n * n, n * n), dtype=complex)
    eye = np.eye(n * n)
    for g, w in eta:
        out += w * (uvee(rep, g).matrix - eye)
    out += commutator_superop(rep, drift_correction(rep, eta))
    return Superoperator(out, n)


def jump_generator_integral(rep: LieRepresentation, eta: LevyMeasure) -> Superoperator:
    """Integrand-by-integrand form ``sum_k w_k (U_k v U_k - I - sum_j xbar_j [X_j, .])``."""
    n = rep.dim_hilbert
    out = np.zeros((n * n, n * n), dtype=complex)
    eye = np.eye(n * n)
    coords = atom_coordinates(rep, eta)
    for (g, w), x in zip(eta, coords):
        out += w * (uvee(rep, g).matrix - eye - commutator_superop(rep, x))
    return Superoperator(out, n)


def full_generator(rep: LieRepresentation, kit: RepresentationKit) -> Superoperator:
    return gaussian_generator(rep, kit.b, kit.a) + jump_generator(rep, kit.eta)


# ---------------------------------------------------------------------------
# V_U and the GKLS canonical form
# ---------------------------------------------------------------------------

def traceless(h: np.ndarray) -> np.ndarray:
    n = h.shape[0]
    return h - np.trace(h) / n * np.eye(n)


@dataclass(frozen=True, eq=False)
class ProjectorVU:
    """HS-orthonormal basis of ``V_U``, the traceless part of ``i * pi_U(Lie G)``.

    ``coeffs`` is the ``D x n`` matrix with ``traceless(i X_j) = sum_d coeffs[d, j] basis[d]``.
    """

    basis: np.ndarray
    coeffs: np.ndarray
    dim_hilbert: int

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Orthogonal projector on the real vector space ``realify(Hermitian N x N)``."""
        q = np.stack([realify(e) for e in self.basis], axis=1) if self.dim else \
            np.zeros((2 * self.dim_hilbert ** 2, 0))
        return q @ q.T

    def components(self, h: np.ndarray) -> np.ndarray:
        """HS coordinates of the projection of ``h`` onto ``V_U``."""
        return np.array([np.real(np.trace(e @ h)) for e in self.basis])

    def project(self, h: np.ndarray) -> np.ndarray:
        c = self.components(h)
        n = self.dim_hilbert
        return np.tensordot(c, self.basis, axes=1) if self.dim else np.zeros((n, n), complex)

    def residual(self, h: np.ndarray) -> float:
        return float(np.linalg.norm(h - self.project(h)))


def projector_vu(rep: LieRepresentation, tol: float = 1e-10) -> ProjectorVU:
    n = rep.dim_hilbert
    herm = [traceless(1j * x) for x in rep.generators]
    mat = np.stack([realify(h) for h in herm], axis=1)  # (2N^2, n)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s.max(initial=0.0))))
    basis = []
    for d in range(rank):
        col = u[:, d]
        e = col[: n * n].reshape(n, n) + 1j * col[n * n:].reshape(n, n)
        basis.append((e + e.conj().T) / 2)
    basis = np.array(basis) if basis else np.zeros((0, n, n), complex)
    coeffs = np.array([[np.real(np.trace(e @ h)) for h in herm] for e in basis]).reshape(rank, rep.dim_group)
    return ProjectorVU(basis, coeffs, n)


@dataclass(frozen=True, eq=False)
class ResidualJump:
    """``gamma0 (U_eta - I)`` with ``U_eta`` an atomic random unitary map."""

    rate: float
    atoms: tuple  # (GroupElement, probability) pairs

    def superop(self, rep: LieRepresentation) -> Superoperator:
        return twirl_exact(rep, self.atoms)


@dataclass(frozen=True, eq=False)
class GKLSForm:
    """``-i[H, .] + sum_k gamma_k (F_k . F_k - {F_k^2, .}/2) + gamma0 (U - I)``."""

    H: np.ndarray
    pairs: tuple  # (gamma_k, F_k) with HS-orthonormal traceless Hermitian F_k
    residual: Optional[ResidualJump] = None

    @property
    def rates(self) -> np.ndarray:
        return np.array([g for g, _ in self.pairs], dtype=float)


def gkls_superop(rep: LieRepresentation, form: GKLSForm) -> Superoperator:
    """Rebuild the generator from its canonical form."""
    n = rep.dim_hilbert
    out = -1j * commutator(np.asarray(form.H, dtype=complex))
    for gamma, f in form.pairs:
        out = out + gamma * dissipator(np.asarray(f, dtype=complex))
    if form.residual is not None and form.residual.rate > 0:
        out = out + form.residual.rate * (form.residual.superop(rep).matrix - np.eye(n * n))
    return Superoperator(out, n)


def gkls_canonical(rep: LieRepresentation, kit: RepresentationKit, rate_tol: float = 1e-13) -> GKLSForm:
    """Canonical GKLS data of ``full_generator(rep, kit)``.

    The diffusion matrix is pushed into an orthonormal basis of ``V_U`` and
    diagonalised there, so the jump operators come out HS-orthonormal. The
    first-kind drift correction ``c(eta)`` joins ``b`` in the Hamiltonian.
    """
    proj = projector_vu(rep)
    t = proj.coeffs
    drift = kit.b + drift_correction(rep, kit.eta)
    # -i[H, .] = sum_j h_j [X_j, .] for H = traceless(i sum_j h_j X_j)
    h = traceless(1j * rep.algebra_element(drift))
    h = (h + h.conj().T) / 2
    pairs = []
    if proj.dim:
        m = t @ kit.a @ t.T
        mu, v = np.linalg.eigh((m + m.T) / 2)
        cutoff = rate_tol * max(1.0, float(np.abs(mu).max(initial=0.0)))
        for k in np.argsort(mu)[::-1]:
            if mu[k] > cutoff:
                f = np.tensordot(v[:, k], proj.basis, axes=1)
                pairs.append((float(2 * mu[k]), (f + f.conj().T) / 2))
    residual = None
    if len(kit.eta):
        mass = kit.eta.total_mass
        residual = ResidualJump(mass, tuple((g, w / mass) for g, w in kit.eta))
    return GKLSForm(h, tuple(pairs), residual)


def kit_from_gkls(rep: LieRepresentation, form: GKLSForm, tol: float = 1e-8) -> RepresentationKit:
    """Kit whose twirling generator equals the GKLS form (converse construction)."""
    proj = projector_vu(rep)
    ops = [np.asarray(form.H, dtype=complex)] + [np.asarray(f, dtype=complex) for _, f in form.pairs]
    for op in ops:
        scale = max(1.0, float(np.linalg.norm(op)))
        if abs(np.trace(op)) > tol * scale or proj.residual(op) > tol * scale:
            raise NotRepresentable("Hamiltonian or jump operator lies outside V_U")

    t = proj.coeffs
    rank = np.linalg.matrix_rank(t, tol=1e-10) if proj.dim else 0
    if rank < rep.dim_group:
        warnings.warn("pi_U is not injective modulo the identity; using minimum-norm preimages",
                      AmbiguousPreimage, stacklevel=2)

    def preimage(op):
        # op = sum_j d_j traceless(i X_j), solved in V_U coordinates
        if not proj.dim:
            return np.zeros(rep.dim_group)
        d, *_ = np.linalg.lstsq(t, proj.components(op), rcond=None)
        return d

    if form.residual is not None and form.residual.rate > 0:
        eta = LevyMeasure(tuple((g, form.residual.rate * p) for g, p in form.residual.atoms if p > 0))
    else:
        eta = LevyMeasure()
    b = preimage(form.H) - drift_correction(rep, eta)
    a = np.zeros((rep.dim_group, rep.dim_group))
    for gamma, f in form.pairs:
        d = preimage(f)
        a += 0.5 * gamma * np.outer(d, d)
    return RepresentationKit(b, (a + a.T) / 2, eta)


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------

def evolve(L: Superoperator, t: float) -> Superoperator:
    """``exp(t L)`` by Padé scaling-and-squaring."""
    if not t >= 0:
        raise InvalidInput(f"evolution time must be non-negative, got {t}")
    if t == 0:
        return Superoperator.identity(L.dim_hilbert)
    return Superoperator(scipy.linalg.expm(t * L.matrix), L.dim_hilbert)


def preserves_hermiticity(s: Superoperator, tol: float = 1e-10) -> bool:
    n = s.dim_hilbert
    scale = max(1.0, float(np.abs(s.matrix).max()))
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), complex)
            e[i, j] = 1
            lhs = apply(s, e.conj().T)
            rhs = apply(s, e).conj().T
            if np.abs(lhs - rhs).max() > tol * scale:
                return False
    return True
