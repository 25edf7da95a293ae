"""Monte-Carlo paths on the group and the sampled twirling superoperator.

Paths use the left-increment Euler scheme ``g <- g exp(dx)`` with Gaussian
``dx ~ N((b + c) dt, 2 a dt)``, where ``c`` is the jump compensator, followed
by at most one right-multiplied jump per step. Paths are simulated in blocks
of ``block_size``. Block ``k`` draws its diffusion and jump streams from
``SeedSequence(seed, spawn_key=(k, 0))`` and ``(k, 1)``, so a result depends
on the seed and the block size but never on how blocks are scheduled.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InvalidInput, StepTooCoarse
from .kit import PSD_TOL, RepresentationKit, drift_correction
from .lie_core import GroupElement, LieRepresentation
from .superop import Superoperator

SCHEMES = ("euler_left_increment",)
RNG_ALGORITHM = "numpy.PCG64/SeedSequence(seed, spawn_key=(block, stream))"
DEFAULT_BLOCK_SIZE = 8192
MAX_JUMP_PROBABILITY = 0.1
U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class PathConfig:
    dt: float
    t_final: float
    seed: int
    scheme_tag: str = "euler_left_increment"
    block_size: int = DEFAULT_BLOCK_SIZE

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise InvalidInput(f"dt must be positive, got {self.dt}")
        if not (self.t_final > 0 and math.isfinite(self.t_final)):
            raise InvalidInput(f"t_final must be positive, got {self.t_final}")
        if self.dt > self.t_final:
            raise InvalidInput("dt must not exceed t_final")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed <= U64_MAX):
            raise InvalidInput("seed must be a 64-bit unsigned integer")
        if self.scheme_tag not in SCHEMES:
            raise InvalidInput(f"unknown scheme {self.scheme_tag!r}")
        if self.block_size < 1:
            raise InvalidInput("block_size must be positive")


@dataclass(frozen=True, eq=False)
class TwirlEstimate:
    mean: Superoperator
    n_samples: int
    std_error: float
    jump_count_mean: float = 0.0
    metadata: Optional[dict] = None


@dataclass(frozen=True, eq=False)
class EndpointBatch:
    unitaries: np.ndarray  # (n, N, N)
    jump_counts: np.ndarray  # (n,)


# ---------------------------------------------------------------------------
# Batched exponentials
# ---------------------------------------------------------------------------

def _batch_expm_skew(a: np.ndarray) -> np.ndarray:
    """``exp`` of a stack of skew-Hermitian matrices, shape ``(B, N, N)``."""
    n = a.shape[-1]
    if n == 1:
        return np.exp(a)
    if n == 2:
        a00, a01, a10, a11 = a[:, 0, 0], a[:, 0, 1], a[:, 1, 0], a[:, 1, 1]
        h = (a00 + a11) / 2
        d00 = a00 - h
        # traceless skew-Hermitian part squares to -det * I
        theta = np.sqrt(np.clip((-d00 * d00 - a01 * a10).real, 0.0, None))
        e = np.exp(h)
        c = e * np.cos(theta)
        s = e * np.sinc(theta / np.pi)
        out = np.empty_like(a)
        out[:, 0, 0] = c + s * d00
        out[:, 1, 1] = c - s * d00
        out[:, 0, 1] = s * a01
        out[:, 1, 0] = s * a10
        return out
    w, v = np.linalg.eigh(1j * a)
    return (v * np.exp(-1j * w)[:, None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def _batch_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.shape[-1] != 2:
        return x @ y
    out = np.empty_like(x)
    out[:, 0, 0] = x[:, 0, 0] * y[:, 0, 0] + x[:, 0, 1] * y[:, 1, 0]
    out[:, 0, 1] = x[:, 0, 0] * y[:, 0, 1] + x[:, 0, 1] * y[:, 1, 1]
    out[:, 1, 0] = x[:, 1, 0] * y[:, 0, 0] + x[:, 1, 1] * y[:, 1, 0]
    out[:, 1, 1] = x[:, 1, 0] * y[:, 0, 1] + x[:, 1, 1] * y[:, 1, 1]
    return out


class _Stepper:
    """Turns coordinate increments into unitary increments for one representation."""

    def __init__(self, rep: LieRepresentation):
        self.gens = rep.generators
        diag = np.einsum("jii->ji", self.gens)
        off = self.gens - np.einsum("ji,ik->jik", diag, np.eye(rep.dim_hilbert))
        self.diagonal = not np.any(off)
        self.diag = diag
        self.flat = self.gens.reshape(self.gens.shape[0], -1)

    def increments(self, dx: np.ndarray) -> np.ndarray:
        if self.diagonal:
            phases = np.exp(dx @ self.diag)  # (B, N)
            return phases[:, :, None] * np.eye(self.gens.shape[1])
        n = self.gens.shape[1]
        return _batch_expm_skew((dx @ self.flat).reshape(-1, n, n))


def _diffusion_factor(a: np.ndarray) -> np.ndarray:
    """``L`` with ``L L^T = a`` from the clamped spectral decomposition."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return np.zeros((0, 0))
    w, v = np.linalg.eigh((a + a.T) / 2)
    scale = max(1.0, float(np.abs(a).max()))
    if w.min() < -PSD_TOL * scale:
        raise InvalidInput(f"diffusion matrix is not PSD (min eigenvalue {w.min():.3e})")
    keep = w > PSD_TOL * scale
    return v[:, keep] * np.sqrt(w[keep])


# ---------------------------------------------------------------------------
# Path engine
# ---------------------------------------------------------------------------

def _step_count(t: float, dt: float) -> tuple[int, float]:
    steps = max(1, math.ceil(t / dt - 1e-12))
    return steps, t / steps


def _block_rngs(seed: int, block: int) -> tuple[np.random.Generator, np.random.Generator]:
    diff = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block, 0))))
    jump = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block, 1))))
    return diff, jump


class _PathEngine:
    def __init__(self, rep: LieRepresentation, kit: RepresentationKit, t: float, dt: float):
        if kit.n != rep.dim_group:
            raise InvalidInput("kit and representation dimensions differ")
        self.rep = rep
        self.n_steps, self.dt = _step_count(t, dt)
        self.drift = (kit.b + drift_correction(rep, kit.eta)) * self.dt
        self.factor = _diffusion_factor(kit.a) * math.sqrt(2 * self.dt)
        self.stepper = _Stepper(rep)
        eta = kit.eta
        self.has_jumps = len(eta) > 0
        if self.has_jumps:
            p_total = eta.total_mass * self.dt
            if p_total > MAX_JUMP_PROBABILITY:
                raise StepTooCoarse(
                    f"dt * total jump mass = {p_total:.3g} exceeds {MAX_JUMP_PROBABILITY}; reduce dt")
            self.jump_edges = np.cumsum(eta.weights * self.dt)
            self.jump_unitaries = np.stack([g.unitary for g, _ in eta])
            self.jump_diagonals = np.einsum("kii->ki", self.jump_unitaries)
            self.jumps_diagonal = bool(np.all(
                self.jump_unitaries == self.jump_diagonals[:, :, None] * np.eye(rep.dim_hilbert)))
        deterministic = not self.factor.size and not self.has_jumps
        self.drift_increment = self.stepper.increments(self.drift[None, :])[0] if deterministic else None

    def run_block(self, seed: int, block: int, size: int) -> EndpointBatch:
        n = self.rep.dim_hilbert
        diff_rng, jump_rng = _block_rngs(seed, block)
        counts = np.zeros(size, dtype=np.int64)
        if self.drift_increment is not None:
            one = np.eye(n, dtype=complex)
            for _ in range(self.n_steps):
                one = one @ self.drift_increment
            return EndpointBatch(np.broadcast_to(one, (size, n, n)).copy(), counts)
        diagonal = self.stepper.diagonal and (not self.has_jumps or self.jumps_diagonal)
        if diagonal:
            # commuting diagonal unitaries: track the phases only
            g = np.ones((size, n), dtype=complex)

            def step(x):
                return x * np.exp(self._dx(diff_rng, size) @ self.stepper.diag)

            def jump(x, hit, idx):
                return x[hit] * self.jump_diagonals[idx]
        else:
            g = np.broadcast_to(np.eye(n, dtype=complex), (size, n, n)).copy()

            def step(x):
                return _batch_matmul(x, self.stepper.increments(self._dx(diff_rng, size)))

            def jump(x, hit, idx):
                return x[hit] @ self.jump_unitaries[idx]
        for _ in range(self.n_steps):
            g = step(g)
            if self.has_jumps:
                u = jump_rng.random(size)
                idx = np.searchsorted(self.jump_edges, u, side="right")
                hit = idx < len(self.jump_edges)
                if np.any(hit):
                    g[hit] = jump(g, hit, idx[hit])
                    counts += hit
        if diagonal:
            g = g[:, :, None] * np.eye(n)
        return EndpointBatch(g, counts)

    def _dx(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if not self.factor.size:
            return np.broadcast_to(self.drift, (size, self.drift.shape[0]))
        return self.drift + rng.standard_normal((size, self.factor.shape[1])) @ self.factor.T


def _blocks(n: int, block_size: int) -> list[tuple[int, int]]:
    return [(k, min(block_size, n - k * block_size)) for k in range(math.ceil(n / block_size))]


def sample_endpoints(rep: LieRepresentation, kit: RepresentationKit, t: float, n: int,
                     cfg: PathConfig, workers: int = 1) -> EndpointBatch:
    """Endpoints ``g_i(t)`` of ``n`` independent paths, in path order."""
    if n < 1:
        raise InvalidInput("need at least one path")
    if t < 0:
        raise InvalidInput("time must be non-negative")
    dim = rep.dim_hilbert
    if t == 0:
        return EndpointBatch(np.broadcast_to(np.eye(dim, dtype=complex), (n, dim, dim)).copy(),
                             np.zeros(n, dtype=np.int64))
    engine = _PathEngine(rep, kit, t, cfg.dt)
    blocks = _blocks(n, cfg.block_size)
    results = _map_blocks(lambda kb: engine.run_block(cfg.seed, *kb), blocks, workers)
    return EndpointBatch(np.concatenate([b.unitaries for b in results]),
                         np.concatenate([b.jump_counts for b in results]))


def _map_blocks(fn, blocks, workers: int) -> list:
    if workers <= 1 or len(blocks) == 1:
        return [fn(kb) for kb in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def sample_gaussian_path(rep: LieRepresentation, b, a, cfg: PathConfig) -> GroupElement:
    kit = RepresentationKit(b, a)
    return GroupElement(sample_endpoints(rep, kit, cfg.t_final, 1, cfg).unitaries[0])


def sample_jump_path(rep: LieRepresentation, kit: RepresentationKit, cfg: PathConfig) -> GroupElement:
    return GroupElement(sample_endpoints(rep, kit, cfg.t_final, 1, cfg).unitaries[0])


# ---------------------------------------------------------------------------
# Twirl estimator
# ---------------------------------------------------------------------------

def _uvee_sums(u: np.ndarray) -> tuple[np.ndarray, float]:
    """``sum_i conj(U_i) (x) U_i`` and ``sum_i ||conj(U_i) (x) U_i||_F^2``."""
    n = u.shape[-1]
    s = np.einsum("pab,pcd->acbd", u.conj(), u).reshape(n * n, n * n)
    sq = float(np.sum(np.sum(np.abs(u) ** 2, axis=(1, 2)) ** 2))
    return s, sq


def twirl_mc(rep: LieRepresentation, kit: RepresentationKit, t: float, n: int, cfg: PathConfig,
             workers: int = 1, dump_path: Optional[Path] = None) -> TwirlEstimate:
    """Sample mean of ``uvee(g_i(t))`` with its Frobenius jackknife standard error.

    Block sums are reduced in block order, so the estimate is bit-identical
    for any ``workers``. With ``dump_path`` the endpoints are written as raw
    complex128 (``n x N^2``, each row ``vec(U_i)``) next to a JSON metadata file.
    """
    if n < 1:
        raise InvalidInput("need at least one path")
    batch = sample_endpoints(rep, kit, t, n, cfg, workers)
    dim = rep.dim_hilbert
    total = np.zeros((dim * dim, dim * dim), dtype=complex)
    total_sq = 0.0
    for k, size in _blocks(n, cfg.block_size):
        s, sq = _uvee_sums(batch.unitaries[k * cfg.block_size: k * cfg.block_size + size])
        total += s
        total_sq += sq
    mean = total / n
    if n > 1:
        var = max(0.0, (total_sq - n * float(np.sum(np.abs(mean) ** 2))) / (n * (n - 1)))
        std_error = math.sqrt(var)
    else:
        std_error = 0.0
    n_steps, dt_eff = _step_count(t, cfg.dt) if t > 0 else (0, 0.0)
    meta = {
        "seed": int(cfg.seed),
        "dt": cfg.dt,
        "dt_effective": dt_eff,
        "n_steps": n_steps,
        "t": t,
        "n": n,
        "std_error": std_error,
        "rng": RNG_ALGORITHM,
        "block_size": cfg.block_size,
        "scheme": cfg.scheme_tag,
    }
    if dump_path is not None:
        write_endpoint_dump(dump_path, batch.unitaries, meta)
    return TwirlEstimate(Superoperator(mean, dim), n, std_error,
                         float(batch.jump_counts.mean()), meta)


def write_endpoint_dump(path: Path, unitaries: np.ndarray, meta: dict) -> None:
    path = Path(path)
    n, dim, _ = unitaries.shape
    rows = np.ascontiguousarray(np.swapaxes(unitaries, 1, 2).reshape(n, dim * dim), dtype="<c16")
    path.write_bytes(rows.tobytes())
    meta = dict(meta, shape=[n, dim * dim], dtype="complex128-le", row="vec-col-stack")
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def read_endpoint_dump(path: Path) -> np.ndarray:
    path = Path(path)
    meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    n, n2 = meta["shape"]
    dim = int(round(math.sqrt(n2)))
    rows = np.frombuffer(path.read_bytes(), dtype="<c16").reshape(n, n2)
    return np.swapaxes(rows.reshape(n, dim, dim), 1, 2).copy()
