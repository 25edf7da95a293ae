"""Command-line front end: ``twirling {generator,crosscheck,convergence,verify,oracle}``.

Every run reads one JSON config, writes deterministic primary outputs into
``--out`` and puts wall-clock data in a separate ``meta.json`` sidecar.
Exit codes: 0 ok, 1 verification failed, 2 config error, 3 numeric error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from . import __version__
from .analyzer import is_ccp_generator, is_cptp, pauli_decompose, truncation_convergence
from .classical_oracle import ScalarKit, lift_to_charges, u1_coherence_factor
from .errors import InvalidInput, InvalidSpec, NotPauli, NumericFailure, StepTooCoarse, TwirlingError
from .formats import (dump_json, gkls_to_json, kit_from_config, load_config,
                      representation_from_config, times_from_config, write_superop)
from .kit import RepresentationKit
from .sampler import DEFAULT_BLOCK_SIZE, PathConfig, twirl_mc
from .superop import Superoperator, evolve, full_generator, gkls_canonical, gkls_superop

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class _Run:
    def __init__(self, cfg: dict, out: Path, seed: Optional[int], tol: Optional[float]):
        self.cfg = cfg
        self.out = out
        self.seed = seed if seed is not None else cfg.get("seed")
        self.tol = tol if tol is not None else cfg.get("tolerance")

    def model(self) -> tuple:
        if "representation" not in self.cfg:
            raise InvalidSpec("config needs a 'representation' section")
        rep = representation_from_config(self.cfg["representation"])
        return rep, kit_from_config(rep, self.cfg.get("kit", {}))

    def require(self, key: str):
        if key not in self.cfg:
            raise InvalidSpec(f"config needs '{key}' for this command")
        return self.cfg[key]

    def path_config(self, t: float, dt: Optional[float] = None) -> PathConfig:
        if self.seed is None:
            raise InvalidSpec("a seed is required (config 'seed' or --seed)")
        dt = float(self.require("dt")) if dt is None else dt
        return PathConfig(dt=dt, t_final=max(t, dt), seed=int(self.seed),
                          block_size=int(self.cfg.get("block_size", DEFAULT_BLOCK_SIZE)))


def _t_tag(t: float) -> str:
    return repr(float(t)).replace(".", "p").replace("-", "m")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_generator(run: _Run) -> int:
    rep, kit = run.model()
    L = full_generator(rep, kit)
    form = gkls_canonical(rep, kit)
    rebuild = (gkls_superop(rep, form) - L).norm()
    write_superop(run.out / "generator.txt", L)
    dump_json(run.out / "gkls.json", dict(gkls_to_json(form), rebuild_error=rebuild))
    tol = run.tol if run.tol is not None else 1e-9
    reports = {}
    ok = True
    for t in times_from_config(run.cfg):
        rep_t = is_cptp(evolve(L, t), tol)
        reports[repr(t)] = rep_t.to_dict()
        ok &= rep_t.is_cptp
    dump_json(run.out / "channel_reports.json", reports)
    return EXIT_OK if ok else EXIT_FAILED


def crosscheck(rep, kit: RepresentationKit, t: float, n: int, cfg: PathConfig,
               workers: int = 1, dump: Optional[Path] = None) -> tuple[dict, Superoperator, Superoperator]:
    exact = evolve(full_generator(rep, kit), t)
    est = twirl_mc(rep, kit, t, n, cfg, workers=workers, dump_path=dump)
    deviation = (est.mean - exact).norm()
    report = {
        "t": t,
        "n_samples": n,
        "dt": cfg.dt,
        "seed": int(cfg.seed),
        "deviation": deviation,
        "std_error": est.std_error,
        "sigma_ratio": deviation / est.std_error if est.std_error > 0 else (0.0 if deviation == 0 else math.inf),
        "mean_jump_count": est.jump_count_mean,
        "rng": est.metadata["rng"],
        "block_size": cfg.block_size,
    }
    return report, est.mean, exact


def cmd_crosscheck(run: _Run) -> int:
    rep, kit = run.model()
    ts = times_from_config(run.cfg)
    if len(ts) != 1:
        raise InvalidSpec("crosscheck takes a single time 't'")
    t = ts[0]
    n = int(run.require("n_samples"))
    tol = run.tol if run.tol is not None else 0.05
    dump = run.out / "endpoints.bin" if run.cfg.get("dump_endpoints") else None
    report, mean, exact = crosscheck(rep, kit, t, n, run.path_config(t), int(run.cfg.get("workers", 1)), dump)
    report["tolerance"] = tol
    report["pass"] = bool(report["deviation"] <= tol)
    if not report["pass"]:
        report["message"] = (f"deviation {report['deviation']:.6g} exceeds tolerance {tol:.6g}; "
                             f"Monte-Carlo noise floor is about {report['std_error']:.6g}")
    write_superop(run.out / "mc_mean.txt", mean)
    write_superop(run.out / "exact.txt", exact)
    dump_json(run.out / "crosscheck.json", report)
    return EXIT_OK if report["pass"] else EXIT_FAILED


def _write_csv(path: Path, header: str, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([header, "deviation", "std_error"])
    for row in rows:
        w.writerow([repr(float(v)) if not isinstance(v, int) else v for v in row])
    path.write_text(buf.getvalue())


def cmd_convergence(run: _Run) -> int:
    rep, kit = run.model()
    study = run.cfg.get("study", "truncation")
    if study == "truncation":
        ms = run.cfg.get("m_list", [2.0 ** k for k in range(11)])
        rows = [(m, dev, 0.0) for m, dev in truncation_convergence(rep, kit, ms)]
        _write_csv(run.out / "convergence.csv", "m", rows)
        return EXIT_OK
    t = times_from_config(run.cfg)[0]
    exact = evolve(full_generator(rep, kit), t)
    workers = int(run.cfg.get("workers", 1))
    rows = []
    if study == "dt":
        n = int(run.require("n_samples"))
        for dt in run.require("dt_list"):
            est = twirl_mc(rep, kit, t, n, run.path_config(t, float(dt)), workers=workers)
            rows.append((float(dt), (est.mean - exact).norm(), est.std_error))
        header = "dt"
    else:
        cfg = run.path_config(t)
        for n in run.require("n_list"):
            est = twirl_mc(rep, kit, t, int(n), cfg, workers=workers)
            rows.append((int(n), (est.mean - exact).norm(), est.std_error))
        header = "n"
    _write_csv(run.out / "convergence.csv", header, rows)
    return EXIT_OK


def _embeddability_heuristic(s: Superoperator, t: float) -> dict:
    """Principal-branch logarithm test; other branches are not explored."""
    try:
        log = scipy.linalg.logm(s.matrix) / t
    except (ValueError, np.linalg.LinAlgError) as exc:
        return {"heuristic": True, "principal_log_ccp": False, "note": str(exc)}
    if not np.all(np.isfinite(log)):
        return {"heuristic": True, "principal_log_ccp": False, "note": "non-finite logarithm"}
    return {"heuristic": True, "principal_log_ccp": is_ccp_generator(Superoperator(log, s.dim_hilbert), 1e-7)}


def cmd_verify(run: _Run) -> int:
    rep, kit = run.model()
    tol = run.tol if run.tol is not None else 1e-9
    L = full_generator(rep, kit)
    form = gkls_canonical(rep, kit)
    rebuild = (gkls_superop(rep, form) - L).norm()
    result = {
        "tolerance": tol,
        "ccp_generator": is_ccp_generator(L),
        "gkls_rebuild_error": rebuild,
        "gkls_pairs": len(form.pairs),
        "times": {},
    }
    ok = result["ccp_generator"] and rebuild <= 1e-8
    for t in times_from_config(run.cfg):
        s = evolve(L, t)
        rep_t = is_cptp(s, tol)
        entry = rep_t.to_dict()
        if rep.dim_hilbert == 2:
            try:
                entry["pauli_probs"] = pauli_decompose(s, tol).probs.tolist()
            except NotPauli as exc:
                entry["notes"] = (entry["notes"] + "; " if entry["notes"] else "") + str(exc)
                ok = False
        if t > 0:
            entry["embeddability"] = _embeddability_heuristic(s, t)
        result["times"][repr(t)] = entry
        ok &= rep_t.is_cptp
    result["pass"] = bool(ok)
    dump_json(run.out / "verify.json", result)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_oracle(run: _Run) -> int:
    spec = run.require("oracle")
    kit = ScalarKit(spec.get("b", 0.0), spec.get("a", 0.0), tuple(map(tuple, spec.get("jumps", []))),
                    spec.get("cutoff", 0.9 * math.pi))
    charges = spec["charges"]
    if kit.cutoff * max(abs(k) for k in charges) >= math.pi and "cutoff" not in spec:
        kit = ScalarKit(kit.b, kit.a, kit.jumps, 0.9 * math.pi / max(abs(k) for k in charges))
    rep, rkit = lift_to_charges(kit, charges)
    tol = run.tol if run.tol is not None else 1e-10
    L = full_generator(rep, rkit)
    n = rep.dim_hilbert
    worst = 0.0
    rows = []
    for t in times_from_config(run.cfg):
        s = evolve(L, t).matrix
        for j in range(n):
            for l in range(n):
                idx = j + l * n
                expect = u1_coherence_factor(kit, charges[j] - charges[l], t)
                err = abs(s[idx, idx] - expect)
                worst = max(worst, err)
                rows.append({"t": t, "j": j, "l": l, "numeric": [s[idx, idx].real, s[idx, idx].imag],
                             "oracle": [expect.real, expect.imag], "error": err})
    report = {"max_error": worst, "tolerance": tol, "pass": bool(worst <= tol), "entries": rows}
    dump_json(run.out / "oracle.json", report)
    return EXIT_OK if report["pass"] else EXIT_FAILED


COMMANDS = {
    "generator": cmd_generator,
    "crosscheck": cmd_crosscheck,
    "convergence": cmd_convergence,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twirling", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out", type=Path, default=None, help="output directory (default: config 'output.dir' or '.')")
    parser.add_argument("--seed", type=_u64, default=None, help="overrides the config seed")
    parser.add_argument("--tol", type=float, default=None, help="overrides the config tolerance")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    started = _dt.datetime.now(_dt.timezone.utc)
    try:
        cfg = load_config(args.config)
        out = args.out or Path(cfg.get("output", {}).get("dir", "."))
        out.mkdir(parents=True, exist_ok=True)
        if args.tol is not None and not args.tol > 0:
            raise InvalidSpec("--tol must be positive")
        code = COMMANDS[args.command](_Run(cfg, out, args.seed, args.tol))
    except (InvalidSpec, InvalidInput, StepTooCoarse) as exc:
        print(f"twirling: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, ArithmeticError, np.linalg.LinAlgError, TwirlingError) as exc:
        print(f"twirling: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finished = _dt.datetime.now(_dt.timezone.utc)
    dump_json(out / "meta.json", {
        "command": args.command,
        "config": str(args.config),
        "exit_code": code,
        "started": started.isoformat(),
        "finished": finished.isoformat(),
        "version": __version__,
    })
    return code


if __name__ == "__main__":
    sys.exit(main())
