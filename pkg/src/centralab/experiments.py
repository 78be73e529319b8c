"""Seeded batch experiments producing deterministic reports.

Instances are enumerated up front in a fixed order, evaluated on a thread
pool, and merged back by index, so the thread count only changes
scheduling.  Wall-clock timing is left out of reports unless requested.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .certify import certify_smiley, matrix_digest
from .decomp import random_matrix, random_normal, random_spectral_of_type
from .errors import BatchConfigError, CentralabError
from .io import parse_matrix
from .numlin import DEFAULT_TOL, ToleranceConfig
from .shiftlab import shift_truncation

FAMILIES = ("explicit-files", "random-generic", "random-normal", "random-type-m",
            "shift-truncation")


def _positive_int(value, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise BatchConfigError(f"{what} must be a positive integer, got {value!r}")
    return value


@dataclass(frozen=True)
class BatchConfig:
    family: str
    sizes: tuple = ()
    kl_grid: tuple = ((1, 1),)
    seeds: tuple = (0,)
    m: int | None = None
    tolerances: ToleranceConfig = DEFAULT_TOL
    output_path: str | None = None
    inputs: tuple = ()
    cond_bound: float = 20.0
    threads: int = 1
    record_timing: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise BatchConfigError(
                f"family must be one of {', '.join(FAMILIES)}, got {self.family!r}")
        object.__setattr__(self, "sizes", tuple(_positive_int(n, "size") for n in self.sizes))
        grid = []
        for pair in self.kl_grid:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise BatchConfigError(f"kl_grid entries must be [k, l] pairs, got {pair!r}")
            grid.append((_positive_int(pair[0], "k"), _positive_int(pair[1], "l")))
        if not grid:
            raise BatchConfigError("kl_grid must be nonempty")
        object.__setattr__(self, "kl_grid", tuple(grid))
        seeds = tuple(self.seeds)
        if not seeds or not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0
                                for s in seeds):
            raise BatchConfigError("seeds must be a nonempty list of non-negative integers")
        object.__setattr__(self, "seeds", seeds)
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        if self.family != "explicit-files" and not self.sizes:
            raise BatchConfigError("sizes must be nonempty")
        if self.family == "random-type-m":
            if self.m is None:
                raise BatchConfigError("family random-type-m requires m")
            if not isinstance(self.m, int) or isinstance(self.m, bool) or self.m < 0:
                raise BatchConfigError(f"m must be a non-negative integer, got {self.m!r}")
            small = [n for n in self.sizes if n < self.m + 1]
            if small:
                raise BatchConfigError(f"random-type-m needs n ≥ m+1 = {self.m + 1}, got {small}")
        if not (np.isfinite(self.cond_bound) and self.cond_bound >= 1):
            raise BatchConfigError("cond_bound must be ≥ 1")
        _positive_int(self.threads, "threads")

    @classmethod
    def from_dict(cls, doc: dict, base_dir=None) -> "BatchConfig":
        if not isinstance(doc, dict):
            raise BatchConfigError("batch config must be a JSON object")
        known = {"family", "sizes", "kl_grid", "seeds", "m", "tolerances", "output_path",
                 "inputs", "cond_bound", "threads", "record_timing"}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise BatchConfigError(f"unknown config field(s): {', '.join(unknown)}")
        if "family" not in doc:
            raise BatchConfigError("config needs a family")
        kwargs = dict(doc)
        if "tolerances" in kwargs:
            try:
                kwargs["tolerances"] = ToleranceConfig(**kwargs["tolerances"])
            except (TypeError, ValueError) as exc:
                raise BatchConfigError(f"bad tolerances: {exc}") from None
        if base_dir is not None and "inputs" in kwargs:
            kwargs["inputs"] = [str(Path(base_dir, p)) for p in kwargs["inputs"]]
        for key in ("sizes", "kl_grid", "seeds", "inputs"):
            if key in kwargs and not isinstance(kwargs[key], list):
                raise BatchConfigError(f"{key} must be a list")
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "BatchConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise BatchConfigError(f"{path}: no such config file") from None
        except json.JSONDecodeError as exc:
            raise BatchConfigError(f"{path}: not valid JSON ({exc.msg})") from None
        return cls.from_dict(doc, base_dir=path.parent)

    def echo(self) -> dict:
        # threads and output_path are excluded so they cannot change report bytes
        return {
            "family": self.family,
            "sizes": list(self.sizes),
            "kl_grid": [list(p) for p in self.kl_grid],
            "seeds": list(self.seeds),
            "m": self.m,
            "inputs": list(self.inputs),
            "cond_bound": float(self.cond_bound),
        }


@dataclass(frozen=True)
class Instance:
    index: int
    n: int
    seed: int | None
    source: str | None
    k: int
    l: int


def expected_containment(family: str, m: int | None, k: int, l: int) -> str:
    """What a row asserts.

    Type-m rows assert 'smiley' for k <= l with l >= 2m+1 and are
    'exploratory' otherwise, since nothing is claimed below that threshold.
    Other families assert 'proper' for k <= l: C_k(C_l(A)) sits in
    C_l(C_l(A)), which every finite matrix keeps inside Pol(A).  Rows with
    k > l are always 'exploratory'.
    """
    if k > l:
        return "exploratory"
    if family == "random-type-m":
        return "smiley" if l >= 2 * m + 1 else "exploratory"
    return "proper"


def enumerate_instances(cfg: BatchConfig) -> list[Instance]:
    out = []
    if cfg.family == "explicit-files":
        matrices = [(None, None, p) for p in cfg.inputs]
    elif cfg.family == "shift-truncation":
        matrices = [(n, None, None) for n in cfg.sizes]
    else:
        matrices = [(n, s, None) for n in cfg.sizes for s in cfg.seeds]
    for n, seed, source in matrices:
        for k, l in cfg.kl_grid:
            out.append(Instance(len(out), n, seed, source, k, l))
    return out


def build_matrix(cfg: BatchConfig, inst: Instance) -> np.ndarray:
    if cfg.family == "explicit-files":
        return parse_matrix(inst.source)
    if cfg.family == "random-generic":
        return random_matrix(inst.n, inst.seed, "generic")
    if cfg.family == "random-normal":
        return random_normal(inst.n, inst.seed)
    if cfg.family == "random-type-m":
        return random_spectral_of_type(inst.n, cfg.m, inst.seed, cfg.cond_bound)[0]
    return shift_truncation(inst.n)


def run_instance(cfg: BatchConfig, inst: Instance) -> dict:
    start = time.perf_counter()
    expect = expected_containment(cfg.family, cfg.m, inst.k, inst.l)
    row = {"index": inst.index, "family": cfg.family, "n": inst.n, "seed": inst.seed,
           "source": inst.source, "k": inst.k, "l": inst.l, "expected": expect,
           "digest": None, "dims": None, "residuals": None, "verdicts": None,
           "warnings": [], "assertion_holds": None, "error": None}
    try:
        A = build_matrix(cfg, inst)
        row["n"] = int(A.shape[0])
        row["digest"] = matrix_digest(A)
        cert = certify_smiley(A, inst.k, inst.l, cfg.tolerances, seed=inst.seed).to_dict()
        for key in ("dims", "residuals", "verdicts", "warnings"):
            row[key] = cert[key]
        if expect == "proper":
            row["assertion_holds"] = bool(cert["verdicts"]["is_proper"])
        elif expect == "smiley":
            row["assertion_holds"] = bool(cert["verdicts"]["is_smiley"])
    except CentralabError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    if cfg.record_timing:
        row["runtime_ms"] = (time.perf_counter() - start) * 1e3
    return row


def aggregate(rows: list[dict]) -> dict:
    asserted = [r for r in rows if r["assertion_holds"] is not None]
    ok = [r for r in rows if r["verdicts"] is not None]
    return {
        "total": len(rows),
        "asserted": len(asserted),
        "asserted_passed": sum(r["assertion_holds"] for r in asserted),
        "asserted_failed": sum(not r["assertion_holds"] for r in asserted),
        "exploratory": sum(r["expected"] == "exploratory" for r in rows),
        "smiley": sum(r["verdicts"]["is_smiley"] for r in ok),
        "proper": sum(r["verdicts"]["is_proper"] for r in ok),
        "errors": sum(r["error"] is not None for r in rows),
    }


@dataclass
class ExperimentReport:
    config: dict
    tolerances: dict
    instances: list = field(default_factory=list)
    runtime_ms: float | None = None
    version: str = __version__

    @property
    def aggregate(self) -> dict:
        return aggregate(self.instances)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "tolerances": self.tolerances,
            "instances": self.instances,
            "aggregate": self.aggregate,
            "runtime_ms": self.runtime_ms,
        }

    @classmethod
    def empty(cls, tol: ToleranceConfig = DEFAULT_TOL) -> "ExperimentReport":
        return cls(config={}, tolerances=tol.as_dict())


def batch_run(cfg: BatchConfig, threads: int | None = None) -> ExperimentReport:
    """Evaluate every instance of ``cfg``; rows come back in instance order."""
    threads = cfg.threads if threads is None else threads
    _positive_int(threads, "threads")
    start = time.perf_counter()
    instances = enumerate_instances(cfg)
    if threads == 1:
        rows = [run_instance(cfg, inst) for inst in instances]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda inst: run_instance(cfg, inst), instances))
    elapsed = (time.perf_counter() - start) * 1e3 if cfg.record_timing else None
    return ExperimentReport(config=cfg.echo(), tolerances=cfg.tolerances.as_dict(),
                            instances=rows, runtime_ms=elapsed)
