"""Continuous-time Monte Carlo cross-validation of the exact machinery.

Direct (exact-in-law) event-driven simulation: exponential waiting times from
the total exit rate, transitions drawn proportionally, configurations
weighted by their dwell time. The per-event work lives in a compiled kernel
when available, with a pure-Python twin selected at import failure or when
MASEP_PURE_PYTHON is set; both produce byte-identical reports from the same
seed (see `_gillespie_py` for the shared contract).

Randomness: numpy's counter-based philox4x64 generator, keyed per replica as
key = (replica_index << 64) | seed, counter starting at 0, consuming two
uniform doubles per event. This pins the whole simulation given (seed,
replica count), which the determinism tests rely on.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import isqrt, sqrt

import numpy as np

from .boundary import build_boundary
from .errors import DimensionCapExceeded, InvalidComparison, InvalidSpec
from .linalg import format_rat
from .markov import LatticeModel, StationaryResult

OCCUPANCY_CAP = 1_000_000
BURN_CHUNK = 1 << 18
N_BATCHES = 20

GENERATOR_NAME = "numpy-philox4x64(key = replica_index << 64 | seed, counter = 0)"


def _select_kernel(name: str | None):
    if name is None:
        name = "python" if os.environ.get("MASEP_PURE_PYTHON") else "compiled"
    if name == "compiled":
        try:
            from . import _gillespie_core as core

            return core.run_chunk, "compiled"
        except ImportError:
            name = "python"
    if name == "python":
        from . import _gillespie_py as pyk

        return pyk.run_chunk, "python"
    raise ValueError(f"unknown kernel {name!r}")


def active_kernel_name() -> str:
    return _select_kernel(None)[1]


@dataclass(frozen=True)
class SimConfig:
    """Event budget and bookkeeping knobs for one simulation run.

    record_stride thins the dwell-time tally: only every stride-th event
    contributes its dwell time (an optional decorrelation device; time
    weighting keeps the estimate unbiased). Currents always use all
    post-burn-in events.
    """

    seed: int
    total_events: int
    burn_in_events: int = 0
    record_stride: int = 1

    def __post_init__(self):
        if not 0 <= self.burn_in_events < self.total_events:
            raise InvalidSpec("need total_events > burn_in_events >= 0")
        if self.record_stride < 1:
            raise InvalidSpec("record_stride must be >= 1")


@dataclass
class SimReport:
    """Time-weighted observables of one (possibly multi-replica) run.

    boundary_currents holds, per side and species s, the net creation rate of
    s by that boundary (events creating s minus events destroying s, per unit
    model time); in steady state left[s] + right[s] vanishes within noise.
    boundary_event_counts keeps the raw source->target event counts behind
    those rates.
    """

    generator: str
    seed: int
    replicas: int
    config: dict
    model: dict
    events: int
    model_time: float
    recorded_time: float
    empirical_distribution: dict
    site_densities: list
    boundary_currents: dict
    boundary_current_stderr: dict
    boundary_event_counts: dict
    bond_event_counts: list
    absorbing_state: str | None

    def to_json_dict(self) -> dict:
        return {
            "generator": self.generator,
            "seed": self.seed,
            "replicas": self.replicas,
            "config": self.config,
            "model": self.model,
            "events": self.events,
            "model_time": self.model_time,
            "recorded_time": self.recorded_time,
            "empirical_distribution": self.empirical_distribution,
            "site_densities": self.site_densities,
            "boundary_currents": self.boundary_currents,
            "boundary_current_stderr": self.boundary_current_stderr,
            "boundary_event_counts": self.boundary_event_counts,
            "bond_event_counts": self.bond_event_counts,
            "absorbing_state": self.absorbing_state,
        }


def _boundary_columns(model: LatticeModel, spec) -> np.ndarray:
    """Off-diagonal boundary rates as a float row-per-source table."""
    n = model.n_species_total
    b = build_boundary(spec, model.q)
    cols = np.zeros(n * n, dtype=np.float64)
    for src in range(n):
        for dst in range(n):
            if dst != src:
                cols[src * n + dst] = float(b[dst, src])
    return cols


def _config_key(config) -> str:
    return ",".join(str(t) for t in config)


@dataclass
class _ReplicaTally:
    occ: np.ndarray
    cl: np.ndarray          # N*N source->target counts, left boundary
    cr: np.ndarray
    bondc: np.ndarray       # swap counts per bond
    events: int
    elapsed: float
    recorded: float
    batches: list           # (elapsed, cl_delta, cr_delta) per batch
    absorbed_at: str | None


def _run_replica(model: LatticeModel, cfg: SimConfig, replica: int, kernel) -> _ReplicaTally:
    n = model.n_species_total
    length = model.sites
    space = model.space
    key = (replica << 64) | (cfg.seed & 0xFFFFFFFFFFFFFFFF)
    rng = np.random.Generator(np.random.Philox(key=key))

    tau = np.zeros(length, dtype=np.int64)  # all sites start as holes
    pw = np.array([n ** (length - 1 - k) for k in range(length)], dtype=np.int64)
    lcol = _boundary_columns(model, model.left)
    rcol = _boundary_columns(model, model.right)
    qrate = float(model.q)
    slots = np.zeros((length - 1) + 2 * n, dtype=np.float64)
    _init_slots(tau, slots, lcol, rcol, qrate)
    occ = np.zeros(space.dim, dtype=np.float64)
    cl = np.zeros(n * n, dtype=np.int64)
    cr = np.zeros(n * n, dtype=np.int64)
    bondc = np.zeros(max(length - 1, 1), dtype=np.int64)
    flat = 0
    elapsed = 0.0
    recorded = 0.0
    events_done = 0
    absorbed = False

    # burn-in: consume the stream without recording
    remaining = cfg.burn_in_events
    while remaining > 0 and not absorbed:
        chunk = min(remaining, BURN_CHUNK)
        u = rng.random(2 * chunk)
        done, _dt, _rec, flat, absorbed = kernel(
            tau, slots, lcol, rcol, qrate, chunk, u, occ, cl, cr, bondc,
            False, cfg.record_stride, 0, flat, pw,
        )
        remaining -= done

    batches = []
    record_events = cfg.total_events - cfg.burn_in_events
    per_batch = max(1, record_events // N_BATCHES)
    start_index = 0
    while start_index < record_events and not absorbed:
        chunk = min(per_batch, record_events - start_index)
        u = rng.random(2 * chunk)
        cl0, cr0 = cl.copy(), cr.copy()
        done, dt, rec, flat, absorbed = kernel(
            tau, slots, lcol, rcol, qrate, chunk, u, occ, cl, cr, bondc,
            True, cfg.record_stride, start_index, flat, pw,
        )
        elapsed += dt
        recorded += rec
        events_done += done
        if done:
            batches.append((dt, (cl - cl0).tolist(), (cr - cr0).tolist()))
        start_index += done

    absorbed_at = _config_key(space.config(flat)) if absorbed else None
    return _ReplicaTally(
        occ, cl, cr, bondc, events_done, elapsed, recorded, batches, absorbed_at
    )


def _init_slots(tau, slots, lcol, rcol, qrate):
    length = len(tau)
    n = isqrt(len(lcol))
    for k in range(length - 1):
        a, b = int(tau[k]), int(tau[k + 1])
        slots[k] = 0.0 if a == b else (1.0 if a > b else qrate)
    for j in range(n):
        slots[length - 1 + j] = lcol[int(tau[0]) * n + j]
        slots[length - 1 + n + j] = rcol[int(tau[length - 1]) * n + j]


def _batch_stderr(rates: list) -> float | None:
    if len(rates) < 2:
        return None
    mean = sum(rates) / len(rates)
    var = sum((r - mean) ** 2 for r in rates) / (len(rates) - 1)
    return sqrt(var / len(rates))


def simulate(model: LatticeModel, cfg: SimConfig, replicas: int = 1,
             kernel: str | None = None, max_workers: int | None = None) -> SimReport:
    """Run the simulation and aggregate time-weighted observables.

    Replicas use derived keys (replica index in the high key word) and merge
    by summing tallies in replica order, so the result is deterministic under
    any worker count. MASEP_THREADS (or max_workers) caps the fan-out.
    """
    space = model.space
    if space.dim > OCCUPANCY_CAP:
        raise DimensionCapExceeded(
            f"{space.dim} configurations exceed the simulation cap {OCCUPANCY_CAP}"
        )
    run_chunk, _ = _select_kernel(kernel)
    if max_workers is None:
        max_workers = int(os.environ.get("MASEP_THREADS", "0")) or None
    if replicas == 1:
        tallies = [_run_replica(model, cfg, 0, run_chunk)]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [
                pool.submit(_run_replica, model, cfg, r, run_chunk)
                for r in range(replicas)
            ]
            tallies = [f.result() for f in futures]

    n = model.n_species_total
    occ = np.zeros(space.dim, dtype=np.float64)
    cl = np.zeros(n * n, dtype=np.int64)
    cr = np.zeros(n * n, dtype=np.int64)
    bondc = np.zeros(max(model.sites - 1, 1), dtype=np.int64)
    events = 0
    elapsed = 0.0
    recorded = 0.0
    batches = []
    absorbed_at = None
    for t in tallies:
        occ += t.occ
        cl += t.cl
        cr += t.cr
        bondc += t.bondc
        events += t.events
        elapsed += t.elapsed
        recorded += t.recorded
        batches.extend(t.batches)
        if t.absorbed_at is not None and absorbed_at is None:
            absorbed_at = t.absorbed_at

    empirical = {}
    densities = [[0.0] * n for _ in range(model.sites)]
    if recorded > 0.0:
        for idx in range(space.dim):
            w = float(occ[idx])
            if w != 0.0:
                config = space.config(idx)
                empirical[_config_key(config)] = w / recorded
                for site, species in enumerate(config):
                    densities[site][species - 1] += w / recorded

    def _net(counts, s):
        created = sum(int(counts[i * n + s]) for i in range(n))
        destroyed = sum(int(counts[s * n + j]) for j in range(n))
        return created - destroyed

    currents = {"left": [0.0] * n, "right": [0.0] * n}
    stderr = {"left": [None] * n, "right": [None] * n}
    if elapsed > 0.0:
        currents["left"] = [_net(cl, s) / elapsed for s in range(n)]
        currents["right"] = [_net(cr, s) / elapsed for s in range(n)]
        for side, pick in (("left", 1), ("right", 2)):
            for s in range(n):
                rates = [_net(b[pick], s) / b[0] for b in batches if b[0] > 0.0]
                stderr[side][s] = _batch_stderr(rates)

    counts_out = {
        "left": [[int(cl[i * n + j]) for j in range(n)] for i in range(n)],
        "right": [[int(cr[i * n + j]) for j in range(n)] for i in range(n)],
    }
    return SimReport(
        generator=GENERATOR_NAME,
        seed=cfg.seed,
        replicas=replicas,
        config={
            "total_events": cfg.total_events,
            "burn_in_events": cfg.burn_in_events,
            "record_stride": cfg.record_stride,
        },
        model={
            "N": n,
            "L": model.sites,
            "q": format_rat(model.q),
            "left": model.left.to_record(),
            "right": model.right.to_record(),
        },
        events=events,
        model_time=elapsed,
        recorded_time=recorded,
        empirical_distribution=empirical,
        site_densities=densities,
        boundary_currents=currents,
        boundary_current_stderr=stderr,
        boundary_event_counts=counts_out,
        bond_event_counts=[int(x) for x in bondc] if model.sites > 1 else [],
        absorbing_state=absorbed_at,
    )


@dataclass
class DivergenceRecord:
    """Distance measures between an empirical and an exact distribution."""

    tv_distance: float
    max_abs_deviation: float
    chi_square: float

    def to_json_dict(self) -> dict:
        return {
            "tv_distance": self.tv_distance,
            "max_abs_deviation": self.max_abs_deviation,
            "chi_square": self.chi_square,
        }


def compare_empirical(report: SimReport, exact: StationaryResult) -> DivergenceRecord:
    """Total variation, max pointwise gap, and a chi-square-like statistic."""
    if exact.distribution is None:
        raise InvalidComparison("exact kernel is not one-dimensional")
    n = report.model["N"]
    length = report.model["L"]
    from .linalg import TensorSpace

    space = TensorSpace(n, length)
    if space.dim != len(exact.distribution):
        raise InvalidComparison(
            f"distribution length {len(exact.distribution)} != {space.dim}"
        )
    emp = [0.0] * space.dim
    for key, weight in report.empirical_distribution.items():
        config = tuple(int(x) for x in key.split(","))
        if len(config) != length or not all(1 <= t <= n for t in config):
            raise InvalidComparison(f"configuration key {key!r} outside the model space")
        emp[space.flat_index(config)] = weight
    exact_f = [float(x) for x in exact.distribution]
    tv = 0.5 * sum(abs(e - x) for e, x in zip(emp, exact_f))
    mx = max(abs(e - x) for e, x in zip(emp, exact_f))
    chi = sum((e - x) ** 2 / x for e, x in zip(emp, exact_f) if x > 0.0)
    return DivergenceRecord(tv_distance=tv, max_abs_deviation=mx, chi_square=chi)
