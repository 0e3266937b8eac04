"""Time-discretized simulation of finite competing-particle systems.

Named particles follow an explicit Euler scheme: each step assigns drifts by
the ranking frozen at the step start, then adds independent Gaussian
increments.  Trajectories are independent work items, each owning its own
counter-based random stream, so results are bit-reproducible and independent
of batching.

The ranked view of a recorded trajectory can be decomposed back into
per-rank Brownian parts and collision local times; the local times are
recovered telescopically from the ranked dynamics, starting at the bottom
rank where the boundary term vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .laws import GapLaw, exponential_from_uniform, positions_from_gaps
from .rng import RngSpec
from .stats import EnsembleSummary, summarize

__all__ = [
    "OVERFLOW_LIMIT",
    "RecordSpec",
    "SimConfig",
    "Trajectory",
    "LocalTimeEstimate",
    "SimulationOverflowError",
    "step",
    "simulate_ensemble",
    "reconstruct_ranked_decomposition",
]

#: Positions beyond this magnitude abort the trajectory: with unit diffusion
#: and the drift specs used here, reaching it means the configuration blew up.
OVERFLOW_LIMIT = 1e9

# Memory budget (float64 count) for one batch of increment arrays.
_BATCH_FLOAT_BUDGET = 32_000_000


class SimulationOverflowError(RuntimeError):
    """A position left [-OVERFLOW_LIMIT, OVERFLOW_LIMIT] (or went NaN).

    Carries the trajectory index and its random stream so the failure can be
    replayed in isolation.
    """

    def __init__(self, trajectory: int, step_index: int, rng: RngSpec):
        super().__init__(
            f"trajectory {trajectory} overflowed at step {step_index}; replay with "
            f"RngSpec(master_seed={rng.master_seed}, stream={rng.stream})"
        )
        self.trajectory = trajectory
        self.step_index = step_index
        self.rng = rng


@dataclass(frozen=True)
class RecordSpec:
    """Which observables an ensemble run keeps.

    ``keep_steps`` retains per-step positions, rank permutations and Gaussian
    increments (needed for the ranked decomposition); ``path_stride`` > 0
    snapshots named positions every that many steps.
    """

    final_gaps: bool = True
    displacement_ranks: tuple[int, ...] = ()
    path_stride: int = 0
    keep_steps: bool = False


@dataclass(frozen=True)
class SimConfig:
    """Everything one ensemble run depends on."""

    drifts: np.ndarray
    initial_gaps: GapLaw | np.ndarray
    horizon: float = 1.0
    dt: float = 1e-3
    trajectories: int = 1
    rng: RngSpec = RngSpec(0, 0)
    record: RecordSpec = RecordSpec()

    def __post_init__(self):
        drifts = np.asarray(self.drifts, dtype=float)
        if drifts.ndim != 1 or drifts.size < 2:
            raise ValueError("need a drift vector of length N >= 2")
        if not np.all(np.isfinite(drifts)):
            raise ValueError("drifts must be finite")
        drifts.setflags(write=False)
        object.__setattr__(self, "drifts", drifts)
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.dt > self.horizon:
            raise ValueError(f"dt={self.dt} exceeds horizon T={self.horizon}")
        if self.trajectories < 1:
            raise ValueError(f"need at least one trajectory, got {self.trajectories}")
        n = drifts.size
        if isinstance(self.initial_gaps, GapLaw):
            if len(self.initial_gaps) < n - 1:
                raise ValueError(
                    f"initial gap law has {len(self.initial_gaps)} rates, need {n - 1}"
                )
        else:
            gaps = np.asarray(self.initial_gaps, dtype=float)
            if gaps.shape != (n - 1,):
                raise ValueError(f"explicit initial gaps must have shape ({n - 1},)")
            if np.any(gaps < 0.0) or not np.all(np.isfinite(gaps)):
                raise ValueError("initial gaps must be finite and nonnegative")
            gaps.setflags(write=False)
            object.__setattr__(self, "initial_gaps", gaps)
        for k in self.record.displacement_ranks:
            if not 1 <= k <= n:
                raise ValueError(f"displacement rank {k} outside 1..{n}")

    @property
    def n_particles(self) -> int:
        return self.drifts.size

    @property
    def n_steps(self) -> int:
        steps = int(round(self.horizon / self.dt))
        if abs(steps * self.dt - self.horizon) > 1e-9 * max(1.0, self.horizon):
            raise ValueError(f"horizon {self.horizon} is not a multiple of dt {self.dt}")
        return steps


@dataclass
class Trajectory:
    """One recorded path: named positions plus what the decomposition needs."""

    index: int
    rng: RngSpec
    grid: np.ndarray
    positions: np.ndarray  # (n_steps+1, N) named positions
    perms: np.ndarray | None = None  # (n_steps, N): name occupying each rank at step start
    increments: np.ndarray | None = None  # (n_steps, N) unit Gaussians, by name

    @property
    def dt(self) -> float:
        return float(self.grid[1] - self.grid[0])


@dataclass
class LocalTimeEstimate:
    """Collision local times L_(k,k+1) on the grid, for k = 1..N-1.

    The boundary processes L_(0,1) and L_(N,N+1) are identically zero by
    convention; ``pair`` returns them as such.
    """

    grid: np.ndarray
    values: np.ndarray  # (n_steps+1, N-1)

    @property
    def n_particles(self) -> int:
        return self.values.shape[1] + 1

    def pair(self, k: int) -> np.ndarray:
        if k == 0 or k == self.n_particles:
            return np.zeros(self.grid.size)
        if not 1 <= k < self.n_particles:
            raise ValueError(f"no collision pair ({k},{k + 1}) in an N={self.n_particles} system")
        return self.values[:, k - 1]

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    def min_increment(self) -> float:
        return float(self.increments().min())


def step(positions, drifts, dt: float, gaussians) -> np.ndarray:
    """One Euler step; drifts are assigned by the ranking at the step start.

    Ties are broken by smaller name.  Raises SimulationOverflowError-style
    ValueError on non-finite output.
    """
    pos = np.asarray(positions, dtype=float)
    drift_arr = np.asarray(drifts, dtype=float)
    gauss = np.asarray(gaussians, dtype=float)
    if not pos.shape == drift_arr.shape == gauss.shape:
        raise ValueError("positions, drifts and gaussians must have identical shapes")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    order = np.argsort(pos, kind="stable")
    by_name = np.empty_like(pos)
    by_name[order] = drift_arr
    out = pos.copy()
    out += by_name * dt
    out += math.sqrt(dt) * gauss
    amax = float(np.max(np.abs(out)))
    if not amax <= OVERFLOW_LIMIT:
        raise ValueError(f"step produced a non-finite or overflowing position (|x| ~ {amax!r})")
    return out


def _advance_recording(pos, drifts, dt, sqdt, inc, limit, positions_out, perms_out):
    # Same op order as the kernels, plus per-step recording.
    n_rows, n = pos.shape
    steps = inc.shape[1]
    drift_rows = np.broadcast_to(drifts, (n_rows, n))
    by_name = np.empty_like(pos)
    positions_out[:, 0, :] = pos
    for t in range(steps):
        order = np.argsort(pos, axis=1, kind="stable")
        perms_out[:, t, :] = order
        np.put_along_axis(by_name, order, drift_rows, axis=1)
        pos += by_name * dt
        pos += sqdt * inc[:, t, :]
        amax = np.max(np.abs(pos))
        if not amax <= limit:
            bad = ~(np.abs(pos) <= limit)
            return int(np.nonzero(bad.any(axis=1))[0][0]), t
        positions_out[:, t + 1, :] = pos
    return None


def _advance_stride(pos, drifts, dt, sqdt, inc, limit, stride, snaps_out):
    n_rows, n = pos.shape
    steps = inc.shape[1]
    drift_rows = np.broadcast_to(drifts, (n_rows, n))
    by_name = np.empty_like(pos)
    snaps_out[:, 0, :] = pos
    for t in range(steps):
        order = np.argsort(pos, axis=1, kind="stable")
        np.put_along_axis(by_name, order, drift_rows, axis=1)
        pos += by_name * dt
        pos += sqdt * inc[:, t, :]
        amax = np.max(np.abs(pos))
        if not amax <= limit:
            bad = ~(np.abs(pos) <= limit)
            return int(np.nonzero(bad.any(axis=1))[0][0]), t
        if (t + 1) % stride == 0:
            snaps_out[:, (t + 1) // stride, :] = pos
    return None


def simulate_ensemble(config: SimConfig) -> EnsembleSummary:
    """Run M independent trajectories and aggregate the requested observables.

    Trajectory j draws from stream ``config.rng.substream(j)``: first the
    initial gaps (when started from a law), then all Gaussian increments.
    Aggregation happens in trajectory order, so the summary is independent
    of batch size and backend scheduling.
    """
    drifts = config.drifts
    n = config.n_particles
    n_steps = config.n_steps
    m_total = config.trajectories
    dt = config.dt
    sqdt = math.sqrt(dt)
    rec = config.record
    law = config.initial_gaps if isinstance(config.initial_gaps, GapLaw) else None
    law_rates = law.rates[: n - 1] if law is not None else None

    ranks = np.asarray(rec.displacement_ranks, dtype=int)
    final_gaps = np.empty((m_total, n - 1)) if rec.final_gaps else None
    displacements = np.empty((m_total, ranks.size)) if ranks.size else None
    recorded: list[Trajectory] | None = [] if rec.keep_steps else None
    grid = np.arange(n_steps + 1) * dt

    snaps = None
    snap_times = None
    if rec.path_stride:
        if n_steps % rec.path_stride:
            raise ValueError(
                f"path_stride {rec.path_stride} does not divide {n_steps} steps"
            )
        n_snaps = n_steps // rec.path_stride
        snaps = np.empty((m_total, n_snaps + 1, n))
        snap_times = grid[:: rec.path_stride]

    batch_rows = max(1, min(m_total, _BATCH_FLOAT_BUDGET // max(1, n_steps * n)))
    for start in range(0, m_total, batch_rows):
        stop = min(start + batch_rows, m_total)
        rows = stop - start
        pos = np.empty((rows, n))
        inc = np.empty((rows, n_steps, n))
        for local, j in enumerate(range(start, stop)):
            gen = config.rng.substream(j).generator()
            if law_rates is not None:
                gaps0 = exponential_from_uniform(gen.random(n - 1), law_rates)
            else:
                gaps0 = config.initial_gaps
            pos[local] = positions_from_gaps(gaps0)
            inc[local] = gen.standard_normal((n_steps, n))
        y_start = pos.copy()  # standardized start: names already in ranked order

        if rec.keep_steps:
            positions_rec = np.empty((rows, n_steps + 1, n))
            perms_rec = np.empty((rows, n_steps, n), dtype=np.intp)
            overflow = _advance_recording(
                pos, drifts, dt, sqdt, inc, OVERFLOW_LIMIT, positions_rec, perms_rec
            )
        elif rec.path_stride:
            overflow = _advance_stride(
                pos, drifts, dt, sqdt, inc, OVERFLOW_LIMIT, rec.path_stride,
                snaps[start:stop],
            )
        else:
            overflow = backend.advance_batch(pos, drifts, dt, sqdt, inc, OVERFLOW_LIMIT)
        if overflow is not None:
            row, t = overflow
            j = start + int(row)
            raise SimulationOverflowError(j, int(t), config.rng.substream(j))

        y_final = np.sort(pos, axis=1, kind="stable")
        if final_gaps is not None:
            final_gaps[start:stop] = np.diff(y_final, axis=1)
        if displacements is not None:
            displacements[start:stop] = y_final[:, ranks - 1] - y_start[:, ranks - 1]
        if recorded is not None:
            for local, j in enumerate(range(start, stop)):
                recorded.append(
                    Trajectory(
                        index=j,
                        rng=config.rng.substream(j),
                        grid=grid,
                        positions=positions_rec[local],
                        perms=perms_rec[local],
                        increments=inc[local].copy(),
                    )
                )

    summary = EnsembleSummary(trajectories=m_total)
    if final_gaps is not None:
        summary.final_gaps = final_gaps
        for k in range(n - 1):
            name = f"gap_{k + 1}"
            summary.stats[name] = summarize(name, final_gaps[:, k])
    if displacements is not None:
        summary.displacement_ranks = tuple(int(k) for k in ranks)
        summary.displacements = displacements
        for col, k in enumerate(ranks):
            name = f"dY_{k}"
            summary.stats[name] = summarize(name, displacements[:, col])
    summary.paths = snaps
    summary.path_times = snap_times
    summary.recorded = recorded
    return summary


def reconstruct_ranked_decomposition(
    traj: Trajectory, drifts
) -> tuple[np.ndarray, LocalTimeEstimate]:
    """Split a recorded trajectory into per-rank Brownian parts and local times.

    The Brownian part of rank k collects the increment of whichever name
    occupied rank k at each step start.  Local times then follow inductively
    from the ranked dynamics: twice the running defect of rank k's path from
    (start + drift + Brownian part), carried upward from the bottom rank
    whose lower boundary term is zero.
    """
    if traj.perms is None or traj.increments is None:
        raise ValueError("trajectory was recorded without per-step increments/permutations")
    drift_arr = np.asarray(drifts, dtype=float)
    n_steps, n = traj.increments.shape
    if drift_arr.shape != (n,):
        raise ValueError(f"expected {n} drifts, got shape {drift_arr.shape}")
    sqdt = math.sqrt(traj.dt)

    routed = np.take_along_axis(traj.increments, traj.perms, axis=1)
    brownian = np.zeros((n_steps + 1, n))
    np.cumsum(sqdt * routed, axis=0, out=brownian[1:])

    ranked = np.sort(traj.positions, axis=1, kind="stable")
    t = traj.grid
    half_l = np.zeros(n_steps + 1)
    local_times = np.empty((n_steps + 1, n - 1))
    for k in range(1, n):
        half_l = half_l - ranked[:, k - 1] + ranked[0, k - 1] + drift_arr[k - 1] * t + brownian[:, k - 1]
        local_times[:, k - 1] = 2.0 * half_l
    return brownian, LocalTimeEstimate(grid=traj.grid, values=local_times)
