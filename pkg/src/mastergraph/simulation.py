"""Exact stochastic simulation of the jump process behind the Master equation.

Randomness is counter based: the k-th uniform of trajectory ``m`` is a
SplitMix64 hash of ``(seed, m, k)``.  Trajectories are therefore independent
of each other and of the order or batch in which they are run, and a batch
can be advanced in lockstep with numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .network import StateNetwork, as_probability_vector

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1
_MAX_CELLS = 1 << 22  # trajectories x states held in one batch


def _mix(x: np.ndarray) -> np.ndarray:
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def _stream_keys(seed: int, traj: np.ndarray) -> np.ndarray:
    base = _mix(np.array([seed & _MASK64], dtype=np.uint64))
    return _mix(base ^ (traj.astype(np.uint64) * _GOLDEN))


def _uniform(keys: np.ndarray, counter: int) -> np.ndarray:
    """Uniforms in [0, 1), one per key, for draw number ``counter``."""
    x = _mix(keys + np.full(keys.shape, counter + 1, dtype=np.uint64) * _GOLDEN)
    return (x >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


@dataclass(frozen=True)
class SimulationConfig:
    horizon: float
    trajectories: int
    seed: int = 0
    start: object = 0          # state label/index or a probability vector

    def __post_init__(self):
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise ValidationError(f"horizon must be > 0, got {self.horizon!r}")
        if self.trajectories < 1:
            raise ValidationError(f"need at least one trajectory, got {self.trajectories}")


class _JumpTables:
    def __init__(self, net: StateNetwork):
        n = net.n
        rates = np.zeros((n, n))
        for s, d, r in net.edges:
            rates[s, d] = r
        self.exit = rates.sum(axis=1)
        cum = np.cumsum(rates, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            cum = cum / self.exit[:, None]
        for s in range(n):
            targets = np.flatnonzero(rates[s])
            if targets.size:
                # guard against the row total rounding to just under 1
                cum[s, targets[-1]:] = 1.0
        self.cum = np.nan_to_num(cum, nan=1.0)

    def next_state(self, states: np.ndarray, u: np.ndarray) -> np.ndarray:
        return (u[:, None] >= self.cum[states]).sum(axis=1)


def _start_states(net: StateNetwork, start, keys: np.ndarray) -> np.ndarray:
    if isinstance(start, (str, int, np.integer)):
        return np.full(keys.shape, net.index(start), dtype=np.int64)
    p = as_probability_vector(start, net.n)
    cdf = np.cumsum(p)
    cdf[np.flatnonzero(p)[-1]:] = 1.0
    return np.searchsorted(cdf, _uniform(keys, 0), side="right").astype(np.int64)


def _final_states(net: StateNetwork, tables: _JumpTables, start, horizon: float,
                  seed: int, traj: np.ndarray) -> np.ndarray:
    keys = _stream_keys(seed, traj)
    state = _start_states(net, start, keys)
    clock = np.zeros(traj.shape)
    active = np.ones(traj.shape, dtype=bool)
    step = 0
    while active.any():
        idx = np.flatnonzero(active)
        s = state[idx]
        rate = tables.exit[s]
        wait_u = _uniform(keys[idx], 2 * step + 1)
        jump_u = _uniform(keys[idx], 2 * step + 2)
        with np.errstate(divide="ignore"):
            wait = -np.log1p(-wait_u) / rate
        clock[idx] += wait
        moves = np.isfinite(wait) & (clock[idx] <= horizon)
        done = idx[~moves]
        active[done] = False
        go = idx[moves]
        if go.size:
            state[go] = tables.next_state(state[go], jump_u[moves])
        step += 1
    return state


def simulate_trajectory(net: StateNetwork, start_state, horizon: float, seed: int,
                        index: int = 0) -> int:
    """State occupied at time ``horizon`` by trajectory ``index`` of ``seed``."""
    SimulationConfig(horizon, 1, seed, start_state)
    out = _final_states(net, _JumpTables(net), start_state, horizon, seed,
                        np.array([index], dtype=np.int64))
    return int(out[0])


def sample_path(net: StateNetwork, start_state, horizon: float, seed: int,
                index: int = 0) -> list[tuple[float, int]]:
    """Jump times and states visited by one trajectory, up to ``horizon``.

    Uses the same random stream as :func:`simulate_trajectory`, one jump at
    a time.
    """
    SimulationConfig(horizon, 1, seed, start_state)
    tables = _JumpTables(net)
    keys = _stream_keys(seed, np.array([index], dtype=np.int64))
    state = int(_start_states(net, start_state, keys)[0])
    path = [(0.0, state)]
    clock, step = 0.0, 0
    while tables.exit[state] > 0:
        u = _uniform(keys, 2 * step + 1)
        clock += float(-np.log1p(-u)[0] / tables.exit[state])
        if clock > horizon:
            break
        state = int(tables.next_state(np.array([state]), _uniform(keys, 2 * step + 2))[0])
        path.append((clock, state))
        step += 1
    return path


def empirical_distribution(net: StateNetwork, config: SimulationConfig):
    """Monte Carlo estimate of the distribution at ``config.horizon``.

    Returns ``(estimate, stderr)`` with ``stderr = sqrt(p (1 - p) / n)``.
    """
    tables = _JumpTables(net)
    counts = np.zeros(net.n, dtype=np.int64)
    batch = max(1, _MAX_CELLS // max(net.n, 1))
    for lo in range(0, config.trajectories, batch):
        traj = np.arange(lo, min(lo + batch, config.trajectories), dtype=np.int64)
        final = _final_states(net, tables, config.start, config.horizon, config.seed, traj)
        counts += np.bincount(final, minlength=net.n)
    p_hat = counts / config.trajectories
    return p_hat, np.sqrt(p_hat * (1 - p_hat) / config.trajectories)
