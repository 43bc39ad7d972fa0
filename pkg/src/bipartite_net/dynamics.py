"""Fixed-step RK4 simulation of ``x' = -L x`` and the bipartite distance e_b(t)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, Tolerances
from .network import MatrixGraph, laplacian

DT_MIN, DT_MAX = 1e-4, 0.1
STABILITY_LIMIT = 2.5  # RK4 real-axis stability ends near 2.785


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    t_final: float = 50.0
    dt: float | None = None
    record_every: int = 10
    seed: int = 0
    x0: np.ndarray | None = None  # explicit initial state; random uniform on [-1, 1] if None

    def __post_init__(self):
        if not self.t_final > 0:
            raise SimulationError(f"t_final must be positive, got {self.t_final}")
        if self.dt is not None and not self.dt > 0:
            raise SimulationError(f"dt must be positive, got {self.dt}")
        if self.record_every < 1:
            raise SimulationError("record_every must be >= 1")


@dataclass(frozen=True)
class SimTrace:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), N*d)
    n_nodes: int
    block_dim: int
    dt: float
    seed: int | None

    @property
    def x0(self) -> np.ndarray:
        return self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def node_states(self) -> np.ndarray:
        """States reshaped to ``(T, N, d)``."""
        return self.states.reshape(len(self.times), self.n_nodes, self.block_dim)


def auto_dt(lam_max: float) -> float:
    if lam_max <= 0:
        return DT_MAX
    return min(DT_MAX, max(DT_MIN, 1.0 / lam_max))


def initial_state(n: int, config: SimConfig) -> np.ndarray:
    if config.x0 is not None:
        x0 = np.asarray(config.x0, dtype=float).ravel()
        if x0.shape[0] != n:
            raise SimulationError(f"initial state has length {x0.shape[0]}, expected {n}")
        return x0
    return np.random.default_rng(config.seed).uniform(-1.0, 1.0, size=n)


def integrate_laplacian(L: np.ndarray, n_nodes: int, block_dim: int,
                        config: SimConfig = SimConfig()) -> SimTrace:
    n = L.shape[0]
    lam_max = float(np.max(np.linalg.eigvalsh(L))) if n else 0.0
    dt = config.dt if config.dt is not None else auto_dt(lam_max)
    steps = max(1, math.ceil(config.t_final / dt - 1e-12))
    h = config.t_final / steps
    if h * lam_max >= STABILITY_LIMIT:
        raise SimulationError(
            f"dt={h:.4g} with lambda_max={lam_max:.4g} gives dt*lambda_max={h * lam_max:.3g} "
            f">= {STABILITY_LIMIT}; RK4 would be unstable")
    x = initial_state(n, config).copy()
    times, states = [0.0], [x.copy()]
    A = -L
    for k in range(1, steps + 1):
        k1 = A @ x
        k2 = A @ (x + 0.5 * h * k1)
        k3 = A @ (x + 0.5 * h * k2)
        k4 = A @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if k % config.record_every == 0 or k == steps:
            times.append(k * h)
            states.append(x.copy())
    seed = None if config.x0 is not None else config.seed
    return SimTrace(np.array(times), np.array(states), n_nodes, block_dim, h, seed)


def integrate(graph: MatrixGraph, config: SimConfig = SimConfig(),
              tol: Tolerances = DEFAULT_TOL) -> SimTrace:
    return integrate_laplacian(laplacian(graph, tol), graph.n_nodes, graph.block_dim, config)


def e_b(states: np.ndarray, signs, n_nodes: int, block_dim: int) -> np.ndarray:
    """``sum_{k != 1} |x_1 - sigma_k x_k|`` for each row of ``states``."""
    signs = np.asarray(signs, dtype=float)
    if signs.shape[0] != n_nodes or signs[0] != 1:
        raise ValueError("sign pattern needs one entry per node with sigma_1 = +1")
    X = np.atleast_2d(states).reshape(-1, n_nodes, block_dim)
    diff = X[:, :1, :] - signs[None, :, None] * X
    return np.linalg.norm(diff[:, 1:, :], axis=2).sum(axis=1)


def e_b_series(trace: SimTrace, signs) -> np.ndarray:
    return e_b(trace.states, signs, trace.n_nodes, trace.block_dim)


def energy_series(trace: SimTrace, L: np.ndarray) -> np.ndarray:
    """``x(t)^T L x(t)`` per recorded time."""
    return np.einsum("ti,ij,tj->t", trace.states, L, trace.states)


def detect_convergence(trace: SimTrace, L: np.ndarray, tol: float = 1e-10
                       ) -> tuple[bool, float | None]:
    """Converged when ``|L x| < tol (1 + |x|)`` at the last record.

    The reported time is the first record from which the test holds through
    the end of the trace.
    """
    res = np.linalg.norm(trace.states @ L.T, axis=1)
    ok = res < tol * (1.0 + np.linalg.norm(trace.states, axis=1))
    if not ok[-1]:
        return False, None
    k = len(ok) - 1
    while k > 0 and ok[k - 1]:
        k -= 1
    return True, float(trace.times[k])


def best_signs(state: np.ndarray, n_nodes: int, block_dim: int) -> tuple[int, ...]:
    """Sign pattern that minimises e_b for a single state."""
    X = state.reshape(n_nodes, block_dim)
    signs = [1]
    for k in range(1, n_nodes):
        plus = np.linalg.norm(X[0] - X[k])
        minus = np.linalg.norm(X[0] + X[k])
        signs.append(1 if plus <= minus else -1)
    return tuple(signs)
