"""Seeded Monte Carlo estimates of the two hitting probabilities.

Random numbers come from numpy's Philox4x64 counter-based generator.  Trials
are cut into fixed chunks of ``CHUNK`` paths; chunk ``i`` draws from
``Philox(SeedSequence(seed, spawn_key=(i,)))``.  Each step consumes one
uniform u and picks the jump from the ladder lambda1 | mu1 | lambda2 | mu2.
The tally is a sum over chunks, so it does not depend on how many worker
threads ran them (``OVERFLOW_THREADS``, 0 = all cores).
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba as nb
import numpy as np

from .model import Picture, QueueParams, as_point, require_valid

CHUNK = 1 << 16
Z95 = 1.96


@dataclass(frozen=True)
class McEstimate:
    mean: float
    half_width_95: float
    trials: int
    hits: int
    seed: int
    truncated_paths: int = 0
    escaped_paths: int = 0

    @classmethod
    def from_tally(cls, hits: int, trials: int, seed: int, truncated: int = 0, escaped: int = 0):
        m = hits / trials
        hw = Z95 * math.sqrt(m * (1.0 - m) / trials)
        return cls(m, hw, trials, hits, seed, truncated, escaped)

    def covers(self, value: float, widths: float = 1.0) -> bool:
        return abs(value - self.mean) <= widths * self.half_width_95


@nb.njit(cache=True, nogil=True)
def _run_x(gen, x1, x2, n, c1, c2, c3, trials):
    hits = 0
    for _ in range(trials):
        a, b = x1, x2
        while True:
            if a + b == n:
                hits += 1
                break
            if a == 0 and b == 0:
                break
            u = gen.random()
            if u < c1:
                a += 1
            elif u < c2:
                if a > 0:
                    a -= 1
            elif u < c3:
                b += 1
            elif b > 0:
                b -= 1
    return hits


@nb.njit(cache=True, nogil=True)
def _run_y(gen, y1, y2, c1, c2, c3, max_steps, escape, trials):
    hits = 0
    truncated = 0
    escaped = 0
    for _ in range(trials):
        a, b = y1, y2
        steps = 0
        while True:
            if a == b:
                hits += 1
                break
            if a - b >= escape:
                escaped += 1
                break
            if steps >= max_steps:
                truncated += 1
                break
            u = gen.random()
            steps += 1
            if u < c1:
                a -= 1
            elif u < c2:
                a += 1
            elif u < c3:
                b += 1
            elif b > 0:
                b -= 1
    return hits, truncated, escaped


def _threads() -> int:
    n = int(os.environ.get("OVERFLOW_THREADS", "0") or 0)
    return n if n > 0 else (os.cpu_count() or 1)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def _chunks(trials: int):
    starts = range(0, trials, CHUNK)
    return [(i, min(CHUNK, trials - s)) for i, s in enumerate(starts)]


def _generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _ladder(params: QueueParams) -> tuple[float, float, float]:
    c1 = params.lambda1
    c2 = c1 + params.mu1
    c3 = c2 + params.lambda2
    return c1, c2, c3


def _map_chunks(fn, trials: int):
    chunks = _chunks(trials)
    workers = min(_threads(), len(chunks))
    if workers <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, chunks))


def mc_pn(params: QueueParams, x, n: int, trials: int, seed: int) -> McEstimate:
    """Estimate P_x(tau_n < tau_0) by simulating the doubly constrained X walk."""
    x1, x2 = as_point(x, Picture.X)
    if (x1, x2) == (0, 0) or x1 + x2 > n:
        raise ValueError(f"start {(x1, x2)} must be in A_{n} and away from the origin")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seed = _check_seed(seed)
    c1, c2, c3 = _ladder(params)

    def run(chunk):
        i, m = chunk
        return _run_x(_generator(seed, i), x1, x2, n, c1, c2, c3, m)

    hits = sum(_map_chunks(run, trials))
    return McEstimate.from_tally(int(hits), trials, seed)


def escape_distance(params: QueueParams, tol: float = 1e-12) -> int:
    """Distance from the diagonal past which returning has probability <= tol.

    Uses P_y(tau < inf) <= h^{a,0}(y) <= c0 r^d + c1 rho1^d, d = y1 - y2.
    """
    from .approx import build_h_a0

    require_valid(params)
    with warnings.catch_warnings():
        # the geometric case is expected here and harmless
        warnings.simplefilter("ignore", UserWarning)
        c0, c1 = (abs(c) for c in build_h_a0(params).coefficients)
    r, rho1 = params.r, params.rho1
    d = 1
    while c0 * r**d + c1 * rho1**d > tol:
        d += 1
    return d


def mc_py_inf(
    params: QueueParams,
    y,
    trials: int,
    max_steps: int,
    seed: int,
    escape: int | None = None,
) -> McEstimate:
    """Estimate P_y(tau < inf) with the Y walk (constrained only at y2 = 0).

    Paths longer than ``max_steps`` count as misses (``truncated_paths``).
    Paths reaching distance ``escape`` from the diagonal also count as misses
    (``escaped_paths``); the default distance keeps that bias below 1e-12
    per path.  Pass ``escape=0`` to disable it.
    """
    y1, y2 = as_point(y)
    if y1 < y2:
        raise ValueError(f"need y1 >= y2, got {(y1, y2)}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seed = _check_seed(seed)
    if escape is None:
        escape = escape_distance(params)
    esc = escape if escape > 0 else np.iinfo(np.int64).max
    c1, c2, c3 = _ladder(params)

    def run(chunk):
        i, m = chunk
        return _run_y(_generator(seed, i), y1, y2, c1, c2, c3, max_steps, esc, m)

    parts = _map_chunks(run, trials)
    hits = sum(p[0] for p in parts)
    trunc = sum(p[1] for p in parts)
    esc_count = sum(p[2] for p in parts)
    return McEstimate.from_tally(int(hits), trials, seed, int(trunc), int(esc_count))
