"""Large-deviation diagnostics: Hamiltonians, their roots, and the rate functions."""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .model import QueueParams

#: X increments and the attribute holding their probability
INCREMENTS = (((1, 0), "lambda1"), ((-1, 0), "mu1"), ((0, 1), "lambda2"), ((0, -1), "mu2"))


def hamiltonian(params: QueueParams, q, a: Iterable[int] = ()) -> float:
    """H_a(q) for a subset ``a`` of the constrained coordinates {1, 2}.

    Jumps pushing a coordinate in ``a`` below zero are suppressed, so they
    contribute their bare probability.
    """
    a = frozenset(a)
    if not a <= {1, 2}:
        raise ValueError(f"constraint set must be a subset of {{1, 2}}, got {set(a)}")
    q1, q2 = q
    total = 0.0
    for (v1, v2), name in INCREMENTS:
        p = getattr(params, name)
        blocked = (1 in a and v1 < 0) or (2 in a and v2 < 0)
        total += p if blocked else p * math.exp(-(q1 * v1 + q2 * v2))
    return -math.log(total)


def gradients(params: QueueParams) -> dict[str, np.ndarray]:
    """The roots r0..r4 used by the subsolutions."""
    lr, lrho1 = math.log(params.r), math.log(params.rho1)
    return {
        "r0": np.array([0.0, 0.0]),
        "r1": np.array([lrho1, 0.0]),
        "r2": np.array([0.0, lr]),
        "r3": np.array([lr, lr]),
        "r4": np.array([lrho1 - lr, lr]),
    }


def rate_V(params: QueueParams, x) -> float:
    x1, x2 = x
    return min(math.log(params.r) * (x1 + x2 - 1.0), math.log(params.rho1) * (x1 - 1.0))


def rate_Vsigma(params: QueueParams, stage: int, x) -> float:
    """Two-stage rate: stage 0 before the walk touches x1 = 0, stage 1 after."""
    g = gradients(params)
    x = np.asarray(x, dtype=float)
    lr, lrho1 = math.log(params.r), math.log(params.rho1)
    if stage == 0:
        return min(-lrho1, -lr + float(g["r4"] @ x))
    if stage == 1:
        return min(-lrho1 + float(g["r1"] @ x), -lr + float(g["r3"] @ x))
    raise ValueError(f"stage must be 0 or 1, got {stage}")


def rate_table(params: QueueParams, resolution: float) -> list[tuple[float, float, float, float]]:
    """(x1, x2, V, V_sigma(0, .)) on the simplex grid x1 + x2 <= 1."""
    if not 0.0 < resolution <= 1.0:
        raise ValueError("resolution must be in (0, 1]")
    steps = int(round(1.0 / resolution))
    rows = []
    for i in range(steps + 1):
        for j in range(steps + 1 - i):
            x = (i / steps, j / steps)
            rows.append((x[0], x[1], rate_V(params, x), rate_Vsigma(params, 0, x)))
    return rows
