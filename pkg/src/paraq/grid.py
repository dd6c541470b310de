"""Exact lattice solvers for the two hitting problems.

``solve_pn`` gives P_x(tau_n < tau_0) on the triangle A_n; ``solve_py_inf``
is the independent oracle for P_y(tau < inf), solved on a truncated wedge
with zero far boundary and grown until the value settles.

The probabilities involved go down to ~1e-17 while the boundary data are
O(1), so a plain sparse LU loses all relative accuracy near the origin.  The
Gauss-Seidel sweep only ever forms positive combinations and keeps relative
accuracy; the direct path rescales the unknowns by a positive guess of the
solution first, which brings every unknown to O(1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .model import QueueParams, as_point, Picture, require_valid


class ConvergenceError(ArithmeticError):
    """An iterative solve or truncation sequence failed to settle."""


@dataclass(frozen=True)
class GridSolution:
    """P_x(tau_n < tau_0) on A_n; ``values[x1, x2]`` is NaN off the triangle."""

    n: int
    values: np.ndarray
    iterations: int
    final_relative_change: float
    method: str = "gauss-seidel"

    def __getitem__(self, x) -> float:
        x1, x2 = as_point(x, Picture.X)
        if x1 < 0 or x2 < 0 or x1 + x2 > self.n:
            raise KeyError(f"{(x1, x2)} is outside A_{self.n}")
        return float(self.values[x1, x2])

    def points(self):
        for s in range(self.n + 1):
            for x1 in range(s + 1):
                yield (x1, s - x1)


@nb.njit(cache=True, nogil=True)
def _gs_pn(l1, l2, m1, m2, n, tol, max_sweeps):
    P = np.zeros((n + 1, n + 1))
    for a in range(n + 1):
        P[a, n - a] = 1.0
    change = np.inf
    for sweep in range(1, max_sweeps + 1):
        change = 0.0
        for s in range(n - 1, 0, -1):
            for a in range(s, -1, -1):
                b = s - a
                v = l1 * P[a + 1, b] + l2 * P[a, b + 1]
                stay = 0.0
                if a > 0:
                    v += m1 * P[a - 1, b]
                else:
                    stay += m1
                if b > 0:
                    v += m2 * P[a, b - 1]
                else:
                    stay += m2
                v /= 1.0 - stay
                old = P[a, b]
                P[a, b] = v
                d = abs(v - old) / v
                if d > change:
                    change = d
        if change <= tol:
            return P, sweep, change
    return P, -max_sweeps, change


def _mask_triangle(P: np.ndarray, n: int) -> np.ndarray:
    out = P.copy()
    a, b = np.indices(out.shape)
    out[a + b > n] = np.nan
    return out


def _solve_scaled(rows, cols, vals, rhs, scale):
    """Solve A u = rhs with the unknowns already divided by ``scale``."""
    N = len(rhs)
    A = sp.csc_matrix((vals, (rows, cols)), shape=(N, N))
    u = spla.spsolve(A, rhs)
    return u * scale


def _direct_pn(params: QueueParams, n: int) -> np.ndarray:
    l1, l2, m1, m2 = params.as_tuple()
    rho1, r = params.rho1, params.r
    pts = [(a, s - a) for s in range(n + 1) for a in range(s + 1)]
    index = {p: i for i, p in enumerate(pts)}
    # the subharmonic lower bound is a good positive scale for the solution
    g = np.array([max(rho1 ** (n - a), r ** (n - a - b), rho1 ** (n - 1)) for a, b in pts])
    rows, cols, vals = [], [], []
    rhs = np.zeros(len(pts))
    for (a, b), i in index.items():
        if a + b == n or (a, b) == (0, 0):
            rows.append(i), cols.append(i), vals.append(1.0)
            rhs[i] = 1.0 / g[i] if a + b == n else 0.0
            continue
        diag = 1.0
        for (da, db), p in (((1, 0), l1), ((0, 1), l2), ((-1, 0), m1), ((0, -1), m2)):
            q = (a + da, b + db)
            if q[0] < 0 or q[1] < 0:
                diag -= p
                continue
            j = index[q]
            rows.append(i), cols.append(j), vals.append(-p * g[j] / g[i])
        rows.append(i), cols.append(i), vals.append(diag)
    u = _solve_scaled(rows, cols, vals, rhs, g)
    P = np.zeros((n + 1, n + 1))
    for (a, b), i in index.items():
        P[a, b] = u[i]
    return P


def solve_pn(
    params: QueueParams,
    n: int,
    method: str = "gauss-seidel",
    tol: float = 1e-13,
    max_sweeps: int = 10**6,
) -> GridSolution:
    """P_x(tau_n < tau_0) for every x in A_n.

    ``method`` is ``"gauss-seidel"`` (sweeps ordered by decreasing x1 + x2,
    stopped once the largest relative change is <= ``tol``) or ``"direct"``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    require_valid(params)
    if method == "gauss-seidel":
        P, sweeps, change = _gs_pn(*params.as_tuple(), n, tol, max_sweeps)
        if sweeps < 0:
            raise ConvergenceError(
                f"Gauss-Seidel did not reach relative change {tol:g} in {max_sweeps} sweeps "
                f"(last change {change:.3e})"
            )
        return GridSolution(n, _mask_triangle(P, n), sweeps, float(change), method)
    if method == "direct":
        P = _direct_pn(params, n)
        return GridSolution(n, _mask_triangle(P, n), 1, 0.0, method)
    raise ValueError(f"unknown method {method!r}")


def harmonic_residual(params: QueueParams, sol: GridSolution) -> float:
    """Largest relative defect of the X-balance equation over interior points."""
    l1, l2, m1, m2 = params.as_tuple()
    P, n = sol.values, sol.n
    worst = 0.0
    for a, b in sol.points():
        if a + b == n or (a, b) == (0, 0):
            continue
        v = l1 * P[a + 1, b] + l2 * P[a, b + 1]
        v += m1 * (P[a - 1, b] if a > 0 else P[a, b])
        v += m2 * (P[a, b - 1] if b > 0 else P[a, b])
        worst = max(worst, abs(v - P[a, b]) / P[a, b])
    return worst


def f_n(params: QueueParams, x, n: int) -> float:
    x1, x2 = as_point(x, Picture.X)
    rho1, r = params.rho1, params.r
    return max(rho1 ** (n - x1), r ** ((n - x1) - x2), rho1 ** (n - 1))


def f_n_lower_bound(params: QueueParams, x, n: int) -> float:
    """f_n(x) - f_n(0), a lower bound for P_x(tau_n < tau_0)."""
    x1, x2 = as_point(x, Picture.X)
    if x1 + x2 > n:
        raise ValueError(f"{(x1, x2)} is outside A_{n}")
    return f_n(params, (x1, x2), n) - f_n(params, (0, 0), n)


@dataclass(frozen=True)
class WedgeSolution:
    """Truncated-wedge solution; ``values[d, y2]`` with d = y1 - y2.

    Covers 0 <= d <= m1 and 0 <= y2 <= m2; d = 0 carries the boundary value
    one and the far sides d = m1, y2 = m2 carry zero.
    """

    m1: int
    m2: int
    values: np.ndarray
    converged: bool = False

    def __getitem__(self, y) -> float:
        y1, y2 = as_point(y)
        d = y1 - y2
        if d < 0 or d > self.m1 or y2 > self.m2:
            raise KeyError(f"{(y1, y2)} is outside the truncated wedge ({self.m1}, {self.m2})")
        return float(self.values[d, y2])


_TINY = 1e-290


def solve_wedge(params: QueueParams, m1: int, m2: int) -> WedgeSolution:
    """Y-balance on the truncated wedge, zero on the artificial far sides."""
    l1, l2, m1p, m2p = params.as_tuple()
    rho1, r = params.rho1, params.r
    nd, ny = m1 + 1, m2 + 1
    # unknowns: 1 <= d <= m1 - 1, 0 <= y2 <= m2 - 1
    D, Y2 = np.meshgrid(np.arange(1, m1), np.arange(0, m2), indexing="ij")
    D, Y2 = D.ravel(), Y2.ravel()
    N = D.size
    idx = -np.ones((nd, ny), dtype=np.int64)
    idx[D, Y2] = np.arange(N)
    logg = np.maximum((D + Y2) * math.log(rho1), D * math.log(r))
    g = np.maximum(np.exp(logg), _TINY)
    rows, cols, vals = [np.arange(N)], [np.arange(N)], [np.ones(N)]
    rhs = np.zeros(N)
    # Y jumps as (dd, dy2): (-1,0) l1 -> d-1; (+1,0) m1 -> d+1; (0,+1) l2 -> d-1, y2+1; (0,-1) m2 -> d+1, y2-1
    for dd, dy, p in ((-1, 0, l1), (1, 0, m1p), (-1, 1, l2), (1, -1, m2p)):
        tD, tY = D + dd, Y2 + dy
        blocked = tY < 0
        if blocked.any():
            # suppressed jump: stay put
            vals[0] = vals[0] - p * blocked
        ok = ~blocked
        hit = ok & (tD == 0)
        rhs[hit] += p / g[hit]
        inner = ok & (tD > 0) & (tD < m1) & (tY < m2)
        j = idx[tD[inner], tY[inner]]
        rows.append(np.nonzero(inner)[0])
        cols.append(j)
        vals.append(-p * g[j] / g[inner])
    A = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N)
    )
    u = spla.spsolve(A, rhs) * g
    V = np.zeros((nd, ny))
    V[0, :] = 1.0
    V[D, Y2] = u
    return WedgeSolution(m1, m2, V)


def py_inf_values(
    params: QueueParams, ys, rtol: float = 1e-8, start: int = 64, max_size: int = 2**16
) -> tuple[np.ndarray, tuple[int, int]]:
    """Oracle values of P_y(tau < inf) at several points, and the truncation used.

    The truncation (m1, m2) doubles from ``start`` until every requested value
    changes by at most ``rtol`` relative to the previous level.
    """
    require_valid(params)
    pts = [tuple(as_point(y)) for y in ys]
    for y1, y2 in pts:
        if y1 < y2:
            raise ValueError(f"need y1 >= y2, got {(y1, y2)}")
    need = max([start] + [2 * (y1 - y2 + 1) for y1, y2 in pts] + [2 * (y2 + 1) for _, y2 in pts])
    m = start
    while m < need:
        m *= 2
    prev = None
    while m <= max_size:
        w = solve_wedge(params, m, m)
        cur = np.array([w[p] for p in pts])
        if prev is not None and np.all(np.abs(cur - prev) <= rtol * np.abs(cur)):
            return cur, (m, m)
        prev = cur
        m *= 2
    raise ConvergenceError(f"wedge truncation grew past {max_size} without reaching rtol={rtol:g}")


def solve_py_inf(params: QueueParams, y, rtol: float = 1e-8) -> float:
    """P_y(tau < inf) from the truncated-wedge oracle."""
    y1, y2 = as_point(y)
    if y1 == y2:
        return 1.0
    if y1 < y2:
        raise ValueError(f"need y1 > y2, got {(y1, y2)}")
    vals, _ = py_inf_values(params, [(y1, y2)], rtol)
    return float(vals[0])
