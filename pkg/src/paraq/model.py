"""Queue parameters, assumption checks and lattice coordinate maps.

The embedded random walk of two parallel M/M/1 queues jumps by
(1,0), (0,1), (-1,0), (0,-1) with probabilities lambda1, lambda2, mu1, mu2.
Points are kept either in the X-picture (both queue lengths) or in the
Y-picture, seen from the corner (n, 0) with the first axis reversed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

#: absolute tolerance for the algebraic equalities rho1 == rho2 and r**2 == rho1*rho2
EQ_TOL = 1e-12

FIELDS = ("lambda1", "lambda2", "mu1", "mu2")


class ParameterError(ValueError):
    """Raised for invalid raw rates or an inconsistent parameter request."""


class AssumptionError(ValueError):
    """A computation needs an assumption flag that the parameters violate."""

    def __init__(self, flag: str, message: str | None = None):
        self.flag = flag
        super().__init__(message or f"assumption violated: {flag}")


@dataclass(frozen=True)
class DerivedRates:
    rho1: float
    rho2: float
    r: float


@dataclass(frozen=True)
class QueueParams:
    """Jump probabilities of the embedded chain; normalized on construction."""

    lambda1: float
    lambda2: float
    mu1: float
    mu2: float

    def __post_init__(self):
        vals = [float(getattr(self, f)) for f in FIELDS]
        for name, v in zip(FIELDS, vals):
            if not math.isfinite(v) or v <= 0.0:
                raise ParameterError(f"{name} must be a positive finite number, got {v!r}")
        total = math.fsum(vals)
        if abs(total - 1.0) > 1e-15:
            vals = [v / total for v in vals]
        for name, v in zip(FIELDS, vals):
            object.__setattr__(self, name, v)

    @property
    def rho1(self) -> float:
        return self.lambda1 / self.mu1

    @property
    def rho2(self) -> float:
        return self.lambda2 / self.mu2

    @property
    def r(self) -> float:
        return (self.lambda1 + self.lambda2) / (self.mu1 + self.mu2)

    @property
    def rates(self) -> DerivedRates:
        return DerivedRates(self.rho1, self.rho2, self.r)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lambda1, self.lambda2, self.mu1, self.mu2)


def normalize(lambda1: float, lambda2: float, mu1: float, mu2: float) -> QueueParams:
    """Build parameters from raw (possibly unnormalized) positive rates."""
    return QueueParams(lambda1, lambda2, mu1, mu2)


#: the worked example used throughout: lambda1=0.1, lambda2=0.2, mu1=0.2, mu2=0.5
EXAMPLE_PARAMS = QueueParams(0.1, 0.2, 0.2, 0.5)


@dataclass(frozen=True)
class AssumptionReport:
    stable: bool
    ordered: bool
    distinct_utilizations: bool
    conjugate_inside: bool
    geometric_case: bool

    #: flags the harmonic machinery cannot do without
    REQUIRED = ("stable", "ordered", "distinct_utilizations", "conjugate_inside")

    def failing(self) -> list[str]:
        return [f for f in self.REQUIRED if not getattr(self, f)]

    @property
    def ok(self) -> bool:
        return not self.failing()


def validate(params: QueueParams) -> AssumptionReport:
    rho1, rho2, r = params.rho1, params.rho2, params.r
    return AssumptionReport(
        stable=rho1 < 1.0 and rho2 < 1.0,
        ordered=rho2 <= r <= rho1,
        distinct_utilizations=abs(rho1 - rho2) > EQ_TOL,
        conjugate_inside=r * r / rho2 < 1.0,
        geometric_case=abs(r * r - rho1 * rho2) <= EQ_TOL,
    )


def require_valid(params: QueueParams) -> AssumptionReport:
    """Return the report, raising AssumptionError on the first failing flag."""
    report = validate(params)
    bad = report.failing()
    if bad:
        raise AssumptionError(bad[0], f"assumption violated: {', '.join(bad)}")
    return report


class Picture(Enum):
    X = "X"
    Y = "Y"


@dataclass(frozen=True)
class LatticePoint:
    c1: int
    c2: int
    picture: Picture = Picture.Y

    def __post_init__(self):
        object.__setattr__(self, "c1", int(self.c1))
        object.__setattr__(self, "c2", int(self.c2))
        if self.c2 < 0:
            raise ParameterError(f"second coordinate must be >= 0, got {self.c2}")
        if self.picture is Picture.X and self.c1 < 0:
            raise ParameterError(f"X-picture point needs c1 >= 0, got {self.c1}")

    def __iter__(self):
        yield self.c1
        yield self.c2


def xpoint(c1: int, c2: int) -> LatticePoint:
    return LatticePoint(c1, c2, Picture.X)


def ypoint(c1: int, c2: int) -> LatticePoint:
    return LatticePoint(c1, c2, Picture.Y)


def as_point(p, picture: Picture = Picture.Y) -> LatticePoint:
    """Accept a LatticePoint or a plain (c1, c2) pair."""
    if isinstance(p, LatticePoint):
        return p
    c1, c2 = p
    return LatticePoint(c1, c2, picture)


def transform_Tn(x, n: int) -> LatticePoint:
    """Map between pictures via (c1, c2) -> (n - c1, c2).

    The map is its own inverse; applied to a Y-picture point it returns the
    X-picture point (which must then have a nonnegative first coordinate).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    p = as_point(x, Picture.X)
    target = Picture.Y if p.picture is Picture.X else Picture.X
    return LatticePoint(n - p.c1, p.c2, target)


def params_with_geometric_r(rho1: float, rho2: float) -> QueueParams:
    """Parameters with the given utilizations and r = sqrt(rho1*rho2).

    r is the mu-weighted mean of rho1 and rho2, so the service weight
    w = (sqrt(rho1 rho2) - rho2) / (rho1 - rho2) pins it exactly.
    """
    if not (0.0 < rho2 < rho1 < 1.0):
        raise ParameterError(f"need 0 < rho2 < rho1 < 1, got rho1={rho1}, rho2={rho2}")
    if rho1 - rho2 <= EQ_TOL:
        raise AssumptionError("distinct_utilizations")
    g = math.sqrt(rho1 * rho2)
    w = (g - rho2) / (rho1 - rho2)
    mu1, mu2 = w, 1.0 - w
    params = QueueParams(rho1 * mu1, rho2 * mu2, mu1, mu2)
    report = validate(params)
    if not report.ok:
        raise AssumptionError(report.failing()[0])
    return params


def read_config(path: str | Path) -> dict[str, float]:
    """Read ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in FIELDS:
            raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ParameterError(f"{path}:{lineno}: {key} is not a number: {value!r}") from None
    return out
