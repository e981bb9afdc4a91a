"""Deterministic quasi-random sampling of the chart box.

Halton sequences (with a seed-dependent start offset) keep reports
byte-reproducible; exclusion predicates carve out singular loci such as
the 1/q^2 pole of a potential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .phase import PhasePoint, ScalarField

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


def _halton_value(index: int, base: int) -> float:
    out = 0.0
    f = 1.0 / base
    i = index
    while i > 0:
        out += f * (i % base)
        i //= base
        f /= base
    return out


def halton(dim: int, count: int, start: int = 20) -> np.ndarray:
    """count points of the Halton sequence in [0, 1)^dim."""
    if dim > len(_PRIMES):
        raise ValueError(f"halton sampler supports up to {len(_PRIMES)} dimensions")
    out = np.empty((count, dim))
    for r in range(count):
        for c in range(dim):
            out[r, c] = _halton_value(start + r, _PRIMES[c])
    return out


@dataclass(frozen=True)
class Exclusion:
    """Open-interval exclusion: drop points where low < expr < high."""

    expr: ScalarField
    low: float
    high: float

    def hits(self, point: PhasePoint) -> bool:
        v = self.expr.value(point)
        return self.low < v < self.high


@dataclass(frozen=True)
class SamplePlan:
    """Box bounds per phase coordinate plus a t range and s list."""

    n: int
    box: tuple            # 2n pairs (lo, hi)
    t_range: tuple        # (lo, hi)
    s_values: tuple
    count: int = 100
    flow_count: int = 12
    seed: int = 0
    exclusions: tuple = field(default=())

    @classmethod
    def default(cls, n: int, **overrides) -> "SamplePlan":
        base = dict(
            n=n,
            box=tuple((-2.0, 2.0) for _ in range(2 * n)),
            t_range=(0.0, 2.0),
            s_values=(-1.0, -0.5, 0.5, 1.0),
            count=100,
            flow_count=12,
            seed=0,
        )
        base.update(overrides)
        return cls(**base)

    def points(self, count: int | None = None) -> list:
        """Seeded quasi-random sample of (q, p, t) honoring exclusions."""
        want = self.count if count is None else count
        dim = 2 * self.n + 1
        out = []
        index = 20 + 1009 * self.seed
        budget = 200 * want + 200
        while len(out) < want and budget > 0:
            u = halton(dim, 1, index)[0]
            index += 1
            budget -= 1
            z = [lo + (hi - lo) * u[a] for a, (lo, hi) in enumerate(self.box)]
            t = self.t_range[0] + (self.t_range[1] - self.t_range[0]) * u[-1]
            point = PhasePoint(tuple(z[: self.n]), tuple(z[self.n :]), t)
            if any(exc.hits(point) for exc in self.exclusions):
                continue
            out.append(point)
        if len(out) < want:
            raise ConfigError("sampling.exclude",
                              "exclusion predicates reject almost all samples")
        return out

    def flow_points(self) -> list:
        return self.points(min(self.flow_count, self.count))
