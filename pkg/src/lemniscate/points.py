"""Expansion point sets: distinct foci with multiplicities."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConditioningWarning

MERGE_REL = 1e-8
WARN_REL = 1e-4


@dataclass(frozen=True)
class PointSet:
    """Foci z_1..z_p with positive multiplicities m_1..m_p.

    The foci must be pairwise distinct; coincident input points should be
    merged into multiplicities through :meth:`from_points`.
    """

    foci: tuple[complex, ...]
    mults: tuple[int, ...]

    def __post_init__(self):
        if len(self.foci) == 0 or len(self.foci) != len(self.mults):
            raise ValueError("need at least one focus and one multiplicity per focus")
        object.__setattr__(self, "foci", tuple(complex(z) for z in self.foci))
        object.__setattr__(self, "mults", tuple(int(m) for m in self.mults))
        if any(m < 1 for m in self.mults):
            raise ValueError("multiplicities must be positive integers")
        scale = self.scale
        for a, b in combinations(self.foci, 2):
            if abs(a - b) <= MERGE_REL * scale:
                raise ValueError("coincident foci; merge them into a multiplicity")

    @classmethod
    def from_points(cls, points) -> "PointSet":
        """Build from (z, multiplicity) pairs or bare points.

        Points closer than MERGE_REL * scale are merged into one focus with
        summed multiplicity; separations below WARN_REL * scale trigger a
        ConditioningWarning.
        """
        pairs = []
        for p in points:
            if isinstance(p, tuple):
                z, m = p
            else:
                z, m = p, 1
            pairs.append((complex(z), int(m)))
        dists = [abs(a[0] - b[0]) for a, b in combinations(pairs, 2) if a[0] != b[0]]
        scale = max(dists) if dists else 1.0
        merged: list[list] = []
        for z, m in pairs:
            for entry in merged:
                if abs(z - entry[0]) <= MERGE_REL * scale:
                    entry[1] += m
                    break
            else:
                merged.append([z, m])
        for (a, _), (b, _) in combinations(merged, 2):
            if abs(a - b) <= WARN_REL * scale:
                warnings.warn(
                    f"foci {a} and {b} are nearly coincident; coefficients may be ill conditioned",
                    ConditioningWarning,
                    stacklevel=2,
                )
        return cls(tuple(e[0] for e in merged), tuple(e[1] for e in merged))

    @property
    def p(self) -> int:
        return len(self.foci)

    @property
    def m(self) -> int:
        return sum(self.mults)

    @property
    def scale(self) -> float:
        dists = [abs(a - b) for a, b in combinations(self.foci, 2)]
        return max(dists) if dists else 1.0

    @property
    def centroid(self) -> complex:
        return sum(z * m for z, m in zip(self.foci, self.mults)) / self.m

    def product(self, z):
        """prod_k (z - z_k)**m_k for a scalar, array or jet argument."""
        acc = None
        for zk, mk in zip(self.foci, self.mults):
            term = (z - zk) ** mk
            acc = term if acc is None else acc * term
        return acc

    def abs_product(self, z):
        acc = None
        for zk, mk in zip(self.foci, self.mults):
            term = np.abs(z - zk) ** mk
            acc = term if acc is None else acc * term
        return acc

    def restricted(self, indices) -> "PointSet":
        idx = tuple(indices)
        return PointSet(tuple(self.foci[i] for i in idx), tuple(self.mults[i] for i in idx))

    def permuted(self, order) -> "PointSet":
        return self.restricted(order)

    def __iter__(self):
        return iter(zip(self.foci, self.mults))
