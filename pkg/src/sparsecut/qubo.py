"""Maxcut QUBO compilation in sparse triplet form.

A :class:`QuboInstance` stores the upper triangle of a symmetric matrix
``Q``: one triplet ``(u, v, Q_uv)`` per nonzero entry with ``u <= v``.
The objective ``sum_{u,v} Q_uv x_u x_v`` runs over both orientations of
every off-diagonal pair, so a stored off-diagonal value counts twice.
With ``Q_uu`` the weighted degree and ``Q_uv = -w_uv`` this equals the
cut weight for every assignment.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import WeightedGraph, as_assignment


@dataclass(frozen=True, eq=False)
class QuboInstance:
    dimension: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.ascontiguousarray(self.rows, dtype=np.int64)
        c = np.ascontiguousarray(self.cols, dtype=np.int64)
        val = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if not (r.shape == c.shape == val.shape) or r.ndim != 1:
            raise ValueError("rows, cols, values must be 1-d arrays of equal length")
        if r.size:
            if r.min() < 0 or c.max() >= self.dimension:
                raise ValueError("triplet index out of range")
            if np.any(r > c):
                raise ValueError("triplets must satisfy u <= v")
            if np.any(val == 0) or not np.all(np.isfinite(val)):
                raise ValueError("triplet values must be finite and nonzero")
            order = np.lexsort((c, r))
            r, c, val = r[order], c[order], val[order]
            if np.any((np.diff(r) == 0) & (np.diff(c) == 0)):
                raise ValueError("duplicate triplet")
        for arr in (r, c, val):
            arr.flags.writeable = False
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_triplets(cls, dimension: int, triplets) -> "QuboInstance":
        trip = list(triplets)
        if not trip:
            return cls(dimension, np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
        r, c, val = zip(*trip)
        return cls(dimension, np.array(r), np.array(c), np.array(val, dtype=float))

    @property
    def triplets(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(x)) for a, b, x in zip(self.rows, self.cols, self.values)]

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def off_diagonal_count(self) -> int:
        return int(np.count_nonzero(self.rows != self.cols))

    def dense(self) -> np.ndarray:
        """Full symmetric matrix."""
        mat = np.zeros((self.dimension, self.dimension))
        mat[self.rows, self.cols] = self.values
        mat[self.cols, self.rows] = self.values
        return mat

    def scaled(self, factor: float) -> "QuboInstance":
        return QuboInstance(self.dimension, self.rows, self.cols, self.values * factor)

    def __eq__(self, other):
        if not isinstance(other, QuboInstance):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        return f"QuboInstance(dimension={self.dimension}, nnz={self.nnz})"


def compile_qubo(g: WeightedGraph) -> QuboInstance:
    deg = g.degrees()
    (active,) = np.nonzero(deg)
    rows = np.concatenate([active, g.u])
    cols = np.concatenate([active, g.v])
    vals = np.concatenate([deg[active], -g.w])
    return QuboInstance(g.node_count, rows, cols, vals)


def qubo_objective(q: QuboInstance, bits) -> float:
    x = as_assignment(bits, q.dimension).astype(np.float64)
    contrib = q.values * x[q.rows] * x[q.cols]
    contrib[q.rows != q.cols] *= 2.0
    return float(contrib.sum())


def communication_cost(q: QuboInstance) -> int:
    """Number of ``(u, v, Q_uv)`` records that must be transmitted."""
    return q.nnz


def format_triplets(q: QuboInstance) -> str:
    return "".join(f"{a} {b} {x!r}\n" for a, b, x in q.triplets)


def write_triplets(q: QuboInstance, path) -> None:
    Path(path).write_text(format_triplets(q), encoding="ascii")


def read_triplets(path, dimension: int | None = None) -> QuboInstance:
    """Read a raw triplet file; ``dimension`` defaults to the largest index + 1."""
    trip = []
    with Path(path).open("r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'u v value', got {line!r}")
            try:
                trip.append((int(parts[0]), int(parts[1]), float(parts[2])))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed triplet {line!r}") from None
    if dimension is None:
        dimension = 1 + max((max(a, b) for a, b, _ in trip), default=0)
    return QuboInstance.from_triplets(dimension, trip)
