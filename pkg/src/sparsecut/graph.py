"""Weighted undirected graphs, cut evaluation and instance file I/O.

Instance files follow the layout of the public maxcut corpora::

    # optional comment lines
    <n> <m>
    <u> <v> <w>        (m lines, 1-indexed endpoints)

In memory every index is 0-based; conversion only happens in
:func:`load_instance` and :func:`save_instance`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


class InstanceParseError(ValueError):
    """Raised for a malformed instance file; carries the offending line number."""

    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph with strictly positive edge weights.

    Edges are held as three parallel arrays ``u``, ``v``, ``w`` with
    ``u < v`` and at most one entry per unordered pair. The arrays are
    made read-only on construction so instances can be shared freely.
    Use :meth:`from_edges` to build one from raw (possibly messy) data.
    """

    node_count: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        u = np.ascontiguousarray(self.u, dtype=np.int64)
        v = np.ascontiguousarray(self.v, dtype=np.int64)
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        if self.node_count < 1:
            raise ValueError(f"node_count must be positive, got {self.node_count}")
        if not (u.shape == v.shape == w.shape) or u.ndim != 1:
            raise ValueError("u, v, w must be 1-d arrays of equal length")
        if u.size:
            if u.min() < 0 or v.max() >= self.node_count:
                raise ValueError("edge endpoint out of range")
            if np.any(u >= v):
                raise ValueError("edges must be stored with u < v")
            if np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise ValueError("edge weights must be finite and strictly positive")
            keys = u * self.node_count + v
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edge pair")
        for arr in (u, v, w):
            arr.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_edges(cls, node_count: int, edges) -> "WeightedGraph":
        """Normalize an iterable of ``(u, v, w)`` triples into a graph.

        Weights become ``|w|``; zero weights and self-loops are dropped;
        repeated pairs are merged by summing. Surviving edges keep the
        order of their first appearance.
        """
        merged: dict[tuple[int, int], float] = {}
        loops = 0
        for a, b, wt in edges:
            a, b, wt = int(a), int(b), abs(float(wt))
            if not (0 <= a < node_count and 0 <= b < node_count):
                raise ValueError(f"edge ({a}, {b}) out of range for {node_count} nodes")
            if a == b:
                loops += 1
                continue
            if wt == 0.0:
                continue
            key = (a, b) if a < b else (b, a)
            merged[key] = merged.get(key, 0.0) + wt
        if loops:
            log.warning("dropped %d self-loop(s)", loops)
        if not merged:
            return cls(node_count, np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
        keys = np.array(list(merged.keys()), dtype=np.int64)
        return cls(node_count, keys[:, 0], keys[:, 1], np.fromiter(merged.values(), float, len(merged)))

    @property
    def edge_count(self) -> int:
        return int(self.w.size)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(c)) for a, b, c in zip(self.u, self.v, self.w)]

    def total_weight(self) -> float:
        return float(self.w.sum())

    def degrees(self) -> np.ndarray:
        """Weighted degree of every node."""
        deg = np.zeros(self.node_count)
        np.add.at(deg, self.u, self.w)
        np.add.at(deg, self.v, self.w)
        return deg

    def laplacian(self) -> np.ndarray:
        """Dense weighted Laplacian ``D - A``."""
        n = self.node_count
        lap = np.zeros((n, n))
        np.add.at(lap, (self.u, self.v), -self.w)
        np.add.at(lap, (self.v, self.u), -self.w)
        lap[np.diag_indices(n)] = self.degrees()
        return lap

    def scaled(self, factor: float) -> "WeightedGraph":
        return WeightedGraph(self.node_count, self.u, self.v, self.w * factor)

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )

    __hash__ = None

    def __repr__(self):
        return f"WeightedGraph(node_count={self.node_count}, edges={self.edge_count})"


def as_assignment(bits, node_count: int) -> np.ndarray:
    """Validate a cut assignment (bit ``u`` set means ``u`` is in S)."""
    x = np.asarray(bits)
    if x.ndim != 1 or x.size != node_count:
        raise ValueError(f"assignment has length {x.size}, expected {node_count}")
    if x.size and not np.all((x == 0) | (x == 1)):
        raise ValueError("assignment entries must be 0 or 1")
    return x.astype(np.int8, copy=False)


def complement(bits) -> np.ndarray:
    return 1 - np.asarray(bits, dtype=np.int8)


def cut_weight(g: WeightedGraph, bits) -> float:
    """Total weight of edges whose endpoints lie on opposite sides."""
    x = as_assignment(bits, g.node_count)
    crossing = x[g.u] != x[g.v]
    return float(g.w[crossing].sum())


def load_instance(path) -> WeightedGraph:
    path = Path(path)
    header = None
    rows: list[tuple[int, int, float]] = []
    with path.open("r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 2:
                    raise InstanceParseError(path, lineno, "expected header '<n> <m>'")
                try:
                    n, m = int(parts[0]), int(parts[1])
                except ValueError:
                    raise InstanceParseError(path, lineno, f"non-integer header {line!r}") from None
                if n < 1 or m < 0:
                    raise InstanceParseError(path, lineno, f"invalid header {line!r}")
                header = (n, m)
                continue
            if len(parts) != 3:
                raise InstanceParseError(path, lineno, f"expected '<u> <v> <w>', got {line!r}")
            try:
                a, b, wt = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise InstanceParseError(path, lineno, f"malformed edge line {line!r}") from None
            n = header[0]
            if not (1 <= a <= n and 1 <= b <= n):
                raise InstanceParseError(path, lineno, f"endpoint out of range [1, {n}]")
            if not np.isfinite(wt):
                raise InstanceParseError(path, lineno, "non-finite weight")
            if len(rows) == header[1]:
                raise InstanceParseError(path, lineno, f"more than m={header[1]} edge lines")
            rows.append((a - 1, b - 1, wt))
    if header is None:
        raise InstanceParseError(path, 0, "missing header line")
    if len(rows) != header[1]:
        raise InstanceParseError(path, lineno if rows else 1,
                                 f"header declares m={header[1]} edges but file has {len(rows)}")
    return WeightedGraph.from_edges(header[0], rows)


def format_instance(g: WeightedGraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"{g.node_count} {g.edge_count}")
    lines.extend(f"{a + 1} {b + 1} {wt!r}" for a, b, wt in g.edges)
    return "\n".join(lines) + "\n"


def save_instance(g: WeightedGraph, path, comment: str | None = None) -> None:
    """Write ``g`` in instance format; weights use round-trip-exact ``repr``."""
    Path(path).write_text(format_instance(g, comment), encoding="ascii")


GENERATOR_KINDS = ("g05-style", "weighted-style")


def generate_instance(kind: str, n: int, density: float, weight_range: int = 100,
                      seed: int = 0) -> WeightedGraph:
    """Random G(n, density) instance resembling the g05 / w05 families.

    ``g05-style`` keeps unit weights; ``weighted-style`` draws integer
    weights uniformly from ``[1, weight_range]``.
    """
    if kind not in GENERATOR_KINDS:
        raise ValueError(f"unknown generator kind {kind!r}; expected one of {GENERATOR_KINDS}")
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < density
    iu, iv = iu[keep], iv[keep]
    if kind == "g05-style":
        w = np.ones(iu.size)
    else:
        if weight_range < 1:
            raise ValueError("weight_range must be at least 1")
        w = rng.integers(1, weight_range + 1, size=iu.size).astype(float)
    return WeightedGraph(n, iu, iv, w)
