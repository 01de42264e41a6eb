"""Importance sampling of edges into a reweighted sparse graph."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph
from .resistance import ResistanceProfile

Q_RULES = ("explicit", "theorem1", "five_n")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SparsifyConfig:
    """Controls one sampling run.

    ``q`` is only read when ``q_rule == "explicit"``; ``epsilon`` only
    when ``q_rule == "theorem1"``.
    """

    q: int | None = None
    epsilon: float = 0.1
    seed: int = 0
    q_rule: str = "explicit"

    def __post_init__(self):
        if self.q_rule not in Q_RULES:
            raise ConfigError(f"unknown q rule {self.q_rule!r}; expected one of {Q_RULES}")
        if self.q_rule == "explicit" and (self.q is None or self.q < 1):
            raise ConfigError("explicit q rule needs q >= 1")
        if self.q_rule == "theorem1" and not self.epsilon > 0:
            raise ConfigError("theorem1 q rule needs epsilon > 0")

    def with_seed(self, seed: int) -> "SparsifyConfig":
        return SparsifyConfig(self.q, self.epsilon, seed, self.q_rule)


def resolve_q(rule: str, g: WeightedGraph, epsilon: float = 0.1, q: int | None = None) -> int:
    """Number of edge draws for the given rule.

    ``theorem1`` gives ``ceil(9 |V| ln|V| / eps^2)``; ``five_n`` gives
    ``5 |V|``; ``explicit`` passes ``q`` through.
    """
    n = g.node_count
    if rule == "theorem1":
        if not epsilon > 0:
            raise ConfigError("epsilon must be positive for the theorem1 rule")
        return max(1, math.ceil(9 * n * math.log(n) / epsilon**2))
    if rule == "five_n":
        return 5 * n
    if rule == "explicit":
        if q is None or q < 1:
            raise ConfigError("explicit q must be a positive integer")
        return int(q)
    raise ConfigError(f"unknown q rule {rule!r}")


def config_q(cfg: SparsifyConfig, g: WeightedGraph) -> int:
    return resolve_q(cfg.q_rule, g, cfg.epsilon, cfg.q)


def draw_counts(probabilities: np.ndarray, q: int, seed: int) -> np.ndarray:
    """How often each edge is picked in ``q`` i.i.d. categorical draws."""
    cdf = np.cumsum(probabilities)
    rng = np.random.default_rng(seed)
    picks = np.searchsorted(cdf, rng.random(q) * cdf[-1], side="right")
    # guards the u * cdf[-1] == cdf[-1] rounding edge
    np.minimum(picks, cdf.size - 1, out=picks)
    return np.bincount(picks, minlength=cdf.size)


def sparsify(g: WeightedGraph, profile: ResistanceProfile, cfg: SparsifyConfig) -> WeightedGraph:
    """Sample ``q`` edges with replacement and accumulate ``w / (q p_e)`` per draw.

    Edges never drawn are absent from the result. The node set is kept.
    """
    if len(profile) != g.edge_count:
        raise ValueError(
            f"profile covers {len(profile)} edges but graph has {g.edge_count}"
        )
    q = config_q(cfg, g)
    counts = draw_counts(profile.probabilities, q, cfg.seed)
    hit = counts > 0
    w = g.w[hit] * (counts[hit] / (q * profile.probabilities[hit]))
    return WeightedGraph(g.node_count, g.u[hit], g.v[hit], w)


def reduction(original: WeightedGraph, sparse: WeightedGraph) -> float:
    """Fraction of edges removed, ``1 - |E'| / |E|``."""
    return 1.0 - sparse.edge_count / original.edge_count
