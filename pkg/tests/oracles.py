"""Independent reference computations used only by the tests.

Nothing here imports the code under test beyond plain data access, so a
bug in the package cannot leak into the expected values.
"""
import itertools

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


def edge_scan_cut(n, edges, bits):
    total = 0.0
    for u, v, w in edges:
        if bits[u] != bits[v]:
            total += w
    return total


def brute_force_maxcut(n, edges):
    """Plain enumeration over every subset, evaluated edge by edge."""
    best = -1.0
    for bits in itertools.product((0, 1), repeat=n):
        val = edge_scan_cut(n, edges, bits)
        if val > best:
            best = val
    return best


def pinv_resistances(n, edges):
    lap = np.zeros((n, n))
    for u, v, w in edges:
        lap[u, u] += w
        lap[v, v] += w
        lap[u, v] -= w
        lap[v, u] -= w
    lp = np.linalg.pinv(lap, rcond=1e-12, hermitian=True)
    return np.array([lp[u, u] + lp[v, v] - 2 * lp[u, v] for u, v, _ in edges])


def component_count(n, edges):
    if not edges:
        return n
    u = [e[0] for e in edges]
    v = [e[1] for e in edges]
    adj = coo_matrix((np.ones(len(edges)), (u, v)), shape=(n, n))
    return connected_components(adj, directed=False)[0]


def random_edges(rng, n, density, weighted=False):
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                w = float(rng.integers(1, 101)) if weighted else 1.0
                edges.append((u, v, w))
    return edges
