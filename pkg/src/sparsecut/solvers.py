"""QUBO maximizers: exhaustive enumeration and single-flip tabu search."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .qubo import QuboInstance, qubo_objective

EXACT_MAX_DIMENSION = 26
DEFAULT_BUDGET_ITERS = 100_000

_LOW_BITS = 12
_HIGH_BLOCK = 512
_CHUNK_ITERS = 4096


class SolverSizeError(ValueError):
    pass


@dataclass(frozen=True)
class SolveResult:
    assignment: np.ndarray
    objective: float
    solver_name: str
    elapsed: float
    exact: bool
    iterations: int = 0

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.assignment)


def _bit_matrix(count: int, width: int, offset: int = 0) -> np.ndarray:
    idx = np.arange(offset, offset + count, dtype=np.int64)[:, None]
    return ((idx >> np.arange(width, dtype=np.int64)) & 1).astype(np.float64)


def is_complement_symmetric(mat: np.ndarray, rtol: float = 1e-12) -> bool:
    """True when ``f(x) == f(1 - x)`` for the symmetric QUBO matrix ``mat``.

    Holds iff every diagonal entry cancels its off-diagonal row sum.
    """
    diag = np.diag(mat)
    off_rows = mat.sum(axis=1) - diag
    scale = np.abs(mat).sum(axis=1) + 1.0
    return bool(np.all(np.abs(diag + off_rows) <= rtol * scale))


def solve_exact(q: QuboInstance) -> SolveResult:
    """Enumerate every assignment and return a maximizer.

    When the objective is invariant under complementing the assignment
    (true for every cut QUBO) node 0 is fixed on side 0 and node ``i``
    is bit ``i - 1`` of the enumeration index; otherwise node ``i`` is
    bit ``i``. On ties the smallest index wins. The sweep is vectorized
    by splitting the free nodes into a low block (all combinations held
    in memory) and a high block iterated in batches.
    """
    n = q.dimension
    if n > EXACT_MAX_DIMENSION:
        raise SolverSizeError(
            f"exact solver is limited to dimension <= {EXACT_MAX_DIMENSION}, got {n}"
        )
    start = time.perf_counter()
    full = q.dense()
    fixed = 1 if is_complement_symmetric(full) else 0
    free = n - fixed
    best_index = 0
    if free > 0:
        mat = full[fixed:, fixed:]
        k = min(free, _LOW_BITS)
        h = free - k
        low = _bit_matrix(1 << k, k)
        a = mat[:k, :k]
        f_low = np.einsum("ij,jk,ik->i", low, a, low)
        best_val = -np.inf
        if h == 0:
            best_index = int(np.argmax(f_low))
        else:
            b = mat[k:, k:]
            cross = 2.0 * mat[k:, :k] @ low.T  # (h, 2^k)
            for hs in range(0, 1 << h, _HIGH_BLOCK):
                count = min(_HIGH_BLOCK, (1 << h) - hs)
                high = _bit_matrix(count, h, hs)
                f_high = np.einsum("ij,jk,ik->i", high, b, high)
                vals = f_high[:, None] + f_low[None, :] + high @ cross
                pos = int(np.argmax(vals))
                val = vals.flat[pos]
                if val > best_val:
                    best_val = val
                    hi, lo = divmod(pos, 1 << k)
                    best_index = ((hs + hi) << k) | lo
    x = np.zeros(n, dtype=np.int8)
    for i in range(free):
        x[i + fixed] = (best_index >> i) & 1
    return SolveResult(x, qubo_objective(q, x), "exact", time.perf_counter() - start, True)


def _csr(q: QuboInstance):
    off = q.rows != q.cols
    r = np.concatenate([q.rows[off], q.cols[off]])
    c = np.concatenate([q.cols[off], q.rows[off]])
    val = np.concatenate([q.values[off], q.values[off]])
    order = np.argsort(r, kind="stable")
    indptr = np.zeros(q.dimension + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=q.dimension), out=indptr[1:])
    diag = np.zeros(q.dimension)
    on = ~off
    diag[q.rows[on]] = q.values[on]
    return indptr, c[order].astype(np.int64), val[order], diag


@njit(cache=True)
def _load(x, indptr, indices, offv, diag, h):
    cur = 0.0
    for i in range(x.size):
        acc = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            acc += offv[p] * x[indices[p]]
        h[i] = diag[i] + 2.0 * acc
        cur += x[i] * (diag[i] + acc)
    return cur


@njit(cache=True)
def _tabu_chunk(indptr, indices, offv, diag, x, h, tabu_until, best_x,
                istate, fstate, pool, iters, tenure, restart_after):
    # istate: iteration, stall, pool cursor; fstate: current, best
    n = x.size
    it = istate[0]
    stall = istate[1]
    cursor = istate[2]
    cur = fstate[0]
    best = fstate[1]
    for _ in range(iters):
        move = -1
        move_gain = -np.inf
        for i in range(n):
            gain = h[i] if x[i] == 0 else -h[i]
            if gain > move_gain and (tabu_until[i] <= it or cur + gain > best + 1e-9 * (1.0 + abs(best))):
                move = i
                move_gain = gain
        if move < 0:
            # every move tabu without aspiration: take the best one anyway
            for i in range(n):
                gain = h[i] if x[i] == 0 else -h[i]
                if gain > move_gain:
                    move = i
                    move_gain = gain
        step = 1.0 if x[move] == 0 else -1.0
        x[move] = 1 - x[move]
        for p in range(indptr[move], indptr[move + 1]):
            h[indices[p]] += 2.0 * offv[p] * step
        cur += move_gain
        tabu_until[move] = it + 1 + tenure
        it += 1
        if cur > best + 1e-9 * (1.0 + abs(best)):
            best = cur
            best_x[:] = x
            stall = 0
        else:
            stall += 1
        if stall >= restart_after:
            x[:] = pool[cursor]
            cursor += 1
            cur = _load(x, indptr, indices, offv, diag, h)
            tabu_until[:] = 0
            stall = 0
            if cur > best + 1e-9 * (1.0 + abs(best)):
                best = cur
                best_x[:] = x
    istate[0] = it
    istate[1] = stall
    istate[2] = cursor
    fstate[0] = cur
    fstate[1] = best


def default_tenure(dimension: int) -> int:
    return 10 + math.ceil(dimension / 10)


def solve_tabu(q: QuboInstance, budget_iters: int | None = None, budget_secs: float | None = None,
               seed: int = 0, tenure: int | None = None, restart_factor: int = 50) -> SolveResult:
    """Single-bit-flip tabu search maximizing the QUBO objective.

    Flip gains are kept per variable and patched along the flipped
    variable's row after each move. A tabu move is still taken when it
    would beat the incumbent. After ``restart_factor * dimension`` moves
    without improvement the search restarts from a fresh random
    assignment; the incumbent is never discarded.

    With only ``budget_iters`` the run is deterministic for a given seed,
    and a larger budget replays the smaller one as a prefix. A
    ``budget_secs`` limit is checked between chunks of moves.
    """
    if budget_iters is None and budget_secs is None:
        budget_iters = DEFAULT_BUDGET_ITERS
    if budget_iters is not None and budget_iters < 1:
        raise ValueError("budget_iters must be positive")
    if budget_secs is not None and not budget_secs > 0:
        raise ValueError("budget_secs must be positive")
    start = time.perf_counter()
    n = q.dimension
    tenure = default_tenure(n) if tenure is None else int(tenure)
    restart_after = max(1, restart_factor * n)
    indptr, indices, offv, diag = _csr(q)
    rng = np.random.default_rng(seed)

    x = rng.integers(0, 2, size=n).astype(np.int8)
    h = np.empty(n)
    cur = _load(x, indptr, indices, offv, diag, h)
    best_x = x.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    istate = np.zeros(3, dtype=np.int64)
    fstate = np.array([cur, cur])
    pool_rows = _CHUNK_ITERS // restart_after + 1

    done = 0
    while True:
        if budget_iters is not None and done >= budget_iters:
            break
        if budget_secs is not None and time.perf_counter() - start >= budget_secs:
            break
        step = _CHUNK_ITERS if budget_iters is None else min(_CHUNK_ITERS, budget_iters - done)
        # pool size depends only on the chunk length, so shorter budgets replay a prefix
        pool = rng.integers(0, 2, size=(pool_rows, n)).astype(np.int8)
        istate[2] = 0
        _tabu_chunk(indptr, indices, offv, diag, x, h, tabu_until, best_x,
                    istate, fstate, pool, step, tenure, restart_after)
        done += step
    return SolveResult(best_x.copy(), qubo_objective(q, best_x), "tabu",
                       time.perf_counter() - start, False, done)


def solve(q: QuboInstance, solver: str = "tabu", **kwargs) -> SolveResult:
    if solver == "exact":
        return solve_exact(q)
    if solver == "tabu":
        return solve_tabu(q, **kwargs)
    raise ValueError(f"unknown embedded solver {solver!r}")
