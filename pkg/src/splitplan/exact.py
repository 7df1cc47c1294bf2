"""Exact minimum-transfer-time solvers.

``solve_fixed_splits`` finds the cheapest feasible split into exactly
``num_splits`` contiguous blocks by dynamic programming over (device, last
split position) states.  ``solve`` runs it for every usable partition count
and keeps the global best.  ``brute_force_fixed_splits`` enumerates every
candidate split vector and exists to cross-check the DP on small instances;
it refuses instances beyond an explicit candidate budget.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cost import cut_traffic_table, is_feasible, objective
from .model import DeviceChain, FfnnModel, SplitSolution, max_split_count


class EnumerationBudgetExceeded(RuntimeError):
    """The instance has more candidate splits than the enumeration budget."""


@dataclass(frozen=True)
class SolvedSplit:
    """A feasible split solution together with its transfer cost."""

    solution: SplitSolution
    cost: float


@dataclass(frozen=True)
class ExactResult:
    """Per-partition-count optima plus the global choice.

    ``per_kappa[k]`` is the optimum over solutions with exactly ``k``
    partitions, or ``None`` when no feasible one exists.  ``best`` is the
    cheapest entry; cost ties go to the smaller partition count.
    """

    per_kappa: dict[int, SolvedSplit | None]
    best: SolvedSplit | None


def _validate_num_splits(model: FfnnModel, chain: DeviceChain, num_splits: int) -> None:
    limit = max_split_count(model, chain)
    if not 1 <= num_splits <= limit:
        raise ValueError(
            f"num_splits {num_splits} outside 1..{limit} "
            f"({model.num_layers} layers, {chain.num_devices} devices)"
        )


def solve_fixed_splits(
    model: FfnnModel, chain: DeviceChain, num_splits: int
) -> SolvedSplit | None:
    """Optimal split into exactly ``num_splits`` non-empty blocks, or None.

    ``best[t][p]`` is the cheapest way to place layers ``1..p`` on devices
    ``1..t`` with the t-th split at ``p``; moving from split ``q`` on device
    ``t-1`` costs ``cut_traffic(q) / link_rate[t-1]`` and requires block
    ``q+1..p`` to fit device ``t``.  Cost ties pick the smaller ``q``.
    """
    _validate_num_splits(model, chain, num_splits)
    n = model.num_layers
    cpu = model.cpu_costs()
    prefix_mem = np.zeros(n + 1)
    prefix_mem[1:] = np.cumsum(model.mem_costs())
    cut_table = cut_traffic_table(model)
    positions = np.arange(n + 1)

    def block_limits(device_index: int) -> tuple[np.ndarray, np.ndarray]:
        """Per split position p, the smallest q so block q+1..p fits the device."""
        device = chain.devices[device_index]
        # Every layer with cpu cost above the capacity must stay left of the block.
        over = cpu > device.cpu_capacity
        last_over = np.maximum.accumulate(np.where(over, positions[1:], 0))
        cpu_min_q = np.concatenate(([0], last_over))
        mem_min_q = np.searchsorted(prefix_mem, prefix_mem - device.mem_capacity, "left")
        return cpu_min_q, mem_min_q

    cpu_min_q, mem_min_q = block_limits(0)
    best = np.full(n + 1, np.inf)
    fits_first = (cpu_min_q == 0) & (mem_min_q == 0)
    best[1:][fits_first[1:]] = 0.0
    parents: list[np.ndarray] = []

    for t in range(2, num_splits + 1):
        cpu_min_q, mem_min_q = block_limits(t - 1)
        arrival = best + cut_table / chain.link_rate[t - 2]
        next_best = np.full(n + 1, np.inf)
        parent = np.zeros(n + 1, dtype=np.int64)
        for p in range(t, n + 1):
            lo = max(t - 1, int(cpu_min_q[p]), int(mem_min_q[p]))
            if lo >= p:
                continue
            window = arrival[lo:p]
            k = int(np.argmin(window))
            if window[k] < np.inf:
                next_best[p] = window[k]
                parent[p] = lo + k
        best = next_best
        parents.append(parent)

    if not np.isfinite(best[n]):
        return None
    points = [n]
    for parent in reversed(parents):
        points.append(int(parent[points[-1]]))
    solution = SplitSolution(points=tuple(reversed(points)))
    return SolvedSplit(solution=solution, cost=objective(model, chain, solution).total)


def solve(
    model: FfnnModel, chain: DeviceChain, max_splits: int | None = None
) -> ExactResult:
    """Optimal split for every partition count up to the usable maximum."""
    limit = max_split_count(model, chain)
    if max_splits is not None:
        if max_splits < 1:
            raise ValueError(f"max_splits must be >= 1, got {max_splits}")
        limit = min(limit, max_splits)
    per_kappa: dict[int, SolvedSplit | None] = {}
    best: SolvedSplit | None = None
    for kappa in range(1, limit + 1):
        entry = solve_fixed_splits(model, chain, kappa)
        per_kappa[kappa] = entry
        if entry is not None and (best is None or entry.cost < best.cost):
            best = entry
    return ExactResult(per_kappa=per_kappa, best=best)


def brute_force_fixed_splits(
    model: FfnnModel,
    chain: DeviceChain,
    num_splits: int,
    budget: int = 10**6,
) -> SolvedSplit | None:
    """Exhaustive reference solver for cross-checking on small instances."""
    _validate_num_splits(model, chain, num_splits)
    n = model.num_layers
    candidates = math.comb(n - 1, num_splits - 1)
    if candidates > budget:
        raise EnumerationBudgetExceeded(
            f"{candidates} candidate splits exceed the budget of {budget}"
        )
    best: SolvedSplit | None = None
    for interior in itertools.combinations(range(1, n), num_splits - 1):
        solution = SplitSolution(points=interior + (n,))
        if not is_feasible(model, chain, solution):
            continue
        cost = objective(model, chain, solution).total
        if best is None or cost < best.cost:
            best = SolvedSplit(solution=solution, cost=cost)
    return best
