"""Greedy split planner with cheapest-cut backtracking.

``solve_fixed_splits`` fills devices in chain order: layers are accepted onto
the current device while its capacity holds, and the boundary cost of every
accepted position is remembered.  When a layer no longer fits, the split for
the current device is committed at the recorded position with the cheapest
boundary traffic (ties pick the latest position), and the layers accepted
after that position move to the next device, which re-checks them against its
own capacities; if they overflow it the commit-and-move step cascades down
the chain.  The scan pointer never moves backwards, so the loop body runs at
most ``num_layers + num_splits - 1`` times per attempt.

``solve`` tries one partition, then two, and so on, returning the first
attempt that places every layer; smaller partition counts are preferred
because every extra boundary can only add transfer time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cost import CostBreakdown, cut_traffic_table, objective
from .model import DeviceChain, FfnnModel, SplitSolution, max_split_count


@dataclass(frozen=True)
class FixedSplitAttempt:
    """Outcome of one fixed-partition-count attempt."""

    solution: SplitSolution | None
    iterations: int


@dataclass(frozen=True)
class HeuristicTrace:
    """Instrumentation across attempts: loop iterations per partition count."""

    kappa_attempted: tuple[int, ...]
    while_iterations: tuple[int, ...]
    outcome: str  # "solution" or "no-solution"

    @property
    def total_iterations(self) -> int:
        return sum(self.while_iterations)


@dataclass(frozen=True)
class HeuristicResult:
    solution: SplitSolution | None
    cost: CostBreakdown | None
    trace: HeuristicTrace


def iteration_budget(num_layers: int, num_splits: int) -> int:
    """Hard cap on loop iterations for one attempt."""
    return num_layers + num_splits - 1


def total_iteration_budget(num_layers: int, max_splits: int) -> int:
    """Hard cap across all attempts from 1 to ``max_splits`` partitions.

    Closed form of the per-attempt budgets summed: ``k^2/2 + (2n - 1)k/2``
    for ``k = max_splits`` and ``n = num_layers``; always an integer.
    """
    return (max_splits * max_splits + (2 * num_layers - 1) * max_splits) // 2


def solve_fixed_splits(
    model: FfnnModel, chain: DeviceChain, num_splits: int
) -> FixedSplitAttempt:
    """Greedily place all layers on at most ``num_splits`` devices.

    Returns the splitting points (always ending at the last layer) or None
    when the greedy scan runs out of devices, plus the loop iteration count.
    The solution may use fewer than ``num_splits`` partitions when the tail
    devices are never needed.
    """
    limit = max_split_count(model, chain)
    if not 1 <= num_splits <= limit:
        raise ValueError(
            f"num_splits {num_splits} outside 1..{limit} "
            f"({model.num_layers} layers, {chain.num_devices} devices)"
        )
    n = model.num_layers
    cpu = [layer.cpu_cost for layer in model.layers]
    mem = [layer.mem_cost for layer in model.layers]
    prefix_mem = [0.0]
    for value in mem:
        prefix_mem.append(prefix_mem[-1] + value)
    cut = cut_traffic_table(model).tolist()
    cpu_cap = [d.cpu_capacity for d in chain.devices]
    mem_cap = [d.mem_capacity for d in chain.devices]

    committed: list[int] = []
    device = 1  # 1-based index of the device being filled
    block_start = 1  # first layer of that device's block
    accepted = 0  # last layer accepted on it (0 = none yet)
    load = 0.0  # its running memory load
    layer = 1
    iterations = 0

    def fail() -> FixedSplitAttempt:
        return FixedSplitAttempt(solution=None, iterations=iterations)

    while layer <= n:
        iterations += 1
        if cpu[layer - 1] <= cpu_cap[device - 1] and load + mem[layer - 1] <= mem_cap[device - 1]:
            accepted = layer
            load += mem[layer - 1]
            layer += 1
            continue
        # The layer does not fit: commit a split for this device and move the
        # overhang to the next one, cascading while the overhang overflows.
        while True:
            if device + 1 > num_splits:
                return fail()
            if accepted < block_start:
                # Nothing was ever accepted here; committing now would leave
                # the device without layers, which no valid split allows.
                return fail()
            best = block_start
            for p in range(block_start + 1, accepted + 1):
                if cut[p] <= cut[best]:
                    best = p
            committed.append(best)
            device += 1
            block_start = best + 1
            # Layers best+1 .. layer-1 move onto the new device.
            accepted = best
            load = 0.0
            overflowed = False
            for p in range(best + 1, layer):
                if cpu[p - 1] > cpu_cap[device - 1] or (
                    prefix_mem[p] - prefix_mem[best] > mem_cap[device - 1]
                ):
                    overflowed = True
                    break
                accepted = p
            load = prefix_mem[accepted] - prefix_mem[best]
            if not overflowed:
                break
        # Retry the same layer on the device the cascade settled on.

    if iterations > iteration_budget(n, num_splits):
        raise RuntimeError(
            f"iteration budget exceeded: {iterations} > {iteration_budget(n, num_splits)}"
        )
    points = tuple(committed) + (n,)
    return FixedSplitAttempt(solution=SplitSolution(points=points), iterations=iterations)


def solve(
    model: FfnnModel, chain: DeviceChain, max_splits: int | None = None
) -> HeuristicResult:
    """Try increasing partition counts; return the first greedy success."""
    limit = max_split_count(model, chain)
    if max_splits is not None:
        if max_splits < 1:
            raise ValueError(f"max_splits must be >= 1, got {max_splits}")
        limit = min(limit, max_splits)
    attempted: list[int] = []
    iteration_counts: list[int] = []
    for num_splits in range(1, limit + 1):
        attempt = solve_fixed_splits(model, chain, num_splits)
        attempted.append(num_splits)
        iteration_counts.append(attempt.iterations)
        if attempt.solution is not None:
            trace = HeuristicTrace(
                kappa_attempted=tuple(attempted),
                while_iterations=tuple(iteration_counts),
                outcome="solution",
            )
            return HeuristicResult(
                solution=attempt.solution,
                cost=objective(model, chain, attempt.solution),
                trace=trace,
            )
    trace = HeuristicTrace(
        kappa_attempted=tuple(attempted),
        while_iterations=tuple(iteration_counts),
        outcome="no-solution",
    )
    return HeuristicResult(solution=None, cost=None, trace=trace)
