"""Transfer-cost objective and capacity feasibility checks.

Placing a split after layer ``p`` sends every bit that crosses the boundary,
i.e. the sum of ``traffic[i][j]`` over pairs with ``i <= p < j``, through the
link behind the hosting device.  The planning objective is the total transfer
time: for a split solution ``x`` it is the sum over the first ``kappa - 1``
points of ``cut_traffic(x_t) / link_rate[t]``.  The final point ends the
model, so nothing is forwarded there and the return trip of the output is not
counted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DeviceChain, FfnnModel, SplitSolution, partition


@dataclass(frozen=True)
class CostBreakdown:
    """Objective value with one transfer term per crossed boundary."""

    boundary_terms: tuple[float, ...]
    total: float


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of the capacity check; names the first violated constraint."""

    ok: bool
    device: int | None = None
    constraint: str | None = None
    detail: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def cut_traffic_table(model: FfnnModel) -> np.ndarray:
    """Boundary traffic for every split position, computed in O(n^2) total.

    Returns an array ``table`` of length ``n + 1`` where ``table[p]`` is the
    bit count crossing a split placed after layer ``p``.  Row ``i`` of the
    traffic matrix only holds entries with ``j > i``, so the pairs with
    ``i <= p`` are the first ``p`` row sums, and subtracting the first ``p``
    column sums removes exactly the pairs that also have ``j <= p``.
    """
    row_totals = model.traffic.sum(axis=1)
    col_totals = model.traffic.sum(axis=0)
    table = np.zeros(model.num_layers + 1)
    table[1:] = np.cumsum(row_totals) - np.cumsum(col_totals)
    # Nothing flows past the last layer; pin the identity against float
    # rounding between the two accumulation orders.
    table[-1] = 0.0
    return table


def cut_traffic(model: FfnnModel, boundary: int) -> float:
    """Bits crossing a single split placed after layer ``boundary`` (1-based)."""
    if not 1 <= boundary <= model.num_layers:
        raise ValueError(
            f"boundary {boundary} outside layer range 1..{model.num_layers}"
        )
    return float(cut_traffic_table(model)[boundary])


def objective(model: FfnnModel, chain: DeviceChain, x: SplitSolution) -> CostBreakdown:
    """Total transfer time of a split solution, with per-boundary terms.

    Terms are accumulated in ascending device order so equal inputs always
    reproduce the identical float result.
    """
    if x.kappa > chain.num_devices:
        raise ValueError(
            f"solution uses {x.kappa} devices but the chain has {chain.num_devices}"
        )
    if x.points[-1] != model.num_layers:
        raise ValueError(
            f"last splitting point {x.points[-1]} must equal the layer count "
            f"{model.num_layers}"
        )
    table = cut_traffic_table(model)
    terms = []
    total = 0.0
    for t in range(x.kappa - 1):
        term = float(table[x.points[t]]) / chain.link_rate[t]
        terms.append(term)
        total += term
    return CostBreakdown(boundary_terms=tuple(terms), total=total)


def is_feasible(model: FfnnModel, chain: DeviceChain, x: SplitSolution) -> FeasibilityResult:
    """Check the per-device capacity constraints for a split solution.

    Device ``t`` can host its layer block iff the block's largest cpu cost
    stays within ``cpu_capacity`` and the summed memory cost stays within
    ``mem_capacity``.
    """
    if x.kappa > chain.num_devices:
        raise ValueError(
            f"solution uses {x.kappa} devices but the chain has {chain.num_devices}"
        )
    blocks = partition(x, model.num_layers).subsets
    for t, block in enumerate(blocks, start=1):
        device = chain.devices[t - 1]
        peak_cpu = max(model.layers[i - 1].cpu_cost for i in block)
        if peak_cpu > device.cpu_capacity:
            return FeasibilityResult(
                ok=False,
                device=t,
                constraint="cpu",
                detail=(
                    f"device {t}: peak cpu cost {peak_cpu} exceeds "
                    f"capacity {device.cpu_capacity}"
                ),
            )
        total_mem = sum(model.layers[i - 1].mem_cost for i in block)
        if total_mem > device.mem_capacity:
            return FeasibilityResult(
                ok=False,
                device=t,
                constraint="mem",
                detail=(
                    f"device {t}: total mem cost {total_mem} exceeds "
                    f"capacity {device.mem_capacity}"
                ),
            )
    return FeasibilityResult(ok=True)
