"""Layer-profile ingestion, normalization, and canonical file formats.

Three file kinds live here, all JSON, UTF-8, human-diffable:

* Raw profile: ``{"version": 1, "layers": [{"name", "trainable_params",
  "successors": [{"to": <layer name>, "bits": <number or "derive">}]}]}``.
  The layer order in the file is authoritative; edges must point forward.
  A layer's cpu and memory footprints are both taken from its trainable
  parameter count, and a ``"derive"`` edge carries the source layer's
  memory footprint as its bit count.
* Canonical model: ``{"version": 1, "layers": [{"name", "cpu_cost",
  "mem_cost"}], "edges": [{"from", "to", "bits"}]}`` where ``from``/``to``
  are 1-based layer positions.
* Canonical chain: ``{"devices": [{"cpu_capacity", "mem_capacity"}],
  "links": [{"rate"}]}``.

``normalize`` turns a raw profile plus raw device capacities and link rates
into model and chain objects expressed in [0, 1] units: cpu quantities are
divided by the largest cpu capacity among the devices, memory quantities
(including edge bits) by the largest memory capacity, and link rates by the
largest rate.  The divisors are returned so results can be converted back.

Canonical save/load round-trips are bit-identical: loading a saved file and
saving it again reproduces the same bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import Device, DeviceChain, FfnnModel, LayerProfile

RAW_PROFILE_VERSION = 1
MODEL_FORMAT_VERSION = 1


class ProfileFormatError(ValueError):
    """A profile, model, or chain file is malformed or inconsistent."""


@dataclass(frozen=True)
class RawEdge:
    """Forward edge in a raw profile; ``bits`` is None for "derive"."""

    to: str
    bits: float | None = None


@dataclass(frozen=True)
class RawLayerProfile:
    """One raw layer: name, trainable-parameter count, outgoing edges."""

    name: str
    trainable_params: int
    successors: tuple[RawEdge, ...] = ()


@dataclass(frozen=True)
class NormalizationFactors:
    """The divisors applied by :func:`normalize`, all strictly positive.

    ``cpu_factor`` is the largest cpu capacity among the devices,
    ``mem_factor`` the largest memory capacity, and ``bandwidth_factor``
    the largest link rate (1.0 when the chain has no links).
    """

    cpu_factor: float
    mem_factor: float
    bandwidth_factor: float

    def __post_init__(self) -> None:
        for label, value in (
            ("cpu_factor", self.cpu_factor),
            ("mem_factor", self.mem_factor),
            ("bandwidth_factor", self.bandwidth_factor),
        ):
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{label} must be finite and > 0, got {value}")

    def seconds_per_cost_unit(self) -> float:
        """Multiply a normalized transfer time by this to undo the scaling.

        Normalized costs divide bits by the memory factor and rates by the
        bandwidth factor, so one normalized time unit equals mem_factor /
        bandwidth_factor raw time units.
        """
        return self.mem_factor / self.bandwidth_factor


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ProfileFormatError(message)


def _read_json(path: str | Path) -> object:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as error:
        raise ProfileFormatError(f"{path}: not valid JSON: {error}") from error


def _write_json(path: str | Path, payload: object) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _number(value: object, context: str) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"{context} must be a number, got {value!r}",
    )
    result = float(value)
    _require(math.isfinite(result), f"{context} must be finite, got {value!r}")
    return result


def load_profile(path: str | Path) -> list[RawLayerProfile]:
    """Read a raw profile file into ordered :class:`RawLayerProfile` rows.

    Rejects duplicate layer names, negative parameter counts, edges whose
    target is unknown, and edges that do not point to a later layer.
    """
    payload = _read_json(path)
    _require(isinstance(payload, dict), f"{path}: top level must be an object")
    _require(
        payload.get("version") == RAW_PROFILE_VERSION,
        f"{path}: unsupported version {payload.get('version')!r}, "
        f"expected {RAW_PROFILE_VERSION}",
    )
    rows = payload.get("layers")
    _require(isinstance(rows, list) and rows, f"{path}: 'layers' must be a non-empty list")

    names: list[str] = []
    for position, row in enumerate(rows, start=1):
        _require(isinstance(row, dict), f"{path}: layer {position} must be an object")
        name = row.get("name")
        _require(
            isinstance(name, str) and name,
            f"{path}: layer {position} needs a non-empty string name",
        )
        _require(name not in names, f"{path}: duplicate layer name {name!r}")
        names.append(name)

    order = {name: position for position, name in enumerate(names, start=1)}
    layers: list[RawLayerProfile] = []
    for position, row in enumerate(rows, start=1):
        name = names[position - 1]
        params = row.get("trainable_params")
        _require(
            isinstance(params, int) and not isinstance(params, bool),
            f"{path}: layer {name!r} trainable_params must be an integer",
        )
        _require(
            params >= 0,
            f"{path}: layer {name!r} trainable_params must be >= 0, got {params}",
        )
        edges: list[RawEdge] = []
        seen_targets: set[str] = set()
        for edge in row.get("successors", []):
            _require(
                isinstance(edge, dict),
                f"{path}: layer {name!r} successors must be objects",
            )
            target = edge.get("to")
            _require(
                isinstance(target, str) and target in order,
                f"{path}: layer {name!r} has unknown edge target {target!r}",
            )
            _require(
                order[target] > position,
                f"{path}: backward edge {name!r} -> {target!r} "
                f"(targets must come later in the layer order)",
            )
            _require(
                target not in seen_targets,
                f"{path}: layer {name!r} lists target {target!r} twice",
            )
            seen_targets.add(target)
            bits = edge.get("bits", "derive")
            if bits == "derive":
                edges.append(RawEdge(to=target, bits=None))
            else:
                value = _number(bits, f"{path}: edge {name!r} -> {target!r} bits")
                _require(
                    value >= 0.0,
                    f"{path}: edge {name!r} -> {target!r} bits must be >= 0",
                )
                edges.append(RawEdge(to=target, bits=value))
        layers.append(
            RawLayerProfile(name=name, trainable_params=params, successors=tuple(edges))
        )
    return layers


def normalize(
    raw_layers: Sequence[RawLayerProfile],
    device_capacities: Sequence[tuple[float, float]],
    link_rates: Sequence[float],
) -> tuple[FfnnModel, DeviceChain, NormalizationFactors]:
    """Scale a raw profile and raw device figures into [0, 1] planning units.

    ``device_capacities`` holds (cpu, mem) pairs in raw units and must list
    one more device than ``link_rates`` has links.  Each cpu quantity is
    divided by the largest cpu capacity, each memory quantity (layer
    footprints and explicit edge bits alike) by the largest memory capacity,
    and each rate by the largest rate.  "derive" edges receive the source
    layer's normalized memory footprint.

    The returned model is only as clean as its inputs: a layer with zero
    trainable parameters yields a zero footprint, which ``validate_model``
    reports, and a layer larger than every device yields a footprint above
    1.  Callers that need a usable model should check the validation report.
    """
    if not raw_layers:
        raise ValueError("normalize needs at least one layer")
    if not device_capacities:
        raise ValueError("normalize needs at least one device")
    if len(link_rates) != len(device_capacities) - 1:
        raise ValueError(
            f"{len(device_capacities)} devices need {len(device_capacities) - 1} "
            f"link rates, got {len(link_rates)}"
        )
    cpu_factor = max(float(cpu) for cpu, _ in device_capacities)
    mem_factor = max(float(mem) for _, mem in device_capacities)
    bandwidth_factor = max(float(r) for r in link_rates) if link_rates else 1.0
    for label, value in (
        ("cpu capacity", cpu_factor),
        ("memory capacity", mem_factor),
        ("link rate", bandwidth_factor),
    ):
        if not math.isfinite(value) or value <= 0.0:
            raise ValueError(f"largest {label} must be > 0 to normalize, got {value}")
    factors = NormalizationFactors(
        cpu_factor=cpu_factor, mem_factor=mem_factor, bandwidth_factor=bandwidth_factor
    )

    order = {raw.name: position for position, raw in enumerate(raw_layers, start=1)}
    n = len(raw_layers)
    layers = tuple(
        LayerProfile(
            index=position,
            cpu_cost=raw.trainable_params / cpu_factor,
            mem_cost=raw.trainable_params / mem_factor,
            name=raw.name,
        )
        for position, raw in enumerate(raw_layers, start=1)
    )
    traffic = np.zeros((n, n))
    for position, raw in enumerate(raw_layers, start=1):
        for edge in raw.successors:
            bits = (
                layers[position - 1].mem_cost
                if edge.bits is None
                else edge.bits / mem_factor
            )
            traffic[position - 1][order[edge.to] - 1] = bits
    model = FfnnModel(layers=layers, traffic=traffic)

    devices = tuple(
        Device(
            cpu_capacity=float(cpu) / cpu_factor,
            mem_capacity=float(mem) / mem_factor,
        )
        for cpu, mem in device_capacities
    )
    chain = DeviceChain(
        devices=devices,
        link_rate=tuple(float(r) / bandwidth_factor for r in link_rates),
    )
    return model, chain, factors


def save_model(model: FfnnModel, path: str | Path) -> None:
    """Write a model to the canonical JSON format."""
    edges = []
    n = model.num_layers
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            bits = float(model.traffic[i - 1][j - 1])
            if bits != 0.0:
                edges.append({"from": i, "to": j, "bits": bits})
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "layers": [
            {"name": layer.name, "cpu_cost": layer.cpu_cost, "mem_cost": layer.mem_cost}
            for layer in model.layers
        ],
        "edges": edges,
    }
    _write_json(path, payload)


def load_model(path: str | Path) -> FfnnModel:
    """Read a canonical model file; inverse of :func:`save_model`."""
    payload = _read_json(path)
    _require(isinstance(payload, dict), f"{path}: top level must be an object")
    _require(
        payload.get("version") == MODEL_FORMAT_VERSION,
        f"{path}: unsupported version {payload.get('version')!r}, "
        f"expected {MODEL_FORMAT_VERSION}",
    )
    rows = payload.get("layers")
    _require(isinstance(rows, list) and rows, f"{path}: 'layers' must be a non-empty list")
    layers = []
    for position, row in enumerate(rows, start=1):
        _require(isinstance(row, dict), f"{path}: layer {position} must be an object")
        name = row.get("name")
        _require(
            name is None or isinstance(name, str),
            f"{path}: layer {position} name must be a string or null",
        )
        layers.append(
            LayerProfile(
                index=position,
                cpu_cost=_number(row.get("cpu_cost"), f"{path}: layer {position} cpu_cost"),
                mem_cost=_number(row.get("mem_cost"), f"{path}: layer {position} mem_cost"),
                name=name,
            )
        )
    n = len(layers)
    traffic = np.zeros((n, n))
    edges = payload.get("edges", [])
    _require(isinstance(edges, list), f"{path}: 'edges' must be a list")
    for edge in edges:
        _require(isinstance(edge, dict), f"{path}: edges must be objects")
        source = edge.get("from")
        target = edge.get("to")
        for label, value in (("from", source), ("to", target)):
            _require(
                isinstance(value, int) and not isinstance(value, bool)
                and 1 <= value <= n,
                f"{path}: edge {label} {value!r} outside layer range 1..{n}",
            )
        _require(
            source < target,
            f"{path}: backward edge {source} -> {target} "
            f"(edges must point to a later layer)",
        )
        _require(
            traffic[source - 1][target - 1] == 0.0,
            f"{path}: duplicate edge {source} -> {target}",
        )
        bits = _number(edge.get("bits"), f"{path}: edge {source} -> {target} bits")
        _require(bits >= 0.0, f"{path}: edge {source} -> {target} bits must be >= 0")
        traffic[source - 1][target - 1] = bits
    return FfnnModel(layers=tuple(layers), traffic=traffic)


def save_chain(chain: DeviceChain, path: str | Path) -> None:
    """Write a device chain to the canonical JSON format."""
    payload = {
        "devices": [
            {"cpu_capacity": d.cpu_capacity, "mem_capacity": d.mem_capacity}
            for d in chain.devices
        ],
        "links": [{"rate": rate} for rate in chain.link_rate],
    }
    _write_json(path, payload)


def load_chain(path: str | Path) -> DeviceChain:
    """Read a canonical chain file; inverse of :func:`save_chain`."""
    payload = _read_json(path)
    _require(isinstance(payload, dict), f"{path}: top level must be an object")
    rows = payload.get("devices")
    _require(
        isinstance(rows, list) and rows, f"{path}: 'devices' must be a non-empty list"
    )
    devices = []
    for position, row in enumerate(rows, start=1):
        _require(isinstance(row, dict), f"{path}: device {position} must be an object")
        devices.append(
            (
                _number(row.get("cpu_capacity"), f"{path}: device {position} cpu_capacity"),
                _number(row.get("mem_capacity"), f"{path}: device {position} mem_capacity"),
            )
        )
    links = payload.get("links")
    _require(isinstance(links, list), f"{path}: 'links' must be a list")
    rates = []
    for position, row in enumerate(links, start=1):
        _require(isinstance(row, dict), f"{path}: link {position} must be an object")
        rates.append(_number(row.get("rate"), f"{path}: link {position} rate"))
    try:
        return DeviceChain(
            devices=tuple(Device(cpu, mem) for cpu, mem in devices),
            link_rate=tuple(rates),
        )
    except ValueError as error:
        raise ProfileFormatError(f"{path}: {error}") from error


def convert_framework_checkpoint(path: str | Path) -> list[RawLayerProfile]:
    """Placeholder for extracting a raw profile from a framework checkpoint.

    Extracting model internals is out of scope for this package.  The
    expected procedure: walk the model's layers in forward order, count each
    layer's trainable parameters, record the successor edges of the compute
    graph, and write them in the raw profile format documented in this
    module.  The repository ships small hand-written profiles instead.
    """
    raise NotImplementedError(
        "checkpoint extraction is out of scope; write a raw profile file "
        "(see the module docstring) with per-layer trainable-parameter "
        "counts and successor edges, then use load_profile"
    )
