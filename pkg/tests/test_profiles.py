import json

import numpy as np
import pytest

from splitplan.model import validate_model
from splitplan.profiles import (
    NormalizationFactors,
    ProfileFormatError,
    RawEdge,
    RawLayerProfile,
    convert_framework_checkpoint,
    load_chain,
    load_model,
    load_profile,
    normalize,
    save_chain,
    save_model,
)
from splitplan.scenarios import generate_device_chain, generate_random_model, iteration_rng


def write_profile(tmp_path, layers, version=1, name="profile.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"version": version, "layers": layers}))
    return path


def linear_layers(params):
    layers = []
    for i, count in enumerate(params):
        successors = []
        if i + 1 < len(params):
            successors.append({"to": f"layer{i + 1}", "bits": "derive"})
        layers.append(
            {"name": f"layer{i}", "trainable_params": count, "successors": successors}
        )
    return layers


class TestLoadProfile:
    def test_three_layer_linear_chain(self, tmp_path):
        path = write_profile(tmp_path, linear_layers([100, 300, 600]))
        rows = load_profile(path)
        assert [r.name for r in rows] == ["layer0", "layer1", "layer2"]
        assert [r.trainable_params for r in rows] == [100, 300, 600]
        assert rows[0].successors == (RawEdge(to="layer1", bits=None),)
        assert rows[2].successors == ()

    def test_explicit_bits_are_kept(self, tmp_path):
        layers = linear_layers([10, 20])
        layers[0]["successors"][0]["bits"] = 1234.5
        rows = load_profile(write_profile(tmp_path, layers))
        assert rows[0].successors == (RawEdge(to="layer1", bits=1234.5),)

    def test_missing_bits_field_means_derive(self, tmp_path):
        layers = linear_layers([10, 20])
        del layers[0]["successors"][0]["bits"]
        rows = load_profile(write_profile(tmp_path, layers))
        assert rows[0].successors[0].bits is None

    def test_large_profile_is_accepted(self, tmp_path):
        rows = load_profile(write_profile(tmp_path, linear_layers([1000] * 177)))
        assert len(rows) == 177

    def test_rejects_backward_edge(self, tmp_path):
        layers = linear_layers([1, 2, 3])
        layers[2]["successors"] = [{"to": "layer0", "bits": "derive"}]
        with pytest.raises(ProfileFormatError, match="backward edge"):
            load_profile(write_profile(tmp_path, layers))

    def test_rejects_self_edge(self, tmp_path):
        layers = linear_layers([1, 2])
        layers[1]["successors"] = [{"to": "layer1", "bits": "derive"}]
        with pytest.raises(ProfileFormatError, match="backward edge"):
            load_profile(write_profile(tmp_path, layers))

    def test_rejects_unknown_target(self, tmp_path):
        layers = linear_layers([1, 2])
        layers[0]["successors"] = [{"to": "missing", "bits": "derive"}]
        with pytest.raises(ProfileFormatError, match="unknown edge target"):
            load_profile(write_profile(tmp_path, layers))

    def test_rejects_duplicate_names(self, tmp_path):
        layers = linear_layers([1, 2])
        layers[1]["name"] = "layer0"
        layers[0]["successors"] = []
        with pytest.raises(ProfileFormatError, match="duplicate layer name"):
            load_profile(write_profile(tmp_path, layers))

    def test_rejects_duplicate_edge_targets(self, tmp_path):
        layers = linear_layers([1, 2])
        layers[0]["successors"].append({"to": "layer1", "bits": 5})
        with pytest.raises(ProfileFormatError, match="twice"):
            load_profile(write_profile(tmp_path, layers))

    @pytest.mark.parametrize("params", [-1, 2.5, True, "many"])
    def test_rejects_bad_parameter_counts(self, tmp_path, params):
        layers = linear_layers([1, 2])
        layers[0]["trainable_params"] = params
        with pytest.raises(ProfileFormatError, match="trainable_params"):
            load_profile(write_profile(tmp_path, layers))

    def test_rejects_negative_bits(self, tmp_path):
        layers = linear_layers([1, 2])
        layers[0]["successors"][0]["bits"] = -4
        with pytest.raises(ProfileFormatError, match="bits"):
            load_profile(write_profile(tmp_path, layers))

    def test_rejects_wrong_version(self, tmp_path):
        path = write_profile(tmp_path, linear_layers([1]), version=99)
        with pytest.raises(ProfileFormatError, match="version"):
            load_profile(path)

    def test_rejects_non_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("not json {")
        with pytest.raises(ProfileFormatError, match="not valid JSON"):
            load_profile(path)

    def test_rejects_empty_layer_list(self, tmp_path):
        with pytest.raises(ProfileFormatError, match="non-empty"):
            load_profile(write_profile(tmp_path, []))


class TestNormalize:
    def chain3(self):
        return [
            RawLayerProfile(
                name="a", trainable_params=100, successors=(RawEdge(to="b"),)
            ),
            RawLayerProfile(
                name="b", trainable_params=300, successors=(RawEdge(to="c"),)
            ),
            RawLayerProfile(name="c", trainable_params=600),
        ]

    def test_costs_divide_by_the_largest_device_capacity(self):
        model, chain, factors = normalize(
            self.chain3(), [(300.0, 500.0), (600.0, 1000.0)], [2.0e6]
        )
        assert factors.cpu_factor == 600.0
        assert factors.mem_factor == 1000.0
        assert factors.bandwidth_factor == 2.0e6
        assert list(model.cpu_costs()) == [100 / 600, 300 / 600, 600 / 600]
        assert list(model.mem_costs()) == [0.1, 0.3, 0.6]

    def test_single_device_normalizes_itself_to_one(self):
        model, chain, factors = normalize(self.chain3(), [(750.0, 2000.0)], [])
        assert chain.devices[0].cpu_capacity == 1.0
        assert chain.devices[0].mem_capacity == 1.0
        assert factors.bandwidth_factor == 1.0
        assert chain.link_rate == ()

    def test_capacities_and_rates_land_in_unit_range(self):
        _, chain, _ = normalize(
            self.chain3(),
            [(100.0, 400.0), (300.0, 800.0), (600.0, 1600.0)],
            [5.0e6, 1.0e7],
        )
        for device in chain.devices:
            assert 0.0 < device.cpu_capacity <= 1.0
            assert 0.0 < device.mem_capacity <= 1.0
        assert chain.link_rate == (0.5, 1.0)
        assert max(d.cpu_capacity for d in chain.devices) == 1.0
        assert max(d.mem_capacity for d in chain.devices) == 1.0

    def test_derive_edges_carry_the_normalized_source_footprint(self):
        model, _, _ = normalize(self.chain3(), [(600.0, 1000.0)], [])
        assert model.traffic[0][1] == model.layers[0].mem_cost
        assert model.traffic[1][2] == model.layers[1].mem_cost

    def test_explicit_bits_divide_by_the_memory_factor(self):
        raw = [
            RawLayerProfile(
                name="a", trainable_params=100, successors=(RawEdge(to="b", bits=250.0),)
            ),
            RawLayerProfile(name="b", trainable_params=300),
        ]
        model, _, _ = normalize(raw, [(600.0, 1000.0)], [])
        assert model.traffic[0][1] == 0.25

    def test_normalized_model_validates(self):
        model, _, _ = normalize(
            self.chain3(), [(300.0, 500.0), (600.0, 1000.0)], [1.0e6]
        )
        assert validate_model(model).ok

    def test_denormalization_reproduces_the_raw_values(self):
        raw = self.chain3()
        capacities = [(313.0, 517.0), (601.0, 997.0)]
        rates = [3.3e6]
        model, chain, factors = normalize(raw, capacities, rates)
        for layer, source in zip(model.layers, raw):
            assert layer.cpu_cost * factors.cpu_factor == pytest.approx(
                source.trainable_params, rel=1e-12
            )
            assert layer.mem_cost * factors.mem_factor == pytest.approx(
                source.trainable_params, rel=1e-12
            )
        for device, (cpu, mem) in zip(chain.devices, capacities):
            assert device.cpu_capacity * factors.cpu_factor == pytest.approx(cpu, rel=1e-12)
            assert device.mem_capacity * factors.mem_factor == pytest.approx(mem, rel=1e-12)
        for rate, source in zip(chain.link_rate, rates):
            assert rate * factors.bandwidth_factor == pytest.approx(source, rel=1e-12)

    def test_seconds_per_cost_unit(self):
        factors = NormalizationFactors(
            cpu_factor=10.0, mem_factor=4.0e6, bandwidth_factor=2.0e6
        )
        assert factors.seconds_per_cost_unit() == 2.0

    def test_rejects_zero_maxima(self):
        with pytest.raises(ValueError, match="must be > 0"):
            normalize(self.chain3(), [(0.0, 0.0)], [])

    def test_rejects_mismatched_link_count(self):
        with pytest.raises(ValueError, match="link rates"):
            normalize(self.chain3(), [(1.0, 1.0), (2.0, 2.0)], [])

    def test_rejects_empty_inputs(self):
        with pytest.raises(ValueError, match="at least one layer"):
            normalize([], [(1.0, 1.0)], [])
        with pytest.raises(ValueError, match="at least one device"):
            normalize(self.chain3(), [], [])

    @pytest.mark.parametrize("field", ["cpu_factor", "mem_factor", "bandwidth_factor"])
    def test_factors_must_be_positive(self, field):
        values = {"cpu_factor": 1.0, "mem_factor": 1.0, "bandwidth_factor": 1.0}
        values[field] = 0.0
        with pytest.raises(ValueError):
            NormalizationFactors(**values)


class TestCanonicalFiles:
    def test_model_round_trip_is_bit_identical(self, tmp_path):
        model = generate_random_model(12, 0.5, iteration_rng(21, 0))
        first = tmp_path / "model.json"
        second = tmp_path / "model2.json"
        save_model(model, first)
        loaded = load_model(first)
        assert loaded == model
        save_model(loaded, second)
        assert first.read_bytes() == second.read_bytes()

    def test_chain_round_trip_is_bit_identical(self, tmp_path):
        model = generate_random_model(9, 0.25, iteration_rng(21, 1))
        chain = generate_device_chain(4, model)
        first = tmp_path / "chain.json"
        second = tmp_path / "chain2.json"
        save_chain(chain, first)
        loaded = load_chain(first)
        assert loaded == chain
        save_chain(loaded, second)
        assert first.read_bytes() == second.read_bytes()

    def test_layer_names_survive_the_round_trip(self, tmp_path):
        raw = [
            RawLayerProfile(name="stem", trainable_params=50, successors=(RawEdge("head"),)),
            RawLayerProfile(name="head", trainable_params=70),
        ]
        model, _, _ = normalize(raw, [(70.0, 70.0)], [])
        path = tmp_path / "named.json"
        save_model(model, path)
        assert [layer.name for layer in load_model(path).layers] == ["stem", "head"]

    def test_full_pipeline_round_trip(self, tmp_path):
        profile_path = write_profile(tmp_path, linear_layers([100, 300, 600]))
        raw = load_profile(profile_path)
        model, chain, _ = normalize(raw, [(300.0, 500.0), (600.0, 1000.0)], [1.0e7])
        model_path = tmp_path / "model.json"
        chain_path = tmp_path / "chain.json"
        save_model(model, model_path)
        save_chain(chain, chain_path)
        assert load_model(model_path) == model
        assert load_chain(chain_path) == chain

    def test_load_model_rejects_backward_edges(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "version": 1,
                    "layers": [
                        {"name": None, "cpu_cost": 0.5, "mem_cost": 0.5},
                        {"name": None, "cpu_cost": 0.5, "mem_cost": 0.5},
                    ],
                    "edges": [{"from": 2, "to": 1, "bits": 0.5}],
                }
            )
        )
        with pytest.raises(ProfileFormatError, match="backward edge"):
            load_model(path)

    def test_load_model_rejects_out_of_range_edges(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "version": 1,
                    "layers": [{"name": None, "cpu_cost": 0.5, "mem_cost": 0.5}],
                    "edges": [{"from": 1, "to": 5, "bits": 0.5}],
                }
            )
        )
        with pytest.raises(ProfileFormatError, match="outside layer range"):
            load_model(path)

    def test_load_model_rejects_duplicate_edges(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "version": 1,
                    "layers": [
                        {"name": None, "cpu_cost": 0.5, "mem_cost": 0.5},
                        {"name": None, "cpu_cost": 0.5, "mem_cost": 0.5},
                    ],
                    "edges": [
                        {"from": 1, "to": 2, "bits": 0.5},
                        {"from": 1, "to": 2, "bits": 0.25},
                    ],
                }
            )
        )
        with pytest.raises(ProfileFormatError, match="duplicate edge"):
            load_model(path)

    def test_load_model_rejects_wrong_version(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"version": 2, "layers": [], "edges": []}))
        with pytest.raises(ProfileFormatError, match="version"):
            load_model(path)

    def test_load_chain_rejects_structural_problems(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"devices": [], "links": []}))
        with pytest.raises(ProfileFormatError, match="non-empty"):
            load_chain(path)
        path.write_text(
            json.dumps(
                {
                    "devices": [
                        {"cpu_capacity": 1.0, "mem_capacity": 1.0},
                        {"cpu_capacity": 1.0, "mem_capacity": 1.0},
                    ],
                    "links": [{"rate": -1.0}],
                }
            )
        )
        with pytest.raises(ProfileFormatError, match="rate"):
            load_chain(path)
        path.write_text(
            json.dumps(
                {
                    "devices": [{"cpu_capacity": 1.0, "mem_capacity": 1.0}],
                    "links": [{"rate": 0.5}],
                }
            )
        )
        with pytest.raises(ProfileFormatError, match="links"):
            load_chain(path)


def test_checkpoint_conversion_is_explicitly_out_of_scope(tmp_path):
    with pytest.raises(NotImplementedError, match="raw profile"):
        convert_framework_checkpoint(tmp_path / "weights.bin")
