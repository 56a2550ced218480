import json
import math

import pytest

from cubeplan.model import (DesignError, Strategy, design_to_dict, dump_design,
                            generate_candidates, load_design, only_2d, with_frequency,
                            with_layer_limit)


def _doc(blocks, layer_limit=1, whitespace=0.10, **cfg):
    return {"blocks": blocks, "nets": [], "loops": [],
            "config": {"layer_limit": layer_limit, "whitespace_fraction": whitespace, **cfg}}


def _block(bid, *cands):
    return {"id": bid, "candidates": [dict(c) for c in cands]}


def test_zero_whitespace_keeps_dimensions():
    d = load_design(_doc([_block("a", {"width": 3.0, "height": 7.0})], whitespace=0.0))
    c = d.blocks[0].candidates[0]
    assert (c.width, c.height) == (3.0, 7.0)


def test_whitespace_inflates_each_side_by_sqrt():
    d = load_design(_doc([_block("a", {"width": 1000, "height": 1000})]))
    c = d.blocks[0].candidates[0]
    assert c.width == pytest.approx(1048.81, abs=0.005)
    assert c.height == pytest.approx(1048.81, abs=0.005)
    assert c.width * c.height >= 1000 * 1000 * 1.1 * (1 - 1e-6)


def test_candidate_taller_than_layer_limit_is_rejected():
    doc = _doc([_block("dcache", {"width": 10, "height": 10},
                       {"width": 5, "height": 5, "layers": 3})], layer_limit=2)
    with pytest.raises(DesignError, match=r"candidates\[1\].*dcache.*layers=3"):
        load_design(doc)


@pytest.mark.parametrize("doc, msg", [
    ({"blocks": []}, "config"),
    (_doc([]), "no blocks"),
    (_doc([_block("a", {"width": 1, "height": 1}), _block("a", {"width": 1, "height": 1})]), "duplicate"),
    (_doc([_block("a", {"width": 0, "height": 1})]), "positive"),
    (_doc([{"id": "a", "candidates": []}]), "empty"),
    ({**_doc([_block("a", {"width": 1, "height": 1})]),
      "nets": [{"pins": ["a", "zz"]}]}, "unknown block"),
    ({**_doc([_block("a", {"width": 1, "height": 1})]),
      "loops": [{"path": ["a"], "base_cycles": 1, "sensitivity": 1.0}]}, "sensitivity"),
    (_doc([_block("a", {"width": 1, "height": 1})], target_cycle_time=250, clock_overhead=300), "overhead"),
    (_doc([_block("a", {"width": 1, "height": 1})], frequency=3.0), "inconsistent"),
    (_doc([_block("a", {"width": 1, "height": 1})], weights=[0, 0, 0, 0]), "weights"),
])
def test_validation_errors(doc, msg):
    with pytest.raises(DesignError, match=msg):
        load_design(doc)


def test_parse_error_is_design_error():
    with pytest.raises(DesignError, match="parse"):
        load_design("{not json")


def test_round_trip_is_exact(driver):
    again = load_design(json.loads(dump_design(driver)))
    assert again == driver
    assert design_to_dict(again) == design_to_dict(driver)


def test_generator_port_partition_quarters_area():
    cands = generate_candidates({"width": 100, "height": 100, "ports": 2}, 2)
    pp = [c for c in cands if c.strategy == Strategy.PORT_PARTITION]
    assert len(pp) == 1
    assert (pp[0].width, pp[0].height, pp[0].layers) == (50, 50, 2)


def test_generator_k1_is_identity():
    base = {"width": 100, "height": 80, "delay": 300, "power": 20, "ports": 4}
    (c,) = generate_candidates(base, 1)
    assert (c.width, c.height, c.layers, c.delay, c.power) == (100, 80, 1, 300, 20)
    assert c.strategy == Strategy.BASE_2D


def test_generator_default_delay_factors():
    cands = generate_candidates({"width": 10, "height": 10, "delay": 1000, "ports": 2}, 2)
    by = {c.strategy: c for c in cands}
    assert by[Strategy.WORDLINE_FOLD].delay == pytest.approx(700)
    assert by[Strategy.PORT_PARTITION].delay == pytest.approx(770)


def test_generator_properties():
    for ports in range(1, 5):
        for k in range(1, 5):
            base = {"width": 40, "height": 60, "delay": 100, "power": 10, "ports": ports}
            cands = generate_candidates(base, k, via_count=100)
            assert all(c.layers <= ports for c in cands if c.strategy == Strategy.PORT_PARTITION)
            for c in cands:
                if c.layers == 1:
                    assert (c.width, c.height, c.delay, c.power) == (40, 60, 100, 10)


def test_generator_via_overhead_adds_area():
    plain = generate_candidates({"width": 100, "height": 100, "ports": 2}, 2)[-1]
    vias = generate_candidates({"width": 100, "height": 100, "ports": 2}, 2, via_count=100)[-1]
    assert vias.width * vias.height == pytest.approx(plain.width * plain.height + 100 * 0.49)
    assert math.isclose(vias.width / vias.height, 1.0)


def test_generate_block_in_design_file():
    doc = _doc([{"id": "rf", "ports": 2,
                 "generate": {"base": {"width": 100, "height": 100, "delay": 1000}, "max_layers": 2}}],
               layer_limit=2, whitespace=0.0)
    d = load_design(doc)
    assert [c.strategy for c in d.blocks[0].candidates] == [
        Strategy.BASE_2D, Strategy.WORDLINE_FOLD, Strategy.PORT_PARTITION]


def test_derived_designs(driver):
    one = with_layer_limit(driver, 1)
    assert all(c.layers == 1 for b in one.blocks for c in b.candidates)
    assert one.config.layer_limit == 1
    flat = only_2d(driver)
    assert flat.config.layer_limit == driver.config.layer_limit
    assert all(c.layers == 1 for b in flat.blocks for c in b.candidates)
    fast = with_frequency(driver, 5.0)
    assert fast.config.target_cycle_time == pytest.approx(200.0)
    assert fast.config.frequency_ghz == 5.0


def test_four_ghz_useful_time(driver):
    cfg = with_frequency(driver, 4.0).config
    assert cfg.useful_time == 204.0
