"""Smoke tests of the Python bindings."""

import math

import pytest

import flcarbon


def test_formulas():
    assert math.isclose(flcarbon.compute_energy_kwh(2, 145.0, 0.5, 2.0), 0.29, rel_tol=1e-12)
    assert math.isclose(flcarbon.storage_energy_kwh(1.0, 1.0, "SSD"), 0.0012, rel_tol=1e-12)
    assert math.isclose(flcarbon.memory_energy_kwh(16.0, 2.0), 0.012544, rel_tol=1e-12)
    assert math.isclose(flcarbon.network_energy_kwh(10.0, 0.06), 0.6, rel_tol=1e-12)
    assert math.isclose(flcarbon.emissions_gco2e(0.3, 1.185, 400.0), 142.2, rel_tol=1e-12)
    assert math.isclose(flcarbon.sci_rate(2.0, 50.0, embodied_g=10.0, functional_units=2.0), 55.0, rel_tol=1e-12)


def test_validation_errors_are_value_errors():
    with pytest.raises(flcarbon.ValidationError, match="load_fraction"):
        flcarbon.compute_energy_kwh(1, 300.0, 1.5, 1.0)
    with pytest.raises(ValueError):
        flcarbon.emissions_gco2e(1.0, 0.5, 100.0)
    with pytest.raises(ValueError):
        flcarbon.bundled_scenario("huge")


def test_default_factors():
    f = flcarbon.default_factors()
    assert f["pue_by_provider"] == {"AWS": 1.135, "Azure": 1.185, "GCP": 1.1}
    assert f["redundancy_copies"] == 3


def test_tiers():
    assert flcarbon.cluster_tier_for(1.2) == ("small", 1)
    assert flcarbon.cluster_tier_for(12.0) == ("medium", 2)
    assert flcarbon.cluster_tier_for(120.0) == ("large", 4)


@pytest.mark.parametrize("scale", ["small", "medium", "large"])
def test_compare_orderings(scale):
    c = flcarbon.compare(flcarbon.bundled_scenario(scale))["comparison"]
    fl, cl = c["federated"], c["centralized"]
    assert cl["c_total_g"] > fl["c_total_g"]
    if scale == "large":
        assert cl["c_train_g"] > fl["c_train_g"]
    else:
        assert fl["c_train_g"] >= cl["c_train_g"]
    assert fl["wall_clock_hours"] < cl["wall_clock_hours"]


def test_compare_matches_cli_and_is_deterministic():
    path = flcarbon.bundled_scenario("medium")
    assert flcarbon.compare(path) == flcarbon.compare(path)
    code, out, _ = flcarbon.run_cli("compare", "--scenario", path, "--format", "structured")
    assert code == 0
    import json

    assert json.loads(out)["comparison"] == flcarbon.compare(path)["comparison"]


def test_estimate_and_resize():
    small = flcarbon.bundled_scenario("small")
    doc = flcarbon.estimate(small, mode="centralized", functional_units=10.0)
    assert doc["report"]["mode"] == "centralized"
    assert math.isclose(doc["report"]["sci_g_per_unit"], doc["report"]["c_total_g"] / 10.0)
    resized = flcarbon.compare(small, total_size_gb=120.0)
    direct = flcarbon.compare(flcarbon.bundled_scenario("large"))
    assert resized["comparison"] == direct["comparison"]


def test_trace_byte_count():
    events = flcarbon.trace(flcarbon.bundled_scenario("small"), "federated")
    total = sum(e["payload"]["bytes"] for e in events if e["kind"] == "transfer")
    assert total == 10 * (2 * 3 + 2) * 50_000_000 * 4


def test_registry_workflow(tmp_path):
    log = str(tmp_path / "reg.log")
    reg = flcarbon.Registry(log)
    assert reg.submit("churn prediction for airline bookings", owner="alice")["id"] == 1
    assert reg.approve(1, 1.2)["assigned_tier"] == "small"
    reg.submit("airline booking churn prediction model", owner="bob")
    matches = reg.check(2)
    assert matches and matches[0][0] == 1 and matches[0][1] >= 0.8
    request, owner = reg.mark_duplicate(2, 1)
    assert request["state"] == "duplicate" and owner == "alice"
    with pytest.raises(flcarbon.RegistryError):
        reg.approve(1, 1.2)
    assert flcarbon.Registry(log) == reg
    assert flcarbon.Registry.replay(reg.log_text) == reg


def test_similarity():
    assert flcarbon.text_similarity("fraud model", "fraud model") == 1.0
    assert flcarbon.text_similarity("fraud model", "weather radar") == 0.0


def test_imported_build_is_expected_one():
    import os

    inplace = os.environ.get("FLCARBON_INPLACE_PKG")
    if inplace:
        assert flcarbon._core.__file__.startswith(inplace)
