"""Smoke test for the kpa extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
Then run:                 python3 -m pytest crates/py/python/smoke_test.py
"""

import json

import kpa

ADMIN = "admin-token"
TENANT = "tenant-token"


def get(plane, path, token=TENANT):
    status, body = plane.request("GET", path, token)
    return status, json.loads(body)


def test_scenario_plane_answers_queries():
    plane = kpa.Plane(fixture="scenario")
    assert plane.latest_tick == 0
    assert plane.tick(2) == 2

    status, summary = get(plane, "/live/network/summary")
    assert status == 200
    assert summary["ue_connected"] == 3

    status, cqi = get(plane, "/live/ue/IMSI_1/attributes/cqi?at=1")
    assert status == 200
    assert cqi["tick"] == 1
    assert 0 <= cqi["value"] <= 15

    status, pos = get(plane, "/live/ue/IMSI_1/attributes/position")
    assert pos["value"] == "***"


def test_auth_and_errors():
    plane = kpa.Plane(fixture="scenario")
    assert plane.request("GET", "/docs")[0] == 401
    assert plane.request("POST", "/sim/tick", TENANT)[0] == 403
    status, err = get(plane, "/live/ue/IMSI_99")
    assert status == 404
    assert err["path"] == "/live/ue/IMSI_99"


def test_catalog_subscription():
    plane = kpa.Plane(fixture="scenario")
    body = json.dumps({"service_id": "yolov8_det", "ue_ids": ["IMSI_1", "IMSI_2", "IMSI_3"]})
    status, text = plane.request("POST", "/catalog/subscriptions", TENANT, body)
    sub = json.loads(text)
    assert status == 201
    assert sub["status"] == "ACTIVE"
    assert sub["endpoint_url"] in sub["integration_snippets"]["IMSI_1"]


def test_simulate_is_deterministic():
    config = json.dumps({"seed": 7, "ue_count": 5})
    a = kpa.simulate(30, config)
    b = kpa.simulate(30, config)
    assert a == b
    events = [json.loads(e) for e in kpa.simulate(3, fixture="scenario")]
    attached = [e["subject"] for e in events if e["type"] == "UE_ATTACHED"]
    assert attached == ["IMSI_1", "IMSI_2", "IMSI_3"]


def test_bad_config_raises():
    try:
        kpa.Plane("{not json")
    except ValueError as e:
        assert "sim_config" in str(e)
    else:
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
