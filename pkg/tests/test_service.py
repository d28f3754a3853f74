"""Endpoint contracts of the HTTP layer (exercised in-process over ASGI)."""

import asyncio

import httpx
import pytest

from plateball.service import app, parse_dims


def call(method: str, path: str, **kwargs) -> httpx.Response:
    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://test") as c:
            return await getattr(c, method)(path, **kwargs)

    return asyncio.run(go())


def test_parse_dims_forms():
    assert parse_dims("4..9") == (4, 5, 6, 7, 8, 9)
    assert parse_dims("4,6,8") == (4, 6, 8)
    assert parse_dims("5") == (5,)
    for bad in ("", "x", "9..4", "4..x"):
        with pytest.raises(ValueError):
            parse_dims(bad)


def test_health():
    r = call("get", "/health")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok" and body["version"]


def test_constants_payload_shape():
    r = call("get", "/constants", params={"dims": "4,5"})
    assert r.status_code == 200
    entries = r.json()["entries"]
    assert [e["dimension"] for e in entries] == [4, 5]
    e = entries[0]
    for name in ("j1", "j2", "k", "aI", "aS", "necessary_condition"):
        assert e[name]["lo"] <= e[name]["hi"]
    assert e["necessary_condition"]["lo"] > 1


def test_constants_bad_dims_is_usage_error():
    r = call("get", "/constants", params={"dims": "florp"})
    assert r.status_code == 400
    assert r.json()["kind"] == "usage"


@pytest.mark.parametrize("kind", ["table1", "table2", "table3"])
def test_tables_endpoint(kind):
    r = call("get", f"/tables/{kind}", params={"dims": "4..6"})
    assert r.status_code == 200
    body = r.json()
    assert body["kind"] == kind
    assert len(body["rows"]) == 3
    for row in body["rows"]:
        assert set(body["columns"]) == set(row["values"])


def test_tables_unknown_kind():
    assert call("get", "/tables/table7").status_code == 400


def test_certify_roundtrip_and_schema():
    r = call("post", "/certify", json={"dims": [4]})
    assert r.status_code == 200
    body = r.json()
    assert body["all_passed"] is True
    cert = body["certificates"][0]
    assert set(cert) == {
        "dimension",
        "constants",
        "x_seq",
        "y_seq",
        "margins",
        "tolerances",
        "verdict",
        "tool_version",
    }
    assert set(cert["constants"]) == {"j1", "j2", "k", "aI", "aS"}
    assert cert["x_seq"][0] == 0.0 and cert["y_seq"][-1] == 1.0


def test_certify_low_dimension_rejected():
    r = call("post", "/certify", json={"dims": [3]})
    assert r.status_code == 400


def test_mu_curve_passes_and_validates():
    r = call("post", "/curves/mu", json={"dimension": 4, "samples": 11})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] is True
    assert len(body["a"]) == 11 and body["a"][0] == 0.0 and body["a"][-1] == 1.0
    assert all(lo <= hi for lo, hi in zip(body["mu_lo"], body["mu_hi"]))
    # pydantic range check -> 422
    assert call("post", "/curves/mu", json={"dimension": 4, "samples": 0}).status_code == 422


def test_f_curve_marks_poles_as_null():
    # push the grid across j_nu so one sample lands inside the pole window
    r = call("post", "/curves/f", json={"dimension": 4, "samples": 8})
    assert r.status_code == 200
    body = r.json()
    assert len(body["r"]) == 8
    # r_max beyond the s_nu domain is a usage failure
    r = call("post", "/curves/f", json={"dimension": 4, "samples": 8, "r_max": 30.0})
    assert r.status_code == 400


def test_compare_annulus_endpoint():
    r = call("post", "/compare-annulus", json={"dimension": 4, "r_in": 0.5})
    body = r.json()
    assert r.status_code == 200
    assert body["passed"] is True and body["max_violation"] <= 1e-6
    r = call("post", "/compare-annulus", json={"dimension": 4, "r_in": 1.5})
    assert r.status_code == 400


def test_prop_suite_deterministic():
    req = {"seed": 42, "count": 25}
    a = call("post", "/prop-suite", json=req).json()
    b = call("post", "/prop-suite", json=req).json()
    assert a == b
    assert a["passed"] is True and a["worst_discrepancy"] == 0.0
