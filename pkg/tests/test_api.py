import pytest
from httpx import ASGITransport, AsyncClient

from app.main import app

HEISENBERG = {"family": "unimodular", "c1": 1, "c2": 0, "c3": 0}


@pytest.fixture
async def client():
    async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as c:
        yield c


async def test_root(client):
    response = await client.get("/")
    assert response.status_code == 200
    assert response.json()["message"] == "Magnetic Fields API"


async def test_health(client):
    response = await client.get("/health")
    assert response.json() == {"status": "healthy"}


async def test_describe(client):
    response = await client.get("/api/describe", params={"unimodular": "1,0,0"})
    assert response.status_code == 200
    body = response.json()
    assert body["mode"] == "describe"
    assert body["description"]["signature"] == "Heisenberg"


async def test_describe_nonunimodular(client):
    response = await client.get("/api/describe", params={"nonunimodular": "0,0"})
    assert response.status_code == 200
    assert response.json()["description"]["milnor_invariant"] == 1.0


@pytest.mark.parametrize("params", [
    {},
    {"unimodular": "1,2"},
    {"unimodular": "1,0,0", "nonunimodular": "0,0"},
    {"nonunimodular": "-1,0"},
])
async def test_describe_rejects_bad_structures(client, params):
    response = await client.get("/api/describe", params=params)
    assert response.status_code == 400


async def test_check(client):
    payload = {"structure": HEISENBERG, "x": {"x1": 0.6, "x2": 0.8, "x3": 0.0}, "q": -0.25}
    response = await client.post("/api/check", json=payload)
    assert response.status_code == 200
    assert response.json()["check"]["magnetic"] is True


async def test_check_solves_for_the_charge(client):
    payload = {"structure": HEISENBERG, "x": {"x1": 0.6, "x2": 0.0, "x3": 0.8}}
    response = await client.post("/api/check", json=payload)
    solved = response.json()["check"]["solved_q"]
    assert solved["kind"] == "fixed"
    assert solved["value"] == pytest.approx(-0.25)


async def test_check_rejects_non_unit_fields(client):
    payload = {"structure": HEISENBERG, "x": {"x1": 1.0, "x2": 1.0, "x3": 0.0}}
    response = await client.post("/api/check", json=payload)
    assert response.status_code == 422


async def test_solve_symbolic(client):
    payload = {"structure": {"family": "nonunimodular", "alpha": 1, "beta": 0}}
    response = await client.post("/api/solve", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["solution_set"]["case_label"] == "D=0,alpha=1,beta=0"
    assert len(body["solution_set"]["components"]) == 2
    assert body["scan"] is None


async def test_solve_both(client):
    payload = {"structure": HEISENBERG, "mode": "both", "grid_n": 48}
    response = await client.post("/api/solve", json=payload)
    assert response.status_code == 200
    assert response.json()["match"]["matched"] is True


async def test_solve_validates_grid(client):
    payload = {"structure": HEISENBERG, "grid_n": 8}
    response = await client.post("/api/solve", json=payload)
    assert response.status_code == 422
