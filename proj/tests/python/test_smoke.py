"""Smoke tests for the python module: the bindings wrap the same engine the
CLI uses, so these only need to confirm the surface works end to end."""

import json

import dynkin


def two_leaf_game(x0, y0, z0):
    return json.dumps({
        "format_version": 1,
        "mode": "rational",
        "horizon": 1,
        "nodes": [
            {"id": "n0", "time": 0, "x": x0, "y": y0, "z": z0},
            {"id": "n1", "time": 1, "parent": "n0", "probability": "1/2",
             "x": 0, "y": 0, "z": 0},
            {"id": "n2", "time": 1, "parent": "n0", "probability": "1/2",
             "x": 4, "y": 4, "z": 4},
        ],
    })


def test_solve_report_values():
    report = json.loads(dynkin.solve_report(two_leaf_game(1, 5, 3)))
    assert report["nodes"][0]["v"] == 2
    assert report["standard"] is True
    assert report["equilibrium_condition"]["holds_everywhere"] is True


def test_oracle_report_no_value_fixture():
    report = json.loads(dynkin.oracle_report(two_leaf_game(5, 4, 0)))
    start = report["oracle"]["starts"][0]
    assert start["maximin"] == 2
    assert start["minimax"] == 4
    assert start["has_value"] is False
    assert start["certificate"]["verdict"] == "epsilon_only"
    assert report["oracle"]["equivalence"]["agree"] is True


def test_float_game_object():
    game = dynkin.FloatGame(two_leaf_game(1, 5, 3))
    assert game.standard
    assert game.condition_holds()
    assert game.value()[0] == 2.0
    assert game.tau_star()[0] is False
    mm = game.minimax()
    assert mm["has_value"]
    assert mm["maximin"] == 2.0
    nash = game.find_nash()
    assert nash["verdict"] == "nash_exists"
    cert = game.epsilon_certificate(0.5)
    assert cert["applicable"] and cert["certified"]


def test_generate_round_trip_and_determinism():
    games = dynkin.generate_games(seed=11, count=3, mode="standard")
    again = dynkin.generate_games(seed=11, count=3, mode="standard")
    assert games == again
    for text in games:
        report = json.loads(dynkin.solve_report(text))
        assert report["standard"] is True


def test_lattice_report():
    spec = json.dumps({
        "format_version": 1,
        "model": {"kind": "random_walk", "horizon_time": 1.0, "steps": 50},
        "payoffs": {
            "x": {"form": "put", "strike": 1.0, "shift": -0.5},
            "y": {"form": "put", "strike": 1.0, "shift": 0.5},
            "z": {"form": "put", "strike": 1.0},
        },
    })
    report_json, csv = dynkin.lattice_report(spec, epsilons=[0.1], steps=[50])
    report = json.loads(report_json)
    assert report["cells"][0]["certified"] is True
    assert csv.startswith("N,epsilon,value_root")
