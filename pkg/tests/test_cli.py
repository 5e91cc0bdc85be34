import json
from fractions import Fraction

import pytest

from bilinear_games import blotto
from bilinear_games.cli import (
    EXIT_INPUT,
    EXIT_LIMIT,
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_VERIFY,
    main,
    parse_spec,
)

BLOTTO = {"type": "blotto", "a": 2, "b": 1, "k": 2, "payoffs": "sign"}
SIGN = [["0", "-1"], ["1", "0"], ["1", "1"]]

SPECS = {
    "blotto": BLOTTO,
    "blotto_tables": {"type": "blotto", "a": 2, "b": 1, "k": 2, "payoffs": [SIGN, SIGN]},
    "colonel_lotto": {"type": "colonel_lotto", "a": 4, "b": 3, "k": 2, "payoff": "sign"},
    "finite_lotto": {"type": "finite_general_lotto", "a": 1, "b": 2, "support_A": [0, 1, 2, 3],
                     "support_B": [0, 1, 2, 3, 4], "payoff": "sign"},
    "finite_lotto_table": {"type": "finite_general_lotto", "a": 1, "b": 1, "support_A": [0, 2],
                           "support_B": [0, 1, 2], "payoff": [["0", "-1", "-1"], ["1", "1/2", "0"]]},
    "general_lotto": {"type": "general_lotto", "a": 0, "b": 1, "payoff": "sign"},
    "general_lotto_fn": {"type": "general_lotto", "a": 1, "b": 1,
                         "payoff": {"threshold": 2, "values": ["-1", "-1/2", "0", "1/2", "1"]}},
    "ranking": {"type": "ranking_duel", "probs": ["1/2", "1/2"]},
    "ranking3": {"type": "ranking_duel", "probs": ["1/3", "1/3", "1/3"]},
    "bst": {"type": "bst_duel", "probs": ["1/2", "1/3", "1/6"]},
    "matching": {"type": "matching_duel", "nodes": [1, 2, 3, 4],
                 "edges": [[1, 2, 5], [3, 4, 5], [1, 3, 1], [2, 4, 1], [1, 4, 0], [2, 3, 0]],
                 "probs": ["1/4", "1/4", "1/4", "1/4"]},
}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSolve:
    def test_blotto_value(self, tmp_path, capsys):
        code, out, _ = run(capsys, "solve", write(tmp_path, "s.json", BLOTTO))
        report = json.loads(out)
        assert code == EXIT_OK and report["value"] == "1/1"
        assert report["certificate"] == {"gap_A": "0/1", "gap_B": "0/1"}
        assert "wall_time" not in report["stats"]

    def test_ranking_value(self, tmp_path, capsys):
        _, out, _ = run(capsys, "solve", write(tmp_path, "s.json", SPECS["ranking"]))
        assert json.loads(out)["value"] == "0/1"

    def test_forced_lotto(self, tmp_path, capsys):
        _, out, _ = run(capsys, "solve", write(tmp_path, "s.json", SPECS["general_lotto"]))
        assert json.loads(out)["value"] == "-1/1"

    def test_byte_stable(self, tmp_path, capsys):
        spec = write(tmp_path, "s.json", SPECS["colonel_lotto"])
        first = run(capsys, "solve", spec)[1]
        assert run(capsys, "solve", spec)[1] == first

    def test_timing_flag(self, tmp_path, capsys):
        _, out, _ = run(capsys, "solve", write(tmp_path, "s.json", BLOTTO), "--timing")
        assert "wall_time" in json.loads(out)["stats"]

    def test_probabilities_sum_to_one(self, tmp_path, capsys):
        _, out, _ = run(capsys, "solve", write(tmp_path, "s.json", SPECS["bst"]))
        report = json.loads(out)
        for side in ("strategy_A", "strategy_B"):
            assert sum(Fraction(e["probability"]) for e in report[side]) == 1


class TestRoundTrip:
    @pytest.mark.parametrize("name", sorted(SPECS))
    def test_solve_then_verify(self, name, tmp_path, capsys):
        spec = write(tmp_path, "s.json", SPECS[name])
        out = str(tmp_path / "r.json")
        assert main(["solve", spec, "--out", out]) == EXIT_OK
        assert main(["verify", spec, out]) == EXIT_OK

    @pytest.mark.parametrize("name", sorted(SPECS))
    def test_bruteforce_agrees(self, name, tmp_path, capsys):
        spec = write(tmp_path, "s.json", SPECS[name])
        solved = json.loads(run(capsys, "solve", spec)[1])
        brute = json.loads(run(capsys, "bruteforce", spec, "--cap", "10000")[1])
        assert solved["value"] == brute["value"]
        out = str(tmp_path / "b.json")
        assert main(["bruteforce", spec, "--out", out, "--cap", "10000"]) == EXIT_OK
        assert main(["verify", spec, out]) == EXIT_OK


class TestVerify:
    def test_corrupted_probability(self, tmp_path, capsys):
        spec = write(tmp_path, "s.json", SPECS["bst"])
        report = json.loads(run(capsys, "solve", spec)[1])
        report["strategy_A"][0]["probability"] = "1/7" if report["strategy_A"][0]["probability"] != "1/7" else "1/8"
        code, _, err = run(capsys, "verify", spec, write(tmp_path, "r.json", report))
        assert code == EXIT_VERIFY and "sum" in err

    def test_uniform_blotto_is_not_optimal(self, tmp_path, capsys):
        spec = write(tmp_path, "s.json", BLOTTO)
        third = "1/3"
        report = {
            "game": "blotto", "value": "2/3",
            "strategy_A": [{"strategy": list(x), "probability": third} for x in blotto.partitions(2, 2)],
            "strategy_B": [{"strategy": [0, 1], "probability": "1/1"}],
            "certificate": {"gap_A": "0/1", "gap_B": "0/1"},
        }
        code, _, err = run(capsys, "verify", spec, write(tmp_path, "r.json", report))
        assert code == EXIT_VERIFY and "A can gain" in err

    def test_wrong_game(self, tmp_path, capsys):
        spec = write(tmp_path, "s.json", BLOTTO)
        report = json.loads(run(capsys, "solve", write(tmp_path, "o.json", SPECS["ranking"]))[1])
        assert run(capsys, "verify", spec, write(tmp_path, "r.json", report))[0] == EXIT_INPUT

    def test_invalid_strategy(self, tmp_path, capsys):
        spec = write(tmp_path, "s.json", BLOTTO)
        report = json.loads(run(capsys, "solve", spec)[1])
        report["strategy_A"][0]["strategy"] = [3, 0]
        assert run(capsys, "verify", spec, write(tmp_path, "r.json", report))[0] == EXIT_INPUT


class TestErrors:
    def test_wrong_shape(self, tmp_path, capsys):
        doc = dict(BLOTTO, payoffs=[SIGN, SIGN[:2]])
        code, _, err = run(capsys, "solve", write(tmp_path, "s.json", doc))
        assert code == EXIT_INPUT and "payoff" in err

    def test_zero_threshold(self, tmp_path, capsys):
        doc = {"type": "general_lotto", "a": 0, "b": 1, "payoff": {"threshold": 0, "values": ["0"]}}
        assert run(capsys, "solve", write(tmp_path, "s.json", doc))[0] == EXIT_INPUT

    def test_unknown_field(self, tmp_path, capsys):
        code, _, err = run(capsys, "solve", write(tmp_path, "s.json", dict(BLOTTO, colour="red")))
        assert code == EXIT_INPUT and "colour" in err

    def test_float_rejected(self, tmp_path, capsys):
        doc = dict(SPECS["ranking"], probs=[0.5, 0.5])
        assert run(capsys, "solve", write(tmp_path, "s.json", doc))[0] == EXIT_INPUT

    def test_missing_file(self, tmp_path, capsys):
        assert run(capsys, "solve", str(tmp_path / "nope.json"))[0] == EXIT_INPUT

    def test_not_json(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        path.write_text("{")
        assert run(capsys, "solve", str(path))[0] == EXIT_INPUT

    def test_infeasible_is_solver_error(self, tmp_path, capsys):
        doc = dict(SPECS["finite_lotto"], a=7)
        out = tmp_path / "r.json"
        code = main(["solve", write(tmp_path, "s.json", doc), "--out", str(out)])
        assert code == EXIT_SOLVER
        assert json.loads(out.read_text())["error"]["category"] == "solver_error"

    def test_bruteforce_cap(self, tmp_path, capsys):
        doc = {"type": "blotto", "a": 20, "b": 20, "k": 3, "payoffs": "sign"}
        assert run(capsys, "bruteforce", write(tmp_path, "s.json", doc))[0] == EXIT_LIMIT

    def test_bruteforce_ranking(self, tmp_path, capsys):
        _, out, _ = run(capsys, "bruteforce", write(tmp_path, "s.json", SPECS["ranking3"]))
        assert json.loads(out)["value"] == "0/1"


class TestOracleProbe:
    def test_blotto(self, tmp_path, capsys):
        spec = write(tmp_path, "s.json", dict(BLOTTO, b=2))
        costs = write(tmp_path, "c.json", [0, 5, 1, 2, 0, 4])
        code, out, _ = run(capsys, "oracle", spec, "--costs", costs, "--player", "B")
        probe = json.loads(out)
        assert code == EXIT_OK and probe["strategy"] == [2, 0] and probe["objective"] == "3/1"

    def test_wrong_length(self, tmp_path, capsys):
        spec = write(tmp_path, "s.json", BLOTTO)
        costs = write(tmp_path, "c.json", [0, 1])
        assert run(capsys, "oracle", spec, "--costs", costs)[0] == EXIT_INPUT


def test_parse_spec_round_trip(tmp_path):
    case = parse_spec(write(tmp_path, "s.json", SPECS["blotto_tables"]))
    assert case.kind == "blotto" and case.game.oracle_A.dimension == 6
