"""Command-line front end.

Game specs and reports are JSON documents.  Every rational is written as a
``"num/den"`` string (integers are also accepted on input), so nothing is
ever rounded on the way in or out.

Exit codes: 0 success, 2 input error, 3 solver error, 4 verification
failure, 5 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Optional

from . import blotto, duels, lotto
from .errors import (
    GameError,
    InfeasibleStrategySpaceError,
    MalformedInputError,
    OracleContractError,
    ResourceLimitError,
)
from .ratlp import matrix_game_solve
from .solver import (
    MAX,
    MIN,
    BilinearGame,
    EquilibriumResult,
    MixedStrategy,
    PureVertex,
    certify,
    dot,
    solve_game,
)

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_VERIFY, EXIT_LIMIT = 0, 2, 3, 4, 5
DEFAULT_CAP = 5000

GAME_FIELDS = {
    "blotto": {"a", "b", "k", "payoffs"},
    "colonel_lotto": {"a", "b", "k", "payoff"},
    "finite_general_lotto": {"a", "b", "support_A", "support_B", "payoff"},
    "general_lotto": {"a", "b", "payoff"},
    "ranking_duel": {"probs"},
    "bst_duel": {"probs"},
    "matching_duel": {"nodes", "edges", "probs"},
}


def fmt(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(v, where: str) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise MalformedInputError(f"{where}: expected an integer or 'num/den' string, got {v!r}")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError):
        raise MalformedInputError(f"{where}: {v!r} is not a rational") from None


def parse_int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise MalformedInputError(f"{where}: expected an integer, got {v!r}")
    return v


def parse_list(v, where: str) -> list:
    if not isinstance(v, list):
        raise MalformedInputError(f"{where}: expected a list")
    return v


def parse_matrix(v, where: str) -> tuple:
    return tuple(
        tuple(parse_rational(x, f"{where}[{i}][{j}]") for j, x in enumerate(parse_list(row, f"{where}[{i}]")))
        for i, row in enumerate(parse_list(v, where))
    )


def parse_distance_fn(v, where: str) -> lotto.BoundedDistanceFn:
    if v == "sign":
        return lotto.BoundedDistanceFn.sign()
    if not isinstance(v, dict) or set(v) != {"threshold", "values"}:
        raise MalformedInputError(f"{where}: expected 'sign' or {{threshold, values}}")
    uT = parse_int(v["threshold"], f"{where}.threshold")
    if uT < 1:
        raise MalformedInputError(f"{where}.threshold must be at least 1")
    values = [parse_rational(x, f"{where}.values[{i}]")
              for i, x in enumerate(parse_list(v["values"], f"{where}.values"))]
    return lotto.BoundedDistanceFn.from_values(values, uT)


def _node(v, where: str):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise MalformedInputError(f"{where}: node labels must be integers or strings")
    return v


@dataclass(frozen=True)
class GameCase:
    """Everything the commands need about one parsed game."""

    kind: str
    game: BilinearGame
    solve: Callable[[], EquilibriumResult]
    encode: Callable[[object], object]
    decode_A: Callable[[object], PureVertex]
    decode_B: Callable[[object], PureVertex]
    pures_A: Callable[[], list]
    pures_B: Callable[[], list]
    count_A: Callable[[], int]
    count_B: Callable[[], int]


def _listify(s):
    return list(s)


def _decoder(to_vertex, check: Callable[[object], object] = None):
    def decode(enc):
        if not isinstance(enc, list):
            raise MalformedInputError(f"strategy {enc!r} is not a list")
        return to_vertex(enc if check is None else check(enc))
    return decode


def _ints(enc):
    return tuple(parse_int(v, "strategy entry") for v in enc)


def build_case(doc: dict) -> GameCase:
    if not isinstance(doc, dict):
        raise MalformedInputError("spec must be a JSON object")
    kind = doc.get("type")
    if kind not in GAME_FIELDS:
        raise MalformedInputError(f"type: unknown game type {kind!r}")
    extra = set(doc) - GAME_FIELDS[kind] - {"type"}
    if extra:
        raise MalformedInputError(f"unknown field(s): {', '.join(sorted(extra))}")
    missing = GAME_FIELDS[kind] - set(doc)
    if missing:
        raise MalformedInputError(f"missing field(s): {', '.join(sorted(missing))}")
    return _BUILDERS[kind](doc)


def _blotto_case(doc) -> GameCase:
    a, b, k = (parse_int(doc[f], f) for f in ("a", "b", "k"))
    if k < 1:
        raise MalformedInputError("k must be at least 1")
    if doc["payoffs"] == "sign":
        spec = blotto.BlottoSpec.with_sign_payoffs(a, b, k)
    else:
        mats = [parse_matrix(m, f"payoffs[{i}]") for i, m in enumerate(parse_list(doc["payoffs"], "payoffs"))]
        spec = blotto.BlottoSpec(a, b, k, tuple(mats))
    game = blotto.blotto_game(spec)

    def vertex(m):
        return lambda x: PureVertex(x, blotto.pure_to_marginal(x, m))

    def check(enc):
        x = _ints(enc)
        if len(x) != k:
            raise MalformedInputError(f"partition {x} does not have {k} parts")
        return x

    return GameCase(
        "blotto", game, lambda: solve_game(game), _listify,
        _decoder(vertex(a), check), _decoder(vertex(b), check),
        lambda: [vertex(a)(x) for x in blotto.partitions(a, k)],
        lambda: [vertex(b)(x) for x in blotto.partitions(b, k)],
        lambda: comb(a + k - 1, k - 1), lambda: comb(b + k - 1, k - 1),
    )


def _colonel_lotto_case(doc) -> GameCase:
    a, b, k = (parse_int(doc[f], f) for f in ("a", "b", "k"))
    if k < 1:
        raise MalformedInputError("k must be at least 1")
    if doc["payoff"] == "sign":
        spec = blotto.LottoSpec.with_sign_payoff(a, b, k)
    else:
        spec = blotto.LottoSpec(a, b, k, parse_matrix(doc["payoff"], "payoff"))
    game = blotto.colonel_lotto_game(spec)

    def vertex(m):
        def inner(enc):
            corps = tuple(sorted(_ints(enc), reverse=True))
            return PureVertex(corps, blotto.lotto_marginal(corps, m, k))
        return inner

    return GameCase(
        "colonel_lotto", game, lambda: solve_game(game), _listify,
        _decoder(vertex(a)), _decoder(vertex(b)),
        lambda: [vertex(a)(list(x)) for x in blotto.corps_splits(a, k)],
        lambda: [vertex(b)(list(x)) for x in blotto.corps_splits(b, k)],
        lambda: sum(1 for _ in blotto.corps_splits(a, k)),
        lambda: sum(1 for _ in blotto.corps_splits(b, k)),
    )


def _lotto_decoder(S, mean):
    index = {s: i for i, s in enumerate(S)}

    def decode(enc):
        if not isinstance(enc, list) or len(enc) != 2:
            raise MalformedInputError(f"paired strategy {enc!r} must be [lo, hi]")
        lo, hi = _ints(enc)
        if lo not in index or hi not in index:
            raise MalformedInputError(f"paired strategy {enc!r} leaves the support set")
        return lotto.paired_vertex(S, index[lo], index[hi], mean)

    return decode


def _lotto_case(kind, a, b, u, S_A, S_B, game, solve) -> GameCase:
    vs_A = lambda: lotto.all_paired_vertices(S_A, a)  # noqa: E731
    vs_B = lambda: lotto.all_paired_vertices(S_B, b)  # noqa: E731
    return GameCase(
        kind, game, solve, _listify,
        _lotto_decoder(S_A, a), _lotto_decoder(S_B, b),
        vs_A, vs_B, lambda: len(vs_A()), lambda: len(vs_B()),
    )


def _finite_lotto_case(doc) -> GameCase:
    a, b = parse_int(doc["a"], "a"), parse_int(doc["b"], "b")
    S_A = tuple(parse_int(v, "support_A") for v in parse_list(doc["support_A"], "support_A"))
    S_B = tuple(parse_int(v, "support_B") for v in parse_list(doc["support_B"], "support_B"))
    p = doc["payoff"]
    if p == "sign" or isinstance(p, dict):
        u = parse_distance_fn(p, "payoff")
    else:
        table = parse_matrix(p, "payoff")
        if len(table) != len(S_A) or any(len(r) != len(S_B) for r in table):
            raise MalformedInputError(f"payoff must be {len(S_A)}x{len(S_B)}")
        ia = {s: i for i, s in enumerate(S_A)}
        ib = {s: j for j, s in enumerate(S_B)}

        def u(i, j):
            return table[ia[i]][ib[j]]
    game = lotto.finite_lotto_game(a, b, u, S_A, S_B)
    return _lotto_case("finite_general_lotto", a, b, u, S_A, S_B, game, lambda: solve_game(game))


def _general_lotto_case(doc) -> GameCase:
    a, b = parse_int(doc["a"], "a"), parse_int(doc["b"], "b")
    spec = lotto.GeneralLottoSpec(a, b, parse_distance_fn(doc["payoff"], "payoff"))
    S = lotto.general_lotto_support(spec)
    game = lotto.general_lotto_game(spec)
    return _lotto_case("general_lotto", a, b, spec.payoff, S, S, game,
                       lambda: lotto.solve_general_lotto(spec))


def _probs(doc):
    return tuple(parse_rational(v, f"probs[{i}]") for i, v in enumerate(parse_list(doc["probs"], "probs")))


def _ranking_case(doc) -> GameCase:
    spec = duels.DuelSpec(duels.RANKING, _probs(doc))
    game = duels.duel_game(spec)
    m = spec.size

    def decode(enc):
        pos = _ints(enc)
        return PureVertex(pos, duels.ranking_marginal(pos))

    pures = lambda: [decode(list(p)) for p in duels.all_rankings(m)]  # noqa: E731
    return GameCase("ranking_duel", game, lambda: solve_game(game), _listify,
                    _decoder(decode), _decoder(decode), pures, pures,
                    lambda: factorial(m), lambda: factorial(m))


def _bst_case(doc) -> GameCase:
    spec = duels.DuelSpec(duels.BST, _probs(doc))
    game = duels.duel_game(spec)
    m = spec.size

    def decode(enc):
        depths = _ints(enc)
        return PureVertex(depths, duels.bst_marginal(depths))

    pures = lambda: [decode(list(t)) for t in duels.all_bsts(m)]  # noqa: E731
    catalan = comb(2 * m, m) // (m + 1)
    return GameCase("bst_duel", game, lambda: solve_game(game), _listify,
                    _decoder(decode), _decoder(decode), pures, pures,
                    lambda: catalan, lambda: catalan)


def _matching_case(doc) -> GameCase:
    nodes = tuple(_node(v, f"nodes[{i}]") for i, v in enumerate(parse_list(doc["nodes"], "nodes")))
    edges = []
    for i, e in enumerate(parse_list(doc["edges"], "edges")):
        if not isinstance(e, list) or len(e) != 3:
            raise MalformedInputError(f"edges[{i}] must be [u, v, weight]")
        edges.append((_node(e[0], f"edges[{i}][0]"), _node(e[1], f"edges[{i}][1]"),
                      parse_rational(e[2], f"edges[{i}][2]")))
    graph = duels.Graph(nodes, tuple(edges))
    spec = duels.DuelSpec(duels.MATCHING, _probs(doc), graph)
    game = duels.duel_game(spec)
    index = {frozenset((u, v)): e for e, (u, v, _) in enumerate(graph.edges)}

    def encode(strategy):
        return [[graph.edges[e][0], graph.edges[e][1]] for e in strategy]

    def decode(enc):
        if not isinstance(enc, list):
            raise MalformedInputError(f"matching {enc!r} is not a list")
        ids = []
        for pair in enc:
            if not isinstance(pair, list) or len(pair) != 2:
                raise MalformedInputError(f"matching edge {pair!r} must be [u, v]")
            key = frozenset(_node(p, "matching edge") for p in pair)
            if key not in index:
                raise MalformedInputError(f"{pair!r} is not an edge of the graph")
            ids.append(index[key])
        ids = tuple(sorted(ids))
        return PureVertex(ids, duels.matching_marginal(graph, ids))

    def pures():
        return [PureVertex(m, duels.matching_marginal(graph, m))
                for m in duels.all_perfect_matchings(graph)]

    count = lambda: len(duels.all_perfect_matchings(graph))  # noqa: E731
    return GameCase("matching_duel", game, lambda: solve_game(game), encode,
                    decode, decode, pures, pures, count, count)


_BUILDERS = {
    "blotto": _blotto_case,
    "colonel_lotto": _colonel_lotto_case,
    "finite_general_lotto": _finite_lotto_case,
    "general_lotto": _general_lotto_case,
    "ranking_duel": _ranking_case,
    "bst_duel": _bst_case,
    "matching_duel": _matching_case,
}


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path} is not valid JSON: {exc}") from None


def parse_spec(path: str) -> GameCase:
    return build_case(read_json(path))


def _support_json(case: GameCase, strategy: MixedStrategy) -> list:
    return [{"strategy": case.encode(v.strategy), "probability": fmt(w)}
            for v, w in strategy.support]


def make_report(case: GameCase, result: EquilibriumResult, timing: bool = False) -> dict:
    stats = {k: v for k, v in result.stats.items() if k != "wall_time"}
    if timing and "wall_time" in result.stats:
        stats["wall_time"] = round(result.stats["wall_time"], 6)
    return {
        "game": case.kind,
        "value": fmt(result.value),
        "strategy_A": _support_json(case, result.strategy_A),
        "strategy_B": _support_json(case, result.strategy_B),
        "certificate": {"gap_A": fmt(result.gap_A), "gap_B": fmt(result.gap_B)},
        "stats": stats,
    }


def dump(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def bruteforce(case: GameCase, cap: int = DEFAULT_CAP) -> EquilibriumResult:
    """Enumerate both pure strategy sets and solve the full matrix game."""
    cells = case.count_A() * case.count_B()
    if cells > cap:
        raise ResourceLimitError(f"{cells} pure-strategy pairs exceed the cap of {cap}")
    started = time.perf_counter()
    X, Y = case.pures_A(), case.pures_B()
    form = case.game.payoff
    matrix = [[dot(form.costs_for_B(x.marginal), y.marginal) for y in Y] for x in X]
    value, p, q = matrix_game_solve(matrix)
    sA = MixedStrategy(tuple((x, w) for x, w in zip(X, p) if w))
    sB = MixedStrategy(tuple((y, w) for y, w in zip(Y, q) if w))
    _, gap_A, gap_B = certify(case.game, sA, sB)
    stats = {"pure_A": len(X), "pure_B": len(Y), "wall_time": time.perf_counter() - started}
    return EquilibriumResult(value, sA, sB, gap_A, gap_B, stats)


class VerificationFailure(Exception):
    pass


def _read_support(case: GameCase, entries, decode, side: str) -> MixedStrategy:
    support = []
    total = Fraction(0)
    for i, item in enumerate(parse_list(entries, f"strategy_{side}")):
        if not isinstance(item, dict) or set(item) != {"strategy", "probability"}:
            raise MalformedInputError(f"strategy_{side}[{i}] must have strategy and probability")
        w = parse_rational(item["probability"], f"strategy_{side}[{i}].probability")
        if w <= 0:
            raise VerificationFailure(f"strategy_{side}[{i}] has non-positive probability {fmt(w)}")
        support.append((decode(item["strategy"]), w))
        total += w
    if total != 1:
        raise VerificationFailure(f"strategy_{side} probabilities sum to {fmt(total)}")
    try:
        return MixedStrategy(tuple(support))
    except MalformedInputError as exc:
        raise VerificationFailure(f"strategy_{side}: {exc}") from None


def verify(case: GameCase, report: dict) -> list:
    """Re-check a report; returns the list of failures (empty on success)."""
    if not isinstance(report, dict):
        raise MalformedInputError("report must be a JSON object")
    if report.get("game") != case.kind:
        raise MalformedInputError(f"report is for {report.get('game')!r}, spec is {case.kind!r}")
    for key in ("value", "strategy_A", "strategy_B", "certificate"):
        if key not in report:
            raise MalformedInputError(f"report lacks {key!r}")
    cert = report["certificate"]
    if not isinstance(cert, dict) or set(cert) != {"gap_A", "gap_B"}:
        raise MalformedInputError("certificate must hold gap_A and gap_B")
    claimed = parse_rational(report["value"], "value")
    gap_A = parse_rational(cert["gap_A"], "certificate.gap_A")
    gap_B = parse_rational(cert["gap_B"], "certificate.gap_B")
    try:
        sA = _read_support(case, report["strategy_A"], case.decode_A, "A")
        sB = _read_support(case, report["strategy_B"], case.decode_B, "B")
    except VerificationFailure as exc:
        return [str(exc)]
    value, fresh_A, fresh_B = certify(case.game, sA, sB)
    failures = []
    if value != claimed:
        failures.append(f"value is {fmt(value)}, report claims {fmt(claimed)}")
    if fresh_A > gap_A:
        failures.append(f"A can gain {fmt(fresh_A)}, report claims gap {fmt(gap_A)}")
    if fresh_B > gap_B:
        failures.append(f"B can gain {fmt(fresh_B)}, report claims gap {fmt(gap_B)}")
    return failures


def probe_oracle(case: GameCase, costs, sense: str, player: str) -> dict:
    oracle = case.game.oracle_A if player == "A" else case.game.oracle_B
    costs = [parse_rational(c, f"costs[{i}]") for i, c in enumerate(parse_list(costs, "costs"))]
    v = oracle(costs, sense)
    return {
        "strategy": case.encode(v.strategy),
        "marginal": [fmt(x) for x in v.marginal],
        "objective": fmt(dot(costs, v.marginal)),
    }


def _category(exc: GameError) -> tuple:
    if isinstance(exc, ResourceLimitError):
        return "resource_limit", EXIT_LIMIT
    if isinstance(exc, (InfeasibleStrategySpaceError, OracleContractError)):
        return "solver_error", EXIT_SOLVER
    if isinstance(exc, MalformedInputError):
        return "input_error", EXIT_INPUT
    return "solver_error", EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bilinear-games",
                                     description="Exact equilibria of zero-sum games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a game and write a report")
    p.add_argument("spec")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")

    p = sub.add_parser("verify", help="re-check a report with fresh oracle calls")
    p.add_argument("spec")
    p.add_argument("report")

    p = sub.add_parser("bruteforce", help="solve by full pure-strategy enumeration")
    p.add_argument("spec")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP,
                   help="maximum number of pure-strategy pairs (default %(default)s)")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true")

    p = sub.add_parser("oracle", help="probe a player's vertex oracle")
    p.add_argument("spec")
    p.add_argument("--costs", required=True, help="JSON file holding the cost vector")
    p.add_argument("--sense", choices=(MIN, MAX), default=MIN)
    p.add_argument("--player", choices=("A", "B"), default="A")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = getattr(args, "out", None)
    try:
        case = parse_spec(args.spec)
        if args.command == "solve":
            dump(make_report(case, case.solve(), args.timing), out)
        elif args.command == "bruteforce":
            dump(make_report(case, bruteforce(case, args.cap), args.timing), out)
        elif args.command == "verify":
            failures = verify(case, read_json(args.report))
            for line in failures:
                print(f"FAIL: {line}", file=sys.stderr)
            if failures:
                return EXIT_VERIFY
            print("PASS")
        else:
            dump(probe_oracle(case, read_json(args.costs), args.sense, args.player), None)
    except GameError as exc:
        category, code = _category(exc)
        print(f"{category}: {exc}", file=sys.stderr)
        if out is not None and code != EXIT_INPUT:
            dump({"error": {"category": category, "message": str(exc)}}, out)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
