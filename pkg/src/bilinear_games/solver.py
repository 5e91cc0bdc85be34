"""Equilibria of bilinear zero-sum games from vertex-optimization oracles.

A game is described by two :class:`VertexOracle` objects (one per player)
and a :class:`PayoffForm` holding the bilinear payoff ``x^T M y`` to player
A.  Pure strategies are :class:`PureVertex` values: a native encoding plus
its 0/1 marginal image.  The solver never enumerates a strategy set; it only
asks each oracle for a cost-optimal vertex.

Equilibria are found by double oracle (restricted-game column and row
generation).  Mixed strategies are kept as explicit convex combinations of
oracle vertices, so no separate marginal-to-strategy decomposition is needed
at solve time; :func:`decompose_marginal` covers externally supplied points.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Optional, Sequence

from .errors import MalformedInputError, NotAMemberError, OracleContractError, ResourceLimitError
from .ratlp import EQ, GE, MINIMIZE, LinearProgram, lp_solve, matrix_game_solve

MIN, MAX = "min", "max"

ZERO = Fraction(0)


def dot(costs: Sequence, point: Sequence) -> Fraction:
    total = ZERO
    for c, v in zip(costs, point):
        if v:
            total += c * v
    return total


@dataclass(frozen=True)
class PureVertex:
    """A pure strategy: native encoding plus its marginal image."""

    strategy: Hashable
    marginal: tuple


@dataclass(frozen=True)
class VertexOracle:
    """Linear optimization over one player's strategy polytope.

    ``optimize(costs, sense)`` must return a vertex attaining the min (or
    max) of ``costs . marginal`` over *all* pure strategies, deterministically.
    Implementations must be pure functions.
    """

    dimension: int
    optimize: Callable[[Sequence, str], PureVertex]

    def __call__(self, costs, sense=MIN) -> PureVertex:
        if len(costs) != self.dimension:
            raise MalformedInputError(
                f"cost vector has length {len(costs)}, oracle dimension is {self.dimension}"
            )
        if sense not in (MIN, MAX):
            raise MalformedInputError(f"unknown sense {sense!r}")
        vertex = self.optimize(costs, sense)
        if len(vertex.marginal) != self.dimension:
            raise OracleContractError(
                f"oracle returned a marginal of length {len(vertex.marginal)}, "
                f"expected {self.dimension}"
            )
        return vertex


@dataclass(frozen=True)
class PayoffForm:
    """Bilinear payoff to player A, with the matrix held implicitly.

    ``costs_for_B(x)`` is ``x^T M`` (a vector over B's coordinates) and
    ``costs_for_A(y)`` is ``M y``; ``abs_sum`` is the entrywise 1-norm of M.
    """

    dim_A: int
    dim_B: int
    costs_for_B: Callable[[Sequence], list]
    costs_for_A: Callable[[Sequence], list]
    abs_sum: Fraction

    def eval(self, x, y) -> Fraction:
        return dot(self.costs_for_B(x), y)

    @classmethod
    def from_entries(cls, dim_A: int, dim_B: int, entries) -> "PayoffForm":
        """Build a form from sparse ``{(i, j): value}`` matrix entries."""
        rows = [dict() for _ in range(dim_A)]
        cols = [dict() for _ in range(dim_B)]
        abs_sum = ZERO
        for (i, j), v in entries.items():
            v = Fraction(v)
            if v == 0:
                continue
            rows[i][j] = v
            cols[j][i] = v
            abs_sum += abs(v)

        def costs_for_B(x):
            out = [ZERO] * dim_B
            for i, xi in enumerate(x):
                if xi:
                    for j, v in rows[i].items():
                        out[j] += xi * v
            return out

        def costs_for_A(y):
            out = [ZERO] * dim_A
            for j, yj in enumerate(y):
                if yj:
                    for i, v in cols[j].items():
                        out[i] += yj * v
            return out

        return cls(dim_A, dim_B, costs_for_B, costs_for_A, abs_sum)


@dataclass(frozen=True)
class MixedStrategy:
    """Finite support of ``(PureVertex, weight)`` pairs, weights summing to 1."""

    support: tuple

    def __post_init__(self):
        total = ZERO
        seen = set()
        for vertex, w in self.support:
            if w <= 0:
                raise MalformedInputError("mixed strategy weights must be positive")
            if vertex.marginal in seen:
                raise MalformedInputError("mixed strategy support has duplicate vertices")
            seen.add(vertex.marginal)
            total += w
        if total != 1:
            raise MalformedInputError(f"mixed strategy weights sum to {total}, not 1")

    def marginal(self) -> tuple:
        return aggregate(self.support)

    def __len__(self):
        return len(self.support)


def aggregate(weighted) -> tuple:
    """Marginal of a convex combination ``[(vertex, weight), ...]``."""
    weighted = list(weighted)
    n = len(weighted[0][0].marginal)
    out = [ZERO] * n
    for vertex, w in weighted:
        for i, v in enumerate(vertex.marginal):
            if v:
                out[i] += w * v
    return tuple(out)


@dataclass(frozen=True)
class BilinearGame:
    oracle_A: VertexOracle
    oracle_B: VertexOracle
    payoff: PayoffForm


@dataclass(frozen=True)
class EquilibriumResult:
    """Game value, both mixed strategies and the best-response certificate.

    ``gap_A`` is how much A could gain by switching to an oracle best
    response against ``strategy_B``; ``gap_B`` likewise for B.  Both are
    exactly zero for an exact equilibrium.
    """

    value: Fraction
    strategy_A: MixedStrategy
    strategy_B: MixedStrategy
    gap_A: Fraction
    gap_B: Fraction
    stats: dict = field(default_factory=dict, compare=False)


def best_response(payoff: PayoffForm, oracle: VertexOracle, opponent_marginal, side: str):
    """Best pure reply to a fixed opponent marginal.

    ``side`` names the responding player.  Returns the vertex and the
    resulting payoff *to player A*.
    """
    if side == "B":
        if len(opponent_marginal) != payoff.dim_A:
            raise MalformedInputError("opponent marginal does not match player A's dimension")
        costs = payoff.costs_for_B(opponent_marginal)
        vertex = oracle(costs, MIN)
    elif side == "A":
        if len(opponent_marginal) != payoff.dim_B:
            raise MalformedInputError("opponent marginal does not match player B's dimension")
        costs = payoff.costs_for_A(opponent_marginal)
        vertex = oracle(costs, MAX)
    else:
        raise MalformedInputError(f"side must be 'A' or 'B', got {side!r}")
    return vertex, dot(costs, vertex.marginal)


def certify(game: BilinearGame, strategy_A: MixedStrategy, strategy_B: MixedStrategy):
    """Recompute value and both best-response gaps with fresh oracle calls."""
    x = strategy_A.marginal()
    y = strategy_B.marginal()
    value = game.payoff.eval(x, y)
    _, low = best_response(game.payoff, game.oracle_B, x, "B")
    _, high = best_response(game.payoff, game.oracle_A, y, "A")
    return value, high - value, value - low


def solve_bilinear(oracle_A: VertexOracle, oracle_B: VertexOracle, payoff: PayoffForm,
                   tol=0) -> EquilibriumResult:
    """Equilibrium of a bilinear game by double oracle.

    Stops once ``gap_A + gap_B <= tol``; with ``tol = 0`` the result is an
    exact equilibrium.  Each round adds at least one vertex not seen before,
    so the loop is finite.
    """
    if oracle_A.dimension != payoff.dim_A or oracle_B.dimension != payoff.dim_B:
        raise MalformedInputError("oracle dimensions do not match the payoff form")
    tol = Fraction(tol)
    if tol < 0:
        raise MalformedInputError("tolerance must be nonnegative")
    started = time.perf_counter()

    V_A = [oracle_A([ZERO] * oracle_A.dimension, MIN)]
    V_B = [oracle_B([ZERO] * oracle_B.dimension, MIN)]
    rows_B_costs = [payoff.costs_for_B(V_A[0].marginal)]
    matrix = [[dot(rows_B_costs[0], V_B[0].marginal)]]
    known_A = {V_A[0].marginal}
    known_B = {V_B[0].marginal}

    rounds = 0
    while True:
        rounds += 1
        value, p, q = matrix_game_solve(matrix)
        x = aggregate(zip(V_A, p))
        y = aggregate(zip(V_B, q))

        costs_B = payoff.costs_for_B(x)
        reply_B = oracle_B(costs_B, MIN)
        low = dot(costs_B, reply_B.marginal)
        costs_A = payoff.costs_for_A(y)
        reply_A = oracle_A(costs_A, MAX)
        high = dot(costs_A, reply_A.marginal)
        gap_A, gap_B = high - value, value - low

        if gap_A + gap_B <= tol:
            break

        # A known vertex is already priced into the restricted game, so it
        # cannot carry a positive gap unless the oracle broke its contract.
        if gap_A > 0:
            if reply_A.marginal in known_A:
                raise OracleContractError(
                    "player A's oracle returned a known vertex while its gap is positive"
                )
            known_A.add(reply_A.marginal)
            V_A.append(reply_A)
            cb = payoff.costs_for_B(reply_A.marginal)
            rows_B_costs.append(cb)
            matrix.append([dot(cb, v.marginal) for v in V_B])
        if gap_B > 0:
            if reply_B.marginal in known_B:
                raise OracleContractError(
                    "player B's oracle returned a known vertex while its gap is positive"
                )
            known_B.add(reply_B.marginal)
            V_B.append(reply_B)
            for row, cb in zip(matrix, rows_B_costs):
                row.append(dot(cb, reply_B.marginal))

    strategy_A = MixedStrategy(tuple((v, w) for v, w in zip(V_A, p) if w))
    strategy_B = MixedStrategy(tuple((v, w) for v, w in zip(V_B, q) if w))
    stats = {
        "iterations": rounds,
        "vertices_A": len(V_A),
        "vertices_B": len(V_B),
        "wall_time": time.perf_counter() - started,
    }
    return EquilibriumResult(value, strategy_A, strategy_B, gap_A, gap_B, stats)


def solve_game(game: BilinearGame, tol=0) -> EquilibriumResult:
    return solve_bilinear(game.oracle_A, game.oracle_B, game.payoff, tol)


@dataclass(frozen=True)
class Inside:
    strategy: MixedStrategy


@dataclass(frozen=True)
class Separator:
    """Hyperplane with ``offset + normal . v >= 0`` on every vertex, ``< 0`` at the point."""

    offset: Fraction
    normal: tuple


def _separation_lp(point, vertices):
    # Most violated hyperplane with coefficients boxed to [-1, 1]:
    # min a0 + a.point  s.t.  a0 + a.v >= 0 for v in vertices.
    n = len(point)
    objective = [1] + list(point)
    rows = [([1] + list(v.marginal), GE, 0) for v in vertices]
    bounds = [(None, None)] + [(-1, 1)] * n
    return lp_solve(LinearProgram.build(objective, rows, bounds, sense=MINIMIZE))


def _convex_witness(point, vertices) -> Optional[MixedStrategy]:
    n = len(point)
    rows = [([1] * len(vertices), EQ, 1)]
    for i in range(n):
        rows.append(([v.marginal[i] for v in vertices], EQ, point[i]))
    out = lp_solve(LinearProgram.build([0] * len(vertices), rows))
    if not out.optimal:
        return None
    return MixedStrategy(tuple((v, w) for v, w in zip(vertices, out.x) if w))


def check_membership(point, oracle: VertexOracle, max_rounds: int = 1000):
    """Decide whether ``point`` lies in the oracle's strategy polytope.

    Returns :class:`Inside` with an exact convex decomposition, or a
    :class:`Separator` certified by a final oracle minimization.
    """
    point = tuple(Fraction(v) for v in point)
    if len(point) != oracle.dimension:
        raise MalformedInputError(
            f"point has dimension {len(point)}, oracle dimension is {oracle.dimension}"
        )
    vertices = [oracle([ZERO] * oracle.dimension, MIN)]
    known = {vertices[0].marginal}
    for _ in range(max_rounds):
        sep = _separation_lp(point, vertices)
        offset, normal = sep.x[0], sep.x[1:]
        if sep.value >= 0:
            witness = _convex_witness(point, vertices)
            if witness is None:  # pragma: no cover - LP duality forbids this
                raise OracleContractError("separation LP and hull LP disagree")
            return Inside(witness)
        v = oracle(list(normal), MIN)
        if offset + dot(normal, v.marginal) >= 0:
            return Separator(offset, tuple(normal))
        if v.marginal in known:
            raise OracleContractError("oracle returned a known vertex violating the hyperplane")
        known.add(v.marginal)
        vertices.append(v)
    raise ResourceLimitError(f"membership undecided after {max_rounds} rounds")


def decompose_marginal(point, oracle: VertexOracle, max_rounds: int = 1000) -> MixedStrategy:
    """Mixed strategy over at most ``dimension + 1`` vertices whose marginal is ``point``."""
    out = check_membership(point, oracle, max_rounds)
    if isinstance(out, Separator):
        raise NotAMemberError("point lies outside the strategy polytope", out.offset, out.normal)
    return out.strategy


def oracle_tolerance(epsilon, payoff: PayoffForm) -> Fraction:
    """Oracle accuracy ``epsilon / max(1, sum |M_ij|)`` that keeps an epsilon-solution."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise MalformedInputError("epsilon must be positive")
    return epsilon / max(Fraction(1), Fraction(payoff.abs_sum))
