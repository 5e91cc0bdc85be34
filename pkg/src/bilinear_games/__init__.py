"""Exact equilibria of zero-sum games with huge strategy spaces.

Each player's strategies are the vertices of a polytope that is only
accessible through a linear-optimization oracle; the payoff is bilinear in
the two players' marginal vectors.  :func:`solve_bilinear` turns that into an
exact equilibrium with a best-response certificate.
"""

from .errors import (
    GameError,
    InfeasibleStrategySpaceError,
    MalformedInputError,
    NotAMemberError,
    OracleContractError,
    ResourceLimitError,
)
from .ratlp import LinearProgram, LpOutcome, Status, lp_solve, matrix_game_solve
from .solver import (
    BilinearGame,
    EquilibriumResult,
    Inside,
    MixedStrategy,
    PayoffForm,
    PureVertex,
    Separator,
    VertexOracle,
    best_response,
    certify,
    check_membership,
    decompose_marginal,
    oracle_tolerance,
    solve_bilinear,
    solve_game,
)
from .blotto import BlottoSpec, LottoSpec, solve_blotto, solve_colonel_lotto
from .lotto import (
    BoundedDistanceFn,
    FiniteLottoStrategy,
    GeneralLottoSpec,
    PairedStrategy,
    solve_finite_general_lotto,
    solve_general_lotto,
)
from .duels import DuelSpec, Graph, solve_duel

__all__ = [name for name in dir() if not name.startswith("_")]
