"""General Lotto: each player picks a distribution over nonnegative integers
with a prescribed mean, and A earns ``E[u(X, Y)]``.

With a finite support set ``S`` the strategy polytope is
``{x >= 0 : sum x = 1, sum x_i S_i = mean}``.  Its vertices are the two-point
"paired" distributions with the right mean (plus the point mass at the mean
when it lies in ``S``), so the vertex oracle simply scans all pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import InfeasibleStrategySpaceError, MalformedInputError
from .solver import (
    MAX,
    MIN,
    ZERO,
    BilinearGame,
    EquilibriumResult,
    MixedStrategy,
    PayoffForm,
    PureVertex,
    VertexOracle,
    solve_bilinear,
)


def _support_set(S) -> tuple:
    S = tuple(S)
    if not S:
        raise MalformedInputError("support set is empty")
    if any(not isinstance(s, int) or s < 0 for s in S):
        raise MalformedInputError("support points must be nonnegative integers")
    if any(x >= y for x, y in zip(S, S[1:])):
        raise MalformedInputError("support set must be strictly increasing")
    return S


@dataclass(frozen=True)
class FiniteLottoStrategy:
    support: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "support", _support_set(self.support))
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != len(self.support):
            raise MalformedInputError("probabilities do not align with the support")
        if any(p < 0 for p in probs) or sum(probs) != 1:
            raise MalformedInputError("probabilities must be nonnegative and sum to 1")

    @property
    def mean(self) -> Fraction:
        return sum((s * p for s, p in zip(self.support, self.probs)), ZERO)

    def pmf(self) -> dict:
        return {s: p for s, p in zip(self.support, self.probs) if p}

    @classmethod
    def from_pmf(cls, pmf: dict) -> "FiniteLottoStrategy":
        keys = sorted(k for k, v in pmf.items() if v)
        return cls(tuple(keys), tuple(pmf[k] for k in keys))


@dataclass(frozen=True)
class PairedStrategy:
    """Two-point distribution on ``lo < hi`` with the given mean, or a point mass."""

    lo: int
    hi: int
    mean: Fraction
    p_lo: Fraction
    p_hi: Fraction

    def pmf(self) -> dict:
        if self.lo == self.hi:
            return {self.lo: Fraction(1)}
        return {s: p for s, p in ((self.lo, self.p_lo), (self.hi, self.p_hi)) if p}

    def as_finite(self) -> FiniteLottoStrategy:
        return FiniteLottoStrategy.from_pmf(self.pmf())


def paired_strategy(lo: int, hi: int, mean) -> PairedStrategy:
    mean = Fraction(mean)
    if lo > hi:
        lo, hi = hi, lo
    if not lo <= mean <= hi:
        raise MalformedInputError(f"mean {mean} outside [{lo}, {hi}]")
    if lo == hi:
        return PairedStrategy(lo, hi, mean, Fraction(1), ZERO)
    p_lo = (mean - hi) / (lo - hi)
    return PairedStrategy(lo, hi, mean, p_lo, 1 - p_lo)


def decompose_paired(T: FiniteLottoStrategy) -> list:
    """Write ``T`` as a convex combination of paired strategies with its mean.

    Repeatedly pairs the lowest point below the mean with the lowest point
    above it and removes as much of that pair as the residual allows; each
    step zeroes at least one support point.
    """
    a = T.mean
    resid = T.pmf()
    out = []
    while resid:
        total = sum(resid.values())
        if a in resid and len(resid) == 1:
            out.append((total, paired_strategy(int(a), int(a), a)))
            break
        below = [s for s in resid if s < a]
        above = [s for s in resid if s > a]
        if not below or not above:
            # Only the point mass at the mean can remain.
            out.append((resid.pop(a), paired_strategy(int(a), int(a), a)))
            continue
        i, j = min(below), min(above)
        pair = paired_strategy(i, j, a)
        beta = min(resid[i] / pair.p_lo, resid[j] / pair.p_hi)
        out.append((beta, pair))
        for s, p in ((i, pair.p_lo), (j, pair.p_hi)):
            resid[s] -= beta * p
            if resid[s] == 0:
                del resid[s]
    return out


def _pair_vertices(S: tuple, mean: Fraction):
    """Singletons and strict pairs of ``S`` with the given mean, lexicographic."""
    for x, lo in enumerate(S):
        if lo == mean:
            yield x, x, paired_strategy(lo, lo, mean)
        elif lo < mean:
            for y in range(x + 1, len(S)):
                if S[y] > mean:
                    yield x, y, paired_strategy(lo, S[y], mean)


def _vertex(S: tuple, x: int, y: int, pair: PairedStrategy) -> PureVertex:
    marginal = [ZERO] * len(S)
    if x == y:
        marginal[x] = Fraction(1)
    else:
        marginal[x], marginal[y] = pair.p_lo, pair.p_hi
    return PureVertex((pair.lo, pair.hi), tuple(marginal))


def paired_vertex(S, x: int, y: int, mean) -> PureVertex:
    """Vertex for the pair ``(S[x], S[y])`` (a point mass when ``x == y``)."""
    if x > y:
        x, y = y, x
    return _vertex(S, x, y, paired_strategy(S[x], S[y], mean))


def finite_lotto_oracle(S, mean, costs: Sequence, sense: str = MIN) -> PureVertex:
    """Cost-optimal vertex of the mean-``mean`` distributions on ``S``.

    The native encoding is ``(lo, hi)``; a point mass at ``s`` is ``(s, s)``.
    Ties go to the lexicographically smallest encoding.
    """
    S = _support_set(S)
    mean = Fraction(mean)
    if len(costs) != len(S):
        raise MalformedInputError(f"expected {len(S)} costs, got {len(costs)}")
    if sense not in (MIN, MAX):
        raise MalformedInputError(f"unknown sense {sense!r}")
    best = None
    for x, y, pair in _pair_vertices(S, mean):
        c = costs[x] if x == y else pair.p_lo * costs[x] + pair.p_hi * costs[y]
        if sense == MAX:
            c = -c
        key = (c, pair.lo, pair.hi)
        if best is None or key < best[0]:
            best = (key, x, y, pair)
    if best is None:
        raise InfeasibleStrategySpaceError(f"no distribution on {S} has mean {mean}")
    _, x, y, pair = best
    return _vertex(S, x, y, pair)


def lotto_oracle(S, mean) -> VertexOracle:
    S = _support_set(S)
    mean = Fraction(mean)
    if not S[0] <= mean <= S[-1]:
        raise InfeasibleStrategySpaceError(f"no distribution on {S} has mean {mean}")
    return VertexOracle(len(S), lambda costs, sense: finite_lotto_oracle(S, mean, costs, sense))


def all_paired_vertices(S, mean) -> list:
    """Every vertex of the finite polytope, in oracle tie-break order."""
    S = _support_set(S)
    mean = Fraction(mean)
    return [_vertex(S, x, y, pair) for x, y, pair in _pair_vertices(S, mean)]


def _sign(d) -> int:
    return (d > 0) - (d < 0)


def sign_payoff(i: int, j: int) -> Fraction:
    return Fraction(_sign(i - j))


@dataclass(frozen=True)
class BoundedDistanceFn:
    """``u(i, j) = f(i - j)`` with ``f`` monotone, sign-respecting and saturating.

    ``f`` must equal ``maximum`` for ``d >= threshold`` and ``-maximum`` for
    ``d <= -threshold``.  These are checked on ``[-threshold-2, threshold+2]``.
    """

    f: Callable[[int], Fraction]
    threshold: int
    maximum: Fraction
    table: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        uT, uM = self.threshold, Fraction(self.maximum)
        object.__setattr__(self, "maximum", uM)
        if not isinstance(uT, int) or uT < 1:
            raise MalformedInputError("threshold must be a positive integer")
        window = range(-uT - 2, uT + 3)
        vals = [Fraction(self.f(d)) for d in window]
        if any(v > w for v, w in zip(vals, vals[1:])):
            raise MalformedInputError("distance function is not monotone")
        for d, v in zip(window, vals):
            if _sign(v) != _sign(d):
                raise MalformedInputError(f"f({d}) = {v} does not have the sign of {d}")
            if d >= uT and v != uM:
                raise MalformedInputError(f"f({d}) = {v} but should saturate at {uM}")
            if d <= -uT and v != -uM:
                raise MalformedInputError(f"f({d}) = {v} but should saturate at {-uM}")
        object.__setattr__(self, "table", tuple(vals[2:-2]))

    def __call__(self, i: int, j: int) -> Fraction:
        d = i - j
        if d >= self.threshold:
            return self.maximum
        if d <= -self.threshold:
            return -self.maximum
        return self.table[d + self.threshold]

    @classmethod
    def sign(cls) -> "BoundedDistanceFn":
        return cls(_sign, 1, Fraction(1))

    @classmethod
    def from_values(cls, values: Sequence, threshold: int) -> "BoundedDistanceFn":
        """``values[d + threshold]`` is ``f(d)`` for ``-threshold <= d <= threshold``."""
        values = tuple(Fraction(v) for v in values)
        if len(values) != 2 * threshold + 1:
            raise MalformedInputError(f"expected {2 * threshold + 1} values")

        def f(d):
            return values[max(-threshold, min(threshold, d)) + threshold]

        return cls(f, threshold, values[-1])


def lotto_payoff(X: FiniteLottoStrategy, Y: FiniteLottoStrategy, u) -> Fraction:
    total = ZERO
    for i, p in X.pmf().items():
        for j, q in Y.pmf().items():
            v = u(i, j)
            if v is None:
                raise MalformedInputError(f"payoff undefined at ({i}, {j})")
            total += p * q * Fraction(v)
    return total


def paired_best_response(X: FiniteLottoStrategy, S, mean_b, u) -> tuple:
    """B's best paired reply to ``X`` and the payoff B gets, ``-E[u(X, Y)]``."""
    S = _support_set(S)
    costs = [lotto_payoff(X, FiniteLottoStrategy((s,), (1,)), u) for s in S]
    vertex = finite_lotto_oracle(S, mean_b, costs, MIN)
    lo, hi = vertex.strategy
    return paired_strategy(lo, hi, mean_b), -sum(
        (c * m for c, m in zip(costs, vertex.marginal)), ZERO
    )


def lotto_payoff_form(S_A, S_B, u) -> PayoffForm:
    entries = {}
    for x, i in enumerate(S_A):
        for y, j in enumerate(S_B):
            v = u(i, j)
            if v is None:
                raise MalformedInputError(f"payoff undefined at ({i}, {j})")
            entries[(x, y)] = v
    return PayoffForm.from_entries(len(S_A), len(S_B), entries)


def solve_finite_general_lotto(a, b, u, S_A, S_B, tol=0) -> EquilibriumResult:
    S_A, S_B = _support_set(S_A), _support_set(S_B)
    return solve_bilinear(lotto_oracle(S_A, a), lotto_oracle(S_B, b),
                          lotto_payoff_form(S_A, S_B, u), tol)


def support_bound(b: int, uT: int) -> tuple:
    """Support cutoffs ``(u_hat, u_bar)``: A never needs mass above ``u_hat``,
    B never above ``u_bar = u_hat + uT``."""
    if not isinstance(uT, int) or uT < 1:
        raise MalformedInputError("uT must be a positive integer")
    if not isinstance(b, int) or b < 0:
        raise MalformedInputError("b must be a nonnegative integer")
    u_hat = (4 * b * uT + 4 * b + uT) * (2 * uT + 2)
    return u_hat, u_hat + uT


@dataclass(frozen=True)
class GeneralLottoSpec:
    a: int
    b: int
    payoff: BoundedDistanceFn

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise MalformedInputError(f"{name} must be a nonnegative integer")
        if not isinstance(self.payoff, BoundedDistanceFn):
            raise MalformedInputError("payoff must be a BoundedDistanceFn")


def _swap(result: EquilibriumResult) -> EquilibriumResult:
    return EquilibriumResult(-result.value, result.strategy_B, result.strategy_A,
                             result.gap_B, result.gap_A, dict(result.stats))


def general_lotto_support(spec: GeneralLottoSpec) -> tuple:
    """Grid ``{0, ..., u_bar}`` large enough for both players."""
    _, u_bar = support_bound(max(spec.a, spec.b), spec.payoff.threshold)
    return tuple(range(u_bar + 1))


def solve_general_lotto(spec: GeneralLottoSpec, tol=0) -> EquilibriumResult:
    """Equilibrium of General Lotto with a bounded-distance payoff.

    When ``a > b`` the roles are swapped (B faces ``u'(i, j) = -u(j, i)``)
    and the result is mapped back, so the returned value is always A's.
    """
    S = general_lotto_support(spec)
    u = spec.payoff
    if spec.a <= spec.b:
        result = solve_finite_general_lotto(spec.a, spec.b, u, S, S, tol)
    else:
        result = _swap(solve_finite_general_lotto(
            spec.b, spec.a, lambda i, j: -u(j, i), S, S, tol))
    result.stats["support_max"] = S[-1]
    return result


def vertex_to_strategy(S, vertex: PureVertex) -> FiniteLottoStrategy:
    return FiniteLottoStrategy.from_pmf(dict(zip(S, vertex.marginal)))


def mixture_distribution(S, strategy: MixedStrategy) -> FiniteLottoStrategy:
    """The single distribution a mixed strategy over vertices amounts to."""
    return FiniteLottoStrategy.from_pmf(dict(zip(S, strategy.marginal())))


def cumulative(T: FiniteLottoStrategy, upto: int) -> Fraction:
    return sum((p for s, p in T.pmf().items() if s <= upto), ZERO)


def finite_lotto_game(a, b, u, S_A, S_B) -> BilinearGame:
    S_A, S_B = _support_set(S_A), _support_set(S_B)
    return BilinearGame(lotto_oracle(S_A, a), lotto_oracle(S_B, b),
                        lotto_payoff_form(S_A, S_B, u))


def general_lotto_game(spec: GeneralLottoSpec) -> BilinearGame:
    """The finite game on the pruned grid, always in A-versus-B orientation."""
    S = general_lotto_support(spec)
    return finite_lotto_game(spec.a, spec.b, spec.payoff, S, S)
