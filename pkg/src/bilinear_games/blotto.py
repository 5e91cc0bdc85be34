"""Colonel Blotto and Colonel Lotto.

A pure strategy splits ``m`` troops over ``k`` battlefields.  Its marginal
image is one-hot per battlefield: block ``i`` of length ``m + 1`` has a 1 at
the troop count placed on battlefield ``i``.  Linear optimization over these
images is a shortest-path style dynamic program over (battlefield, troops
used), so neither player's strategy set is ever enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import MalformedInputError
from .solver import (
    MAX,
    MIN,
    ZERO,
    BilinearGame,
    EquilibriumResult,
    PayoffForm,
    PureVertex,
    VertexOracle,
    solve_game,
)


def sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_matrix(a: int, b: int) -> tuple:
    return tuple(tuple(Fraction(sign(ta - tb)) for tb in range(b + 1)) for ta in range(a + 1))


def _matrix(rows, a: int, b: int, what: str) -> tuple:
    rows = tuple(tuple(Fraction(v) for v in row) for row in rows)
    if len(rows) != a + 1 or any(len(r) != b + 1 for r in rows):
        raise MalformedInputError(f"{what} must be {a + 1}x{b + 1}")
    return rows


@dataclass(frozen=True)
class BlottoSpec:
    """``payoffs[i][ta][tb]`` is A's gain on battlefield ``i``; B gets the negation."""

    a: int
    b: int
    k: int
    payoffs: tuple

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise MalformedInputError(f"{name} must be a nonnegative integer")
        if not isinstance(self.k, int) or self.k < 1:
            raise MalformedInputError("k must be a positive integer")
        if len(self.payoffs) != self.k:
            raise MalformedInputError(f"expected {self.k} payoff matrices, got {len(self.payoffs)}")
        object.__setattr__(
            self,
            "payoffs",
            tuple(_matrix(u, self.a, self.b, f"battlefield {i} payoff")
                  for i, u in enumerate(self.payoffs)),
        )

    @classmethod
    def with_sign_payoffs(cls, a: int, b: int, k: int) -> "BlottoSpec":
        return cls(a, b, k, (sign_matrix(a, b),) * k)


@dataclass(frozen=True)
class LottoSpec:
    a: int
    b: int
    k: int
    payoff: tuple

    def __post_init__(self):
        # Reuse BlottoSpec's checks on the replicated matrix.
        BlottoSpec(self.a, self.b, self.k, (self.payoff,) * self.k)
        object.__setattr__(self, "payoff", _matrix(self.payoff, self.a, self.b, "payoff"))

    @classmethod
    def with_sign_payoff(cls, a: int, b: int, k: int) -> "LottoSpec":
        return cls(a, b, k, sign_matrix(a, b))


def marginal_index(i: int, j: int, m: int, k: int) -> int:
    """Position of (battlefield ``i``, ``j`` troops) in a marginal vector."""
    if not 0 <= i < k or not 0 <= j <= m:
        raise MalformedInputError(f"cell ({i}, {j}) outside {k} battlefields x {m + 1} counts")
    return i * (m + 1) + j


def find_best_pure(m: int, k: int, costs: Sequence, sense: str = MIN) -> tuple:
    """Partition of ``m`` troops over ``k`` battlefields optimizing ``sum costs[i, x_i]``.

    Ties go to the lexicographically smallest partition (fewest troops on
    the lowest battlefield first).
    """
    if m < 0 or k < 1:
        raise MalformedInputError("need m >= 0 and k >= 1")
    if len(costs) != k * (m + 1):
        raise MalformedInputError(f"expected {k * (m + 1)} costs, got {len(costs)}")
    if sense not in (MIN, MAX):
        raise MalformedInputError(f"unknown sense {sense!r}")
    c = costs if sense == MIN else [-v for v in costs]
    stride = m + 1
    # best[i][t]: min cost of battlefields i..k-1 holding exactly t troops.
    best = [None] * (k + 1)
    best[k] = [ZERO] + [None] * m
    for i in range(k - 1, -1, -1):
        nxt = best[i + 1]
        block = c[i * stride:(i + 1) * stride]
        row = [None] * stride
        for t in range(stride):
            cur = None
            for here in range(t + 1):
                rest = nxt[t - here]
                if rest is None:
                    continue
                v = block[here] + rest
                if cur is None or v < cur:
                    cur = v
            row[t] = cur
        best[i] = row
    alloc = []
    t = m
    for i in range(k):
        block = c[i * stride:(i + 1) * stride]
        target = best[i][t]
        nxt = best[i + 1]
        for here in range(t + 1):
            rest = nxt[t - here]
            if rest is not None and block[here] + rest == target:
                alloc.append(here)
                t -= here
                break
    return tuple(alloc)


def pure_to_marginal(x: Sequence[int], m: int) -> tuple:
    if any(not isinstance(v, int) or v < 0 for v in x) or sum(x) != m:
        raise MalformedInputError(f"{tuple(x)} is not a partition of {m}")
    out = [0] * (len(x) * (m + 1))
    for i, xi in enumerate(x):
        out[i * (m + 1) + xi] = 1
    return tuple(out)


def partitions(m: int, k: int):
    """All compositions of ``m`` into ``k`` nonnegative parts, lexicographic."""
    for bars in combinations(range(m + k - 1), k - 1):
        prev = -1
        parts = []
        for bar in bars:
            parts.append(bar - prev - 1)
            prev = bar
        parts.append(m + k - 1 - prev - 1)
        yield tuple(parts)


def blotto_payoff_pure(spec: BlottoSpec, x: Sequence[int], y: Sequence[int]) -> Fraction:
    if len(x) != spec.k or len(y) != spec.k or sum(x) != spec.a or sum(y) != spec.b:
        raise MalformedInputError("partitions do not match the game")
    if min(x) < 0 or min(y) < 0:
        raise MalformedInputError("troop counts must be nonnegative")
    return sum((u[xi][yi] for u, xi, yi in zip(spec.payoffs, x, y)), ZERO)


def blotto_payoff_form(spec: BlottoSpec) -> PayoffForm:
    sa, sb = spec.a + 1, spec.b + 1
    entries = {}
    for i, u in enumerate(spec.payoffs):
        for ta in range(sa):
            for tb in range(sb):
                if u[ta][tb]:
                    entries[(i * sa + ta, i * sb + tb)] = u[ta][tb]
    return PayoffForm.from_entries(spec.k * sa, spec.k * sb, entries)


def blotto_oracle(m: int, k: int) -> VertexOracle:
    def optimize(costs, sense):
        x = find_best_pure(m, k, costs, sense)
        return PureVertex(x, pure_to_marginal(x, m))

    return VertexOracle(k * (m + 1), optimize)


def blotto_game(spec: BlottoSpec) -> BilinearGame:
    return BilinearGame(
        blotto_oracle(spec.a, spec.k), blotto_oracle(spec.b, spec.k), blotto_payoff_form(spec)
    )


def solve_blotto(spec: BlottoSpec, tol=0) -> EquilibriumResult:
    return solve_game(blotto_game(spec), tol)


# Colonel Lotto: the payoff depends only on how many corps of each size a
# player fields, so the marginal is p(v) = (number of corps of size v) / k.


def lotto_marginal(x: Sequence[int], m: int, k: int) -> tuple:
    if len(x) != k or any(not isinstance(v, int) or v < 0 for v in x) or sum(x) != m:
        raise MalformedInputError(f"{tuple(x)} is not a {k}-corps split of {m}")
    out = [ZERO] * (m + 1)
    share = Fraction(1, k)
    for v in x:
        out[v] += share
    return tuple(out)


def lotto_payoff_pure(spec: LottoSpec, x: Sequence[int], y: Sequence[int]) -> Fraction:
    if len(x) != spec.k or len(y) != spec.k or sum(x) != spec.a or sum(y) != spec.b:
        raise MalformedInputError("corps splits do not match the game")
    total = sum((spec.payoff[xi][yj] for xi in x for yj in y), ZERO)
    return total / (spec.k * spec.k)


def lotto_payoff_form(spec: LottoSpec) -> PayoffForm:
    entries = {
        (v, w): spec.payoff[v][w]
        for v in range(spec.a + 1)
        for w in range(spec.b + 1)
        if spec.payoff[v][w]
    }
    return PayoffForm.from_entries(spec.a + 1, spec.b + 1, entries)


def lotto_oracle(m: int, k: int) -> VertexOracle:
    def optimize(costs, sense):
        x = find_best_pure(m, k, list(costs) * k, sense)
        corps = tuple(sorted(x, reverse=True))
        return PureVertex(corps, lotto_marginal(corps, m, k))

    return VertexOracle(m + 1, optimize)


def colonel_lotto_game(spec: LottoSpec) -> BilinearGame:
    return BilinearGame(
        lotto_oracle(spec.a, spec.k), lotto_oracle(spec.b, spec.k), lotto_payoff_form(spec)
    )


def solve_colonel_lotto(spec: LottoSpec, tol=0) -> EquilibriumResult:
    return solve_game(colonel_lotto_game(spec), tol)


def corps_splits(m: int, k: int):
    """Distinct multisets of ``k`` corps summing to ``m``, largest corps first."""
    seen = set()
    for x in partitions(m, k):
        key = tuple(sorted(x, reverse=True))
        if key not in seen:
            seen.add(key)
            yield key
