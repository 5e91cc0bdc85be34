"""Dueling games: both players pick from the same strategy set, a situation
``w`` is drawn from ``p``, and each player scores +1 if it serves ``w``
better than its opponent, -1 if worse and 0 on a tie.

Three variants are provided:

* ranking: order ``m`` pages; a page is served better when it sits at an
  earlier position.  Marginal ``x[i*m + j]`` is 1 iff page ``i`` is at
  position ``j`` (0-based).
* bst: build a binary search tree over keys ``0..m-1``; a key is served
  better when it is shallower.  Depths start at 1 for the root and
  ``x[i*m + d - 1]`` is 1 iff key ``i`` has depth ``d``.
* matching: pick a perfect matching of a weighted graph; a node is served
  better when its partner edge is heavier.  Marginal ``x[e]`` is 1 iff edge
  ``e`` (in input order) is used.

The payoff is skew-symmetric, so every duel has value 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Optional, Sequence

from .errors import InfeasibleStrategySpaceError, MalformedInputError, ResourceLimitError
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

RANKING, BST, MATCHING = "ranking", "bst", "matching"
MAX_MATCHING_NODES = 20


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _probabilities(probs) -> tuple:
    probs = tuple(Fraction(p) for p in probs)
    if not probs:
        raise MalformedInputError("probability vector is empty")
    if any(p < 0 for p in probs) or sum(probs) != 1:
        raise MalformedInputError("probabilities must be nonnegative and sum to 1")
    return probs


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with rational edge weights; edges keep input order."""

    nodes: tuple
    edges: tuple  # ((u, v, weight), ...)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if len(set(nodes)) != len(nodes):
            raise MalformedInputError("duplicate node")
        known = set(nodes)
        seen = set()
        edges = []
        for u, v, w in self.edges:
            if u not in known or v not in known:
                raise MalformedInputError(f"edge ({u}, {v}) uses an unknown node")
            if u == v:
                raise MalformedInputError(f"self-loop at {u}")
            key = frozenset((u, v))
            if key in seen:
                raise MalformedInputError(f"parallel edge ({u}, {v})")
            seen.add(key)
            edges.append((u, v, Fraction(w)))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(edges))


@dataclass(frozen=True)
class DuelSpec:
    """``probs`` is indexed by page/key for ranking and bst, by node for matching."""

    variant: str
    probs: tuple
    graph: Optional[Graph] = None

    def __post_init__(self):
        if self.variant not in (RANKING, BST, MATCHING):
            raise MalformedInputError(f"unknown duel variant {self.variant!r}")
        object.__setattr__(self, "probs", _probabilities(self.probs))
        if self.variant == MATCHING:
            if self.graph is None:
                raise MalformedInputError("matching duel needs a graph")
            if len(self.graph.nodes) != len(self.probs):
                raise MalformedInputError("one probability per node is required")
            matching_oracle(self.graph, [ZERO] * len(self.graph.edges), MIN)
        elif self.graph is not None:
            raise MalformedInputError(f"{self.variant} duel takes no graph")

    @property
    def size(self) -> int:
        return len(self.probs)

    @property
    def dimension(self) -> int:
        if self.variant == MATCHING:
            return len(self.graph.edges)
        return self.size * self.size


def _square(alpha) -> list:
    m = len(alpha)
    if m == 0 or any(len(row) != m for row in alpha):
        raise MalformedInputError("cost table must be square and non-empty")
    return [list(row) for row in alpha]


def _check_sense(sense: str) -> None:
    if sense not in (MIN, MAX):
        raise MalformedInputError(f"unknown sense {sense!r}")


def hungarian(cost) -> list:
    """Minimum-cost perfect assignment; returns ``col[i]`` for each row ``i``.

    Shortest augmenting paths with dual potentials, O(m^3), exact over any
    ordered field.
    """
    m = len(cost)
    u = [ZERO] * (m + 1)
    v = [ZERO] * (m + 1)
    owner = [0] * (m + 1)  # owner[j]: row matched to column j (1-based, 0 = free)
    way = [0] * (m + 1)
    for i in range(1, m + 1):
        owner[0] = i
        j0 = 0
        minv = [None] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = owner[j0]
            delta, j1 = None, 0
            for j in range(1, m + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if minv[j] is None or cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if delta is None or minv[j] < delta:
                    delta, j1 = minv[j], j
            for j in range(m + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    col = [0] * m
    for j in range(1, m + 1):
        col[owner[j] - 1] = j - 1
    return col


def ranking_oracle(alpha, sense: str = MIN) -> tuple:
    """Positions ``pos[i]`` optimizing ``sum_i alpha[i][pos[i]]``."""
    alpha = _square(alpha)
    _check_sense(sense)
    cost = alpha if sense == MIN else [[-c for c in row] for row in alpha]
    return tuple(hungarian(cost))


def bst_oracle(alpha, sense: str = MIN) -> tuple:
    """Depth vector of the BST over keys ``0..m-1`` optimizing
    ``sum_i alpha[i][depth(i) - 1]``; ties go to the smallest root."""
    alpha = _square(alpha)
    _check_sense(sense)
    m = len(alpha)
    c = alpha if sense == MIN else [[-v for v in row] for row in alpha]

    @lru_cache(maxsize=None)
    def best(lo: int, hi: int, depth: int):
        if lo > hi:
            return ZERO, None
        top = None
        for root in range(lo, hi + 1):
            v = c[root][depth - 1] + best(lo, root - 1, depth + 1)[0] \
                + best(root + 1, hi, depth + 1)[0]
            if top is None or v < top[0]:
                top = (v, root)
        return top

    depths = [0] * m
    stack = [(0, m - 1, 1)]
    while stack:
        lo, hi, depth = stack.pop()
        if lo > hi:
            continue
        root = best(lo, hi, depth)[1]
        depths[root] = depth
        stack.append((lo, root - 1, depth + 1))
        stack.append((root + 1, hi, depth + 1))
    return tuple(depths)


def matching_oracle(graph: Graph, alpha: Sequence, sense: str = MIN) -> tuple:
    """Sorted edge indices of a perfect matching optimizing ``sum alpha[e]``.

    Exact search over covered-node subsets, always branching on the lowest
    uncovered node.  Ties go to the lexicographically smallest index tuple.
    """
    _check_sense(sense)
    n = len(graph.nodes)
    if len(alpha) != len(graph.edges):
        raise MalformedInputError(f"expected {len(graph.edges)} costs, got {len(alpha)}")
    if n > MAX_MATCHING_NODES:
        raise ResourceLimitError(f"exact matching oracle is capped at {MAX_MATCHING_NODES} nodes")
    if n % 2:
        raise InfeasibleStrategySpaceError("odd number of nodes: no perfect matching")
    c = list(alpha) if sense == MIN else [-v for v in alpha]
    slot = {v: i for i, v in enumerate(graph.nodes)}
    incident = [[] for _ in range(n)]
    for e, (u, v, _) in enumerate(graph.edges):
        a, b = slot[u], slot[v]
        incident[a].append((e, b))
        incident[b].append((e, a))
    full = (1 << n) - 1

    @lru_cache(maxsize=None)
    def best(mask: int):
        if mask == full:
            return ZERO, ()
        low = (~mask & (mask + 1)).bit_length() - 1
        top = None
        for e, other in incident[low]:
            if mask >> other & 1:
                continue
            sub = best(mask | 1 << low | 1 << other)
            if sub is None:
                continue
            key = (c[e] + sub[0], tuple(sorted(sub[1] + (e,))))
            if top is None or key < top:
                top = key
        return top

    out = best(0)
    if out is None:
        raise InfeasibleStrategySpaceError("graph has no perfect matching")
    return out[1]


def _one_hot(cells: Sequence[int], dim: int) -> tuple:
    out = [0] * dim
    for c in cells:
        out[c] = 1
    return tuple(out)


def _table(costs: Sequence, m: int) -> list:
    return [list(costs[i * m:(i + 1) * m]) for i in range(m)]


def ranking_marginal(pos: Sequence[int]) -> tuple:
    m = len(pos)
    if sorted(pos) != list(range(m)):
        raise MalformedInputError(f"{tuple(pos)} is not a permutation")
    return _one_hot([i * m + j for i, j in enumerate(pos)], m * m)


def is_bst_depths(depths: Sequence[int]) -> bool:
    """Whether ``depths`` (root = 1) is the depth vector of a BST over 0..m-1."""
    def ok(lo, hi, d):
        if lo > hi:
            return True
        roots = [i for i in range(lo, hi + 1) if depths[i] == d]
        if len(roots) != 1:
            return False
        r = roots[0]
        return ok(lo, r - 1, d + 1) and ok(r + 1, hi, d + 1)

    return len(depths) > 0 and ok(0, len(depths) - 1, 1)


def bst_marginal(depths: Sequence[int]) -> tuple:
    m = len(depths)
    if not is_bst_depths(depths):
        raise MalformedInputError(f"{tuple(depths)} is not a BST depth vector")
    return _one_hot([i * m + d - 1 for i, d in enumerate(depths)], m * m)


def is_perfect_matching(graph: Graph, edges: Sequence[int]) -> bool:
    covered = []
    for e in edges:
        if not 0 <= e < len(graph.edges):
            return False
        u, v, _ = graph.edges[e]
        covered += [u, v]
    return sorted(covered, key=graph.nodes.index) == list(graph.nodes)


def matching_marginal(graph: Graph, edges: Sequence[int]) -> tuple:
    if not is_perfect_matching(graph, edges):
        raise MalformedInputError(f"{tuple(edges)} is not a perfect matching")
    return _one_hot(edges, len(graph.edges))


def duel_oracle(spec: DuelSpec) -> VertexOracle:
    m = spec.size
    if spec.variant == RANKING:
        def optimize(costs, sense):
            pos = ranking_oracle(_table(costs, m), sense)
            return PureVertex(pos, ranking_marginal(pos))
    elif spec.variant == BST:
        def optimize(costs, sense):
            depths = bst_oracle(_table(costs, m), sense)
            return PureVertex(depths, bst_marginal(depths))
    else:
        def optimize(costs, sense):
            edges = matching_oracle(spec.graph, costs, sense)
            return PureVertex(edges, matching_marginal(spec.graph, edges))
    return VertexOracle(spec.dimension, optimize)


def duel_payoff_form(spec: DuelSpec) -> PayoffForm:
    entries = {}
    if spec.variant in (RANKING, BST):
        m = spec.size
        for i, p in enumerate(spec.probs):
            if not p:
                continue
            for j in range(m):
                for k in range(m):
                    if j != k:
                        entries[(i * m + j, i * m + k)] = p * _sign(k - j)
    else:
        slot = {v: i for i, v in enumerate(spec.graph.nodes)}
        touching = [[] for _ in spec.graph.nodes]
        for e, (u, v, _) in enumerate(spec.graph.edges):
            touching[slot[u]].append(e)
            touching[slot[v]].append(e)
        for node, p in enumerate(spec.probs):
            for e1 in touching[node]:
                for e2 in touching[node]:
                    s = _sign(spec.graph.edges[e1][2] - spec.graph.edges[e2][2])
                    if p and s:
                        entries[(e1, e2)] = entries.get((e1, e2), ZERO) + p * s
    return PayoffForm.from_entries(spec.dimension, spec.dimension, entries)


def situation_costs(spec: DuelSpec, strategy) -> list:
    """How well a pure strategy serves each situation; lower is better."""
    if spec.variant in (RANKING, BST):
        return list(strategy)
    partner_weight = {}
    for e in strategy:
        u, v, w = spec.graph.edges[e]
        partner_weight[u] = partner_weight[v] = w
    return [-partner_weight[v] for v in spec.graph.nodes]


def duel_payoff_pure(spec: DuelSpec, x, y) -> Fraction:
    """``Pr[x serves w better] - Pr[y serves w better]`` computed directly."""
    cx, cy = situation_costs(spec, x), situation_costs(spec, y)
    return sum((p * _sign(b - a) for p, a, b in zip(spec.probs, cx, cy)), ZERO)


def duel_game(spec: DuelSpec) -> BilinearGame:
    oracle = duel_oracle(spec)
    return BilinearGame(oracle, oracle, duel_payoff_form(spec))


def solve_duel(spec: DuelSpec, tol=0) -> EquilibriumResult:
    return solve_game(duel_game(spec), tol)


def all_rankings(m: int):
    return permutations(range(m))


def all_bsts(m: int) -> list:
    """Depth vectors of every BST over ``m`` keys (Catalan(m) of them)."""
    def build(lo, hi, d):
        if lo > hi:
            return [{}]
        out = []
        for r in range(lo, hi + 1):
            for left in build(lo, r - 1, d + 1):
                for right in build(r + 1, hi, d + 1):
                    out.append({**left, **right, r: d})
        return out

    return [tuple(t[i] for i in range(m)) for t in build(0, m - 1, 1)]


def all_perfect_matchings(graph: Graph) -> list:
    """Every perfect matching as a sorted tuple of edge indices."""
    slot = {v: i for i, v in enumerate(graph.nodes)}
    n = len(graph.nodes)
    out = []

    def grow(covered, chosen):
        if len(covered) == n:
            out.append(tuple(sorted(chosen)))
            return
        low = min(i for i in range(n) if i not in covered)
        for e, (u, v, _) in enumerate(graph.edges):
            a, b = slot[u], slot[v]
            if low in (a, b) and a not in covered and b not in covered:
                grow(covered | {a, b}, chosen + [e])

    grow(frozenset(), [])
    return sorted(out)
