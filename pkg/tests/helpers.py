"""Shared test oracles and brute-force references."""

import random
from fractions import Fraction

from bilinear_games.solver import MIN, PureVertex, VertexOracle, dot


def one_hot_oracle(n: int) -> VertexOracle:
    """Oracle over the simplex in dimension ``n``: vertices are unit vectors."""
    units = [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def optimize(costs, sense):
        key = (lambda i: costs[i]) if sense == MIN else (lambda i: -costs[i])
        best = min(range(n), key=key)
        return PureVertex(best, units[best])

    return VertexOracle(n, optimize)


def brute_optimum(vertices, costs, sense=MIN):
    values = [dot(costs, v.marginal) for v in vertices]
    return min(values) if sense == MIN else max(values)


def random_fraction(rng: random.Random, lo=-5, hi=5, den=4) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))
