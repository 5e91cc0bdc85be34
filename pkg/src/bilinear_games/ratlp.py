"""Exact rational linear programming.

A dense tableau simplex that never rounds: the tableau is kept in integer
(fraction-free) form, where every entry is an integer and the true value is
``entry / D`` for the current pivot denominator ``D``.  Each pivot divides
exactly, so numbers stay as small as the basis determinants allow and no gcd
work is needed inside the inner loop.

Pivoting follows Bland's rule (lowest eligible entering column, lowest basic
index among ratio-test ties), which terminates without perturbation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .errors import MalformedInputError

LE, EQ, GE = "<=", "==", ">="
MAXIMIZE, MINIMIZE = "max", "min"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` of ``objective . x`` subject to ``constraints`` and ``bounds``.

    ``bounds`` holds one ``(lower, upper)`` pair per variable; ``None`` means
    that side is unbounded.  Nothing is implicitly nonnegative.
    """

    objective: tuple
    constraints: tuple
    bounds: tuple
    sense: str = MAXIMIZE

    @classmethod
    def build(cls, objective, constraints, bounds=None, sense=MAXIMIZE):
        """Convenience constructor converting numbers to ``Fraction``.

        ``constraints`` is an iterable of ``(coeffs, relation, rhs)``; when
        ``bounds`` is omitted every variable is nonnegative.
        """
        objective = tuple(Fraction(c) for c in objective)
        rows = tuple(
            Constraint(tuple(Fraction(a) for a in coeffs), rel, Fraction(rhs))
            for coeffs, rel, rhs in constraints
        )
        if bounds is None:
            bounds = [(0, None)] * len(objective)
        bounds = tuple(
            (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))
            for lo, hi in bounds
        )
        return cls(objective, rows, bounds, sense)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpOutcome:
    status: Status
    x: Optional[tuple] = None
    value: Optional[Fraction] = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _validate(lp: LinearProgram) -> None:
    n = len(lp.objective)
    if lp.sense not in (MAXIMIZE, MINIMIZE):
        raise MalformedInputError(f"unknown sense {lp.sense!r}")
    if len(lp.bounds) != n:
        raise MalformedInputError(f"expected {n} bounds, got {len(lp.bounds)}")
    for k, row in enumerate(lp.constraints):
        if len(row.coeffs) != n:
            raise MalformedInputError(
                f"constraint {k} has {len(row.coeffs)} coefficients, expected {n}"
            )
        if row.relation not in (LE, EQ, GE):
            raise MalformedInputError(f"constraint {k}: unknown relation {row.relation!r}")


def _integer_row(values: Sequence[Fraction]) -> list:
    scale = 1
    for v in values:
        scale = lcm(scale, Fraction(v).denominator)
    return [int(Fraction(v) * scale) for v in values]


class _Tableau:
    """Fraction-free simplex tableau for ``max`` problems.

    Row 0 holds ``D * reduced cost`` per column and ``D * z`` in the last
    slot; rows ``1..m`` hold ``D * (B^-1 A | B^-1 b)``.  ``basis[i]`` is the
    basic column of row ``i + 1``.
    """

    def __init__(self, rows: list, basis: list):
        self.T = rows
        self.basis = basis
        self.D = 1
        self.pivots = 0

    def pivot(self, r: int, s: int) -> None:
        T, D = self.T, self.D
        prow = T[r]
        p = prow[s]
        for i in range(len(T)):
            if i == r:
                continue
            row = T[i]
            f = row[s]
            if f == 0:
                T[i] = [v * p // D for v in row]
            else:
                T[i] = [(v * p - f * w) // D for v, w in zip(row, prow)]
        self.D = p
        if p < 0:
            self.T = [[-v for v in row] for row in T]
            self.D = -p
        self.basis[r - 1] = s
        self.pivots += 1

    def run(self, enterable: Sequence[bool]) -> bool:
        """Iterate to optimality; returns False when the objective is unbounded."""
        ncols = len(enterable)
        while True:
            obj = self.T[0]
            s = next((j for j in range(ncols) if enterable[j] and obj[j] < 0), None)
            if s is None:
                return True
            best = None
            for i in range(1, len(self.T)):
                a = self.T[i][s]
                if a <= 0:
                    continue
                if best is None:
                    best = i
                    continue
                lhs = self.T[i][-1] * self.T[best][s]
                rhs = self.T[best][-1] * a
                if lhs < rhs or (lhs == rhs and self.basis[i - 1] < self.basis[best - 1]):
                    best = i
            if best is None:
                return False
            self.pivot(best, s)

    def value_of(self, row: int) -> Fraction:
        return Fraction(self.T[row][-1], self.D)


def lp_solve(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly with a two-phase simplex."""
    _validate(lp)

    # Rewrite every variable as a combination of nonnegative columns.
    var_map = []  # (offset, [(column, sign), ...])
    extra_rows = []
    ncols = 0
    for lo, hi in lp.bounds:
        if lo is not None and hi is not None and hi < lo:
            return LpOutcome(Status.INFEASIBLE)
        if lo is not None:
            var_map.append((lo, [(ncols, 1)]))
            if hi is not None:
                extra_rows.append((ncols, hi - lo))
            ncols += 1
        elif hi is not None:
            var_map.append((hi, [(ncols, -1)]))
            ncols += 1
        else:
            var_map.append((Fraction(0), [(ncols, 1), (ncols + 1, -1)]))
            ncols += 2

    rows = []  # (coeffs over structural columns, relation, rhs)
    for con in lp.constraints:
        coeffs = [Fraction(0)] * ncols
        rhs = Fraction(con.rhs)
        for j, a in enumerate(con.coeffs):
            if a == 0:
                continue
            offset, cols = var_map[j]
            rhs -= a * offset
            for col, sign in cols:
                coeffs[col] += sign * a
        rows.append((coeffs, con.relation, rhs))
    for col, width in extra_rows:
        coeffs = [Fraction(0)] * ncols
        coeffs[col] = Fraction(1)
        rows.append((coeffs, LE, width))

    flip = {LE: GE, GE: LE, EQ: EQ}
    norm = []
    for coeffs, rel, rhs in rows:
        if rhs < 0:
            coeffs, rel, rhs = [-a for a in coeffs], flip[rel], -rhs
        norm.append((coeffs, rel, rhs))

    n_slack = sum(1 for _, rel, _ in norm if rel != EQ)
    n_art = sum(1 for _, rel, _ in norm if rel != LE)
    width = ncols + n_slack + n_art
    art_start = ncols + n_slack

    # Each row is scaled to integers; its slack or artificial keeps the unit
    # coefficient (that auxiliary variable is rescaled instead), so the
    # starting basis is the identity and D = 1.
    T = [[0] * (width + 1)]
    basis = []
    slack = ncols
    art = art_start
    for coeffs, rel, rhs in norm:
        row = _integer_row(list(coeffs) + [rhs])
        full = row[:-1] + [0] * (n_slack + n_art) + [row[-1]]
        if rel == LE:
            full[slack] = 1
            basis.append(slack)
            slack += 1
        else:
            if rel == GE:
                full[slack] = -1
                slack += 1
            full[art] = 1
            basis.append(art)
            art += 1
        T.append(full)
    tab = _Tableau(T, basis)

    is_art = [j >= art_start for j in range(width)]
    if n_art:
        # max -sum(artificials): price the basic artificials out of row 0.
        for i, b in enumerate(tab.basis, start=1):
            if is_art[b]:
                tab.T[0] = [o - v for o, v in zip(tab.T[0], tab.T[i])]
        for j in range(art_start, width):
            tab.T[0][j] = 0
        tab.run([True] * width)
        if _phase_one_infeasible(tab, is_art):
            return LpOutcome(Status.INFEASIBLE)
        for i in range(1, len(tab.T)):
            if not is_art[tab.basis[i - 1]]:
                continue
            s = next((j for j in range(art_start) if tab.T[i][j] != 0), None)
            if s is not None:
                tab.pivot(i, s)

    sign = 1 if lp.sense == MAXIMIZE else -1
    c = [Fraction(0)] * width
    for j, cj in enumerate(lp.objective):
        if cj == 0:
            continue
        _, cols = var_map[j]
        for col, sgn in cols:
            c[col] += sign * sgn * cj
    c_int = _integer_row(c)
    D = tab.D
    obj = [-cj * D for cj in c_int] + [0]
    for i, b in enumerate(tab.basis, start=1):
        cb = c_int[b]
        if cb:
            obj = [o + cb * v for o, v in zip(obj, tab.T[i])]
    tab.T[0] = obj
    enterable = [not a for a in is_art]
    if not tab.run(enterable):
        return LpOutcome(Status.UNBOUNDED)

    col_val = [Fraction(0)] * width
    for i, b in enumerate(tab.basis, start=1):
        col_val[b] = tab.value_of(i)
    x = []
    for offset, cols in var_map:
        x.append(offset + sum(sgn * col_val[col] for col, sgn in cols))
    value = sum((cj * xj for cj, xj in zip(lp.objective, x)), Fraction(0))
    return LpOutcome(Status.OPTIMAL, tuple(x), value)


def _phase_one_infeasible(tab: _Tableau, is_art: Sequence[bool]) -> bool:
    total = Fraction(0)
    for i, b in enumerate(tab.basis, start=1):
        if is_art[b]:
            total += tab.value_of(i)
    return total > 0


def matrix_game_solve(payoff):
    """Exact value and optimal strategies of a zero-sum matrix game.

    ``payoff[i][j]`` is the row player's (player A's) gain.  Returns
    ``(value, p, q)`` with ``p`` the row player's maximin strategy and ``q``
    the column player's minimax strategy, all as ``Fraction``.
    """
    M = [[Fraction(v) for v in row] for row in payoff]
    if not M or not M[0]:
        raise MalformedInputError("payoff matrix is empty")
    n = len(M[0])
    if any(len(row) != n for row in M):
        raise MalformedInputError("payoff matrix is ragged")
    m = len(M)

    shift = 1 - min(min(row) for row in M)
    scale = 1
    for row in M:
        for v in row:
            scale = lcm(scale, v.denominator)
    # max sum(q') s.t. N q' <= scale, q' >= 0 with N = scale * (M + shift) >= scale.
    T = [[-1] * n + [0] * m + [0]]
    for i, row in enumerate(M):
        r = [int((v + shift) * scale) for v in row] + [0] * m + [scale]
        r[n + i] = 1
        T.append(r)
    tab = _Tableau(T, [n + i for i in range(m)])
    tab.run([True] * (n + m))

    D = tab.D
    z = tab.value_of(0)
    q = [Fraction(0)] * n
    for i, b in enumerate(tab.basis, start=1):
        if b < n:
            q[b] = tab.value_of(i) / z
    p = [Fraction(tab.T[0][n + i] * scale, D) / z for i in range(m)]
    value = 1 / z - shift
    return value, p, q
