from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinear_games.duels import (
    BST,
    MATCHING,
    RANKING,
    DuelSpec,
    Graph,
    all_bsts,
    all_perfect_matchings,
    bst_marginal,
    bst_oracle,
    duel_oracle,
    duel_payoff_form,
    duel_payoff_pure,
    is_bst_depths,
    matching_marginal,
    matching_oracle,
    ranking_marginal,
    ranking_oracle,
    solve_duel,
)
from bilinear_games.errors import (
    InfeasibleStrategySpaceError,
    MalformedInputError,
    ResourceLimitError,
)
from bilinear_games.solver import MAX, MIN, best_response

F = Fraction

K4 = Graph((1, 2, 3, 4), ((1, 2, 5), (3, 4, 5), (1, 3, 1), (2, 4, 1), (1, 4, 0), (2, 3, 0)))


def uniform(n):
    return tuple(F(1, n) for _ in range(n))


def table_score(alpha, cells):
    return sum(alpha[i][j] for i, j in cells)


class TestRankingOracle:
    def test_small(self):
        assert ranking_oracle([[0, 5], [1, 0]], MIN) == (0, 1)

    def test_single(self):
        assert ranking_oracle([[7]]) == (0,)

    def test_diagonal(self):
        eye = [[int(i == j) for j in range(3)] for i in range(3)]
        assert ranking_oracle(eye, MAX) == (0, 1, 2)

    def test_non_square(self):
        with pytest.raises(MalformedInputError):
            ranking_oracle([[1, 2]])

    def test_matches_enumeration(self, rng):
        for _ in range(100):
            m = rng.randint(1, 5)
            alpha = [[F(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(m)] for _ in range(m)]
            for sense, pick in ((MIN, min), (MAX, max)):
                pos = ranking_oracle(alpha, sense)
                best = pick(table_score(alpha, enumerate(p)) for p in permutations(range(m)))
                assert table_score(alpha, enumerate(pos)) == best


class TestBstOracle:
    def test_two_keys(self):
        assert bst_oracle([[1, 0], [0, 2]], MAX) == (1, 2)

    def test_single(self):
        assert bst_oracle([[3]]) == (1,)

    def test_balanced(self):
        alpha = [[0, 0, 0], [1, 0, 0], [0, 0, 0]]
        assert bst_oracle(alpha, MAX) == (2, 1, 2)

    def test_catalan_counts(self):
        assert [len(all_bsts(m)) for m in range(1, 7)] == [1, 2, 5, 14, 42, 132]
        assert all(is_bst_depths(t) for t in all_bsts(5))
        assert not is_bst_depths((1, 1))

    def test_matches_enumeration(self, rng):
        for _ in range(100):
            m = rng.randint(1, 6)
            alpha = [[F(rng.randint(-9, 9)) for _ in range(m)] for _ in range(m)]
            for sense, pick in ((MIN, min), (MAX, max)):
                depths = bst_oracle(alpha, sense)
                assert is_bst_depths(depths)
                best = pick(table_score(alpha, ((i, d - 1) for i, d in enumerate(t))) for t in all_bsts(m))
                assert table_score(alpha, ((i, d - 1) for i, d in enumerate(depths))) == best


class TestMatchingOracle:
    def test_k4(self):
        assert matching_oracle(K4, [5, 5, 1, 1, 0, 0], MAX) == (0, 1)

    def test_single_edge(self):
        assert matching_oracle(Graph(("u", "v"), (("u", "v", 2),)), [0]) == (0,)

    def test_path_is_forced(self):
        path = Graph((1, 2, 3, 4), ((1, 2, 1), (2, 3, 1), (3, 4, 1)))
        assert matching_oracle(path, [0, -100, 0]) == (0, 2)

    def test_no_perfect_matching(self):
        star = Graph((0, 1, 2, 3), ((0, 1, 1), (0, 2, 1), (0, 3, 1)))
        with pytest.raises(InfeasibleStrategySpaceError):
            matching_oracle(star, [0, 0, 0])
        with pytest.raises(InfeasibleStrategySpaceError):
            matching_oracle(Graph((0, 1, 2), ((0, 1, 1),)), [0])

    def test_cap(self):
        nodes = tuple(range(22))
        g = Graph(nodes, tuple((i, i + 1, 1) for i in range(0, 22, 2)))
        with pytest.raises(ResourceLimitError):
            matching_oracle(g, [0] * 11)

    def test_graph_validation(self):
        with pytest.raises(MalformedInputError):
            Graph((1, 2), ((1, 1, 0),))
        with pytest.raises(MalformedInputError):
            Graph((1, 2), ((1, 2, 0), (2, 1, 3)))
        with pytest.raises(MalformedInputError):
            Graph((1, 2), ((1, 3, 0),))

    def test_matches_enumeration(self, rng):
        for _ in range(100):
            n = rng.choice((2, 4, 6, 8))
            edges = [(i, j, 0) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.7]
            g = Graph(tuple(range(n)), tuple(edges))
            costs = [F(rng.randint(-9, 9)) for _ in edges]
            every = all_perfect_matchings(g)
            for sense, pick in ((MIN, min), (MAX, max)):
                if not every:
                    with pytest.raises(InfeasibleStrategySpaceError):
                        matching_oracle(g, costs, sense)
                    continue
                got = matching_oracle(g, costs, sense)
                assert sum(costs[e] for e in got) == pick(sum(costs[e] for e in m) for m in every)


class TestPayoff:
    def test_split_pages(self):
        spec = DuelSpec(RANKING, uniform(2))
        assert duel_payoff_pure(spec, (0, 1), (1, 0)) == 0

    def test_only_first_page_matters(self):
        spec = DuelSpec(RANKING, (1, 0))
        form = duel_payoff_form(spec)
        assert form.eval(ranking_marginal((0, 1)), ranking_marginal((1, 0))) == 1

    @pytest.mark.parametrize("spec, marginal, pures", [
        (DuelSpec(RANKING, (F(1, 2), F(1, 3), F(1, 6))), ranking_marginal,
         list(permutations(range(3)))),
        (DuelSpec(BST, (F(1, 2), F(1, 4), F(1, 8), F(1, 8))), bst_marginal, all_bsts(4)),
    ])
    def test_eval_matches_definition(self, spec, marginal, pures):
        form = duel_payoff_form(spec)
        for x in pures:
            assert form.eval(marginal(x), marginal(x)) == 0
            for y in pures:
                assert form.eval(marginal(x), marginal(y)) == duel_payoff_pure(spec, x, y)

    def test_matching_eval_matches_definition(self):
        spec = DuelSpec(MATCHING, (F(1, 2), F(1, 4), F(1, 8), F(1, 8)), K4)
        form = duel_payoff_form(spec)
        every = all_perfect_matchings(K4)
        for x in every:
            for y in every:
                got = form.eval(matching_marginal(K4, x), matching_marginal(K4, y))
                assert got == duel_payoff_pure(spec, x, y)

    def test_spec_validation(self):
        with pytest.raises(MalformedInputError):
            DuelSpec(RANKING, (F(1, 2), F(1, 3)))
        with pytest.raises(MalformedInputError):
            DuelSpec("chess", (1,))
        with pytest.raises(MalformedInputError):
            DuelSpec(MATCHING, (1,))


class TestSolveDuel:
    def test_ranking_two_pages(self):
        spec = DuelSpec(RANKING, uniform(2))
        r = solve_duel(spec)
        assert r.value == 0 and r.gap_A == 0 and r.gap_B == 0
        # Each ordering wins one page and loses the other, so the full
        # matrix is zero and every mixture is a maximin strategy.
        perms = list(permutations(range(2)))
        assert all(duel_payoff_pure(spec, x, y) == 0 for x in perms for y in perms)

    def test_bst(self):
        assert solve_duel(DuelSpec(BST, (F(1, 3), F(2, 3)))).value == 0

    def test_matching(self):
        r = solve_duel(DuelSpec(MATCHING, (F(1, 10), F(2, 10), F(3, 10), F(4, 10)), K4))
        assert r.value == 0 and r.gap_A == 0 and r.gap_B == 0

    @pytest.mark.parametrize("spec", [
        DuelSpec(RANKING, (F(1, 2), F(1, 4), F(1, 8), F(1, 16), F(1, 16))),
        DuelSpec(BST, (F(1, 5), F(1, 10), F(3, 10), F(1, 5), F(1, 5))),
    ])
    def test_certificate_and_doubly_stochastic(self, spec):
        r = solve_duel(spec)
        m = spec.size
        game_form = duel_payoff_form(spec)
        _, against = best_response(game_form, duel_oracle(spec), r.strategy_A.marginal(), "B")
        assert r.value == 0 and against == 0
        x = r.strategy_A.marginal()
        for i in range(m):
            assert sum(x[i * m:(i + 1) * m]) == 1
        if spec.variant == RANKING:
            for j in range(m):
                assert sum(x[i * m + j] for i in range(m)) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.data())
def test_ranking_skew_symmetry(m, data):
    raw = data.draw(st.lists(st.integers(0, 5), min_size=m, max_size=m).filter(lambda v: sum(v) > 0))
    spec = DuelSpec(RANKING, tuple(F(v, sum(raw)) for v in raw))
    form = duel_payoff_form(spec)
    perms = list(permutations(range(m)))
    x = data.draw(st.sampled_from(perms))
    y = data.draw(st.sampled_from(perms))
    assert form.eval(ranking_marginal(x), ranking_marginal(y)) == \
        -form.eval(ranking_marginal(y), ranking_marginal(x))
