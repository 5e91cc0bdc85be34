"""Tabulate General Lotto values and equilibrium structure for small budgets.

    python3 scripts/lotto_table.py --max-budget 3 --threshold 2
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from bilinear_games import lotto


@dataclass
class LottoTableConfig:
    max_budget: int = 3
    threshold: int = 1


def main(cfg: LottoTableConfig):
    uT = cfg.threshold
    if uT == 1:
        u = lotto.BoundedDistanceFn.sign()
    else:
        u = lotto.BoundedDistanceFn.from_values([Fraction(d, uT) for d in range(-uT, uT + 1)], uT)
    print(f"{'a':>3} {'b':>3} {'value':>10} {'|S|':>5} {'max supp A':>11} {'max supp B':>11} {'P_B(<a)':>9}")
    for b in range(cfg.max_budget + 1):
        for a in range(b + 1):
            spec = lotto.GeneralLottoSpec(a, b, u)
            r = lotto.solve_general_lotto(spec)
            S = lotto.general_lotto_support(spec)
            X = lotto.mixture_distribution(S, r.strategy_A)
            Y = lotto.mixture_distribution(S, r.strategy_B)
            low = lotto.cumulative(Y, a - 1) if a else 0
            print(f"{a:>3} {b:>3} {str(r.value):>10} {len(S):>5} {max(X.support):>11} "
                  f"{max(Y.support):>11} {str(low):>9}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-budget", type=int, default=3)
    parser.add_argument("--threshold", type=int, default=1)
    main(LottoTableConfig(**vars(parser.parse_args())))
