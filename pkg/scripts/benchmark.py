"""Time the double-oracle solver on a ladder of sign-payoff instances.

    python3 scripts/benchmark.py --max-k 10 --max-troops 30
"""

import argparse
import time
from dataclasses import dataclass

from bilinear_games import blotto, duels, lotto
from fractions import Fraction


@dataclass
class BenchmarkConfig:
    max_k: int = 10
    max_troops: int = 30
    lotto_b: int = 3
    lotto_threshold: int = 2
    duel_size: int = 6


def run(label, solve):
    started = time.perf_counter()
    r = solve()
    elapsed = time.perf_counter() - started
    print(f"{label:<34} value={str(r.value):>10}  iters={r.stats['iterations']:>4}  "
          f"support={len(r.strategy_A)}/{len(r.strategy_B)}  {elapsed:7.2f}s")


def main(cfg: BenchmarkConfig):
    for k in range(2, cfg.max_k + 1, 2):
        for n in range(10, cfg.max_troops + 1, 10):
            spec = blotto.BlottoSpec.with_sign_payoffs(n, n, k)
            run(f"blotto k={k} a=b={n}", lambda: blotto.solve_blotto(spec))
    for k in (2, 3, 4):
        spec = blotto.LottoSpec.with_sign_payoff(12, 10, k)
        run(f"colonel lotto k={k} a=12 b=10", lambda: blotto.solve_colonel_lotto(spec))
    values = [Fraction(d, cfg.lotto_threshold)
              for d in range(-cfg.lotto_threshold, cfg.lotto_threshold + 1)]
    u = lotto.BoundedDistanceFn.from_values(values, cfg.lotto_threshold)
    for a in range(cfg.lotto_b + 1):
        spec = lotto.GeneralLottoSpec(a, cfg.lotto_b, u)
        run(f"general lotto a={a} b={cfg.lotto_b} uT={cfg.lotto_threshold}",
            lambda: lotto.solve_general_lotto(spec))
    m = cfg.duel_size
    probs = tuple(Fraction(1, m) for _ in range(m))
    for variant in (duels.RANKING, duels.BST):
        spec = duels.DuelSpec(variant, probs)
        run(f"{variant} duel m={m}", lambda: duels.solve_duel(spec))


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(BenchmarkConfig()).items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    main(BenchmarkConfig(**vars(parser.parse_args())))
