"""Compare solver values against full-matrix brute force on random instances.

    python3 scripts/crosscheck.py --trials 200 --seed 1
"""

import argparse
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from bilinear_games import blotto, duels
from bilinear_games.ratlp import matrix_game_solve


@dataclass
class CrosscheckConfig:
    trials: int = 100
    seed: int = 0
    max_k: int = 3
    max_troops: int = 5
    max_pages: int = 4


def blotto_case(rng, cfg):
    k = rng.randint(1, cfg.max_k)
    a, b = rng.randint(0, cfg.max_troops), rng.randint(0, cfg.max_troops)
    mats = tuple(tuple(tuple(Fraction(rng.randint(-2, 2)) for _ in range(b + 1))
                       for _ in range(a + 1)) for _ in range(k))
    spec = blotto.BlottoSpec(a, b, k, mats)
    X, Y = list(blotto.partitions(a, k)), list(blotto.partitions(b, k))
    M = [[blotto.blotto_payoff_pure(spec, x, y) for y in Y] for x in X]
    return f"blotto k={k} a={a} b={b}", blotto.solve_blotto(spec).value, M


def duel_case(rng, cfg):
    m = rng.randint(1, cfg.max_pages)
    raw = [rng.randint(1, 6) for _ in range(m)]
    variant = rng.choice((duels.RANKING, duels.BST))
    spec = duels.DuelSpec(variant, tuple(Fraction(w, sum(raw)) for w in raw))
    pures = list(permutations(range(m))) if variant == duels.RANKING else duels.all_bsts(m)
    M = [[duels.duel_payoff_pure(spec, x, y) for y in pures] for x in pures]
    return f"{variant} duel m={m}", duels.solve_duel(spec).value, M


def main(cfg: CrosscheckConfig) -> int:
    rng = random.Random(cfg.seed)
    mismatches = 0
    for t in range(cfg.trials):
        label, value, M = (blotto_case if t % 2 == 0 else duel_case)(rng, cfg)
        brute = matrix_game_solve(M)[0]
        if value != brute:
            mismatches += 1
            print(f"MISMATCH {label}: solver {value} vs brute force {brute}")
    print(f"{cfg.trials} instances, {mismatches} mismatches")
    return int(mismatches > 0)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(CrosscheckConfig()).items():
        parser.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    raise SystemExit(main(CrosscheckConfig(**vars(parser.parse_args()))))
