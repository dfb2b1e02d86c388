"""Monte Carlo escape rate of a partial-work prover over an (alpha, t) grid.

Prints the measured rate next to (1 - alpha)^t, the realized-fraction value
and the 3-sigma band.
"""

import argparse
import time
from dataclasses import dataclass, field

from sqposw import adversary
from sqposw.params import PublicParams, gen_modulus


@dataclass
class Config:
    n: int = 8
    lam: int = 64
    modulus_bits: int = 512
    trials: int = 2000
    seed: int = 7
    grid: list[tuple[float, int]] = field(default_factory=lambda: [(0.5, 10), (0.1, 20), (0.25, 4), (0.05, 40)])


def main() -> None:
    cfg = Config()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=cfg.n)
    ap.add_argument("--trials", type=int, default=cfg.trials)
    ap.add_argument("--seed", type=int, default=cfg.seed)
    args = ap.parse_args()

    delta = gen_modulus(cfg.modulus_bits, seed=args.seed).delta
    pp = PublicParams(lam=cfg.lam, n=args.n, delta=delta, t=1)
    print(f"{'alpha':>6} {'t':>3} {'rate':>9} {'(1-a)^t':>9} {'exact':>9} {'3 sigma':>9} {'ok':>3} {'secs':>6}")
    for alpha, t in cfg.grid:
        t0 = time.perf_counter()
        r = adversary.soundness_experiment(pp, alpha, t, args.trials, seed=args.seed)
        ok = abs(r.rate - r.expected) <= 3 * r.sigma
        print(f"{alpha:>6} {t:>3} {r.rate:>9.5f} {r.expected:>9.5f} {r.expected_exact:>9.5f} "
              f"{3 * r.sigma:>9.5f} {'yes' if ok else 'no':>3} {time.perf_counter() - t0:>6.1f}")


if __name__ == "__main__":
    main()
