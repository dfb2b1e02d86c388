"""Verifier query counts: single-query scheme vs the CP baseline.

    python scripts/bench_queries.py --depths 6 10 14 --t 16 --csv out.csv
"""

import argparse
from dataclasses import dataclass, field

from sqposw import bench
from sqposw.params import gen_modulus


@dataclass
class Config:
    depths: list[int] = field(default_factory=lambda: [6, 10, 14])
    t: int = 16
    lam: int = 64
    modulus_bits: int = 512
    seed: int = 0


def main() -> None:
    cfg = Config()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", type=int, nargs="+", default=cfg.depths)
    ap.add_argument("--t", type=int, default=cfg.t)
    ap.add_argument("--lam", type=int, default=cfg.lam)
    ap.add_argument("--modulus-bits", type=int, default=cfg.modulus_bits)
    ap.add_argument("--seed", type=int, default=cfg.seed)
    ap.add_argument("--csv", help="also write rows here")
    args = ap.parse_args()

    delta = gen_modulus(args.modulus_bits, seed=args.seed).delta
    rows = bench.run_bench(delta, args.lam, args.depths, args.t, seed=args.seed)
    print(bench.to_text(rows))
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            f.write(bench.to_csv(rows))


if __name__ == "__main__":
    main()
