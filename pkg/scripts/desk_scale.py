"""Wall-clock of solve / open / verify at desk scale (default n=16, 2048-bit).

Slow: solving n=16 at lambda=128 takes a couple of minutes, and a literal
opening costs about as much again.
"""

import argparse
import random
import time
from dataclasses import dataclass

from sqposw import posw
from sqposw.params import PublicParams, gen_modulus


@dataclass
class Config:
    n: int = 16
    lam: int = 128
    modulus_bits: int = 2048
    t: int = 1
    store_depth: int = 0
    seed: int = 12


def timed(fn, *a, **kw):
    t0 = time.perf_counter()
    out = fn(*a, **kw)
    return out, time.perf_counter() - t0


def main() -> None:
    cfg = Config()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name in ("n", "lam", "modulus_bits", "t", "store_depth", "seed"):
        ap.add_argument("--" + name.replace("_", "-"), type=int, default=getattr(cfg, name))
    args = ap.parse_args()

    ms, gen_s = timed(gen_modulus, args.modulus_bits, seed=args.seed)
    pp = PublicParams(lam=args.lam, n=args.n, delta=ms.delta, t=args.t)
    x = b"desk-scale"
    print(pp.describe())
    print(f"modulus generation  {gen_s:8.2f} s")
    (c, state), solve_s = timed(posw.solve, pp, x, store_depth=args.store_depth)
    print(f"solve               {solve_s:8.2f} s  (N = {pp.N})")
    gamma = posw.sample_challenges(pp, random.Random(args.seed))
    proofs, open_s = timed(posw.open, pp, x, state, gamma)
    print(f"open                {open_s:8.2f} s  (t = {pp.t}, store depth {args.store_depth})")
    verdict, verify_s = timed(posw.verify, pp, x, c.N, c.phi, gamma, proofs)
    print(f"verify              {verify_s * 1000:8.2f} ms ({verify_s * 1000 / pp.t:.2f} ms per challenge) -> {verdict}")


if __name__ == "__main__":
    main()
