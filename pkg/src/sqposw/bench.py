"""Query-count and timing comparison between the single-query scheme and the
CP baseline on the same labeled graph."""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import asdict, dataclass, fields

from . import baseline, codec, posw
from .oracle import Oracle, read_trace, traced
from .params import PublicParams

SINGLE_QUERY = "single-query"
CP_BASELINE = "cp-baseline"


@dataclass(frozen=True)
class BenchRow:
    scheme: str
    n: int
    lam: int
    modulus_bits: int
    t: int
    solve_queries: int
    verify_queries_total: int
    verify_queries_per_challenge: int
    solve_seconds: float
    verify_seconds: float
    proof_bytes: int
    accepted: bool


CSV_FIELDS = [f.name for f in fields(BenchRow)]


def _per_challenge(trace, t: int) -> int:
    counts = {trace.per_label.get(f"challenge:{i}", 0) for i in range(t)}
    # a non-uniform count would be a bug; surface the worst case
    return max(counts)


def bench_depth(pp: PublicParams, x: bytes, rng: random.Random) -> list[BenchRow]:
    gamma = posw.sample_challenges(pp, rng)

    oracle = traced(Oracle.for_params(pp, x))
    t0 = time.perf_counter()
    commitment, state = posw.solve(pp, x, oracle=oracle)
    solve_s = time.perf_counter() - t0
    solve_q = read_trace(oracle).total
    proofs = posw.open(pp, x, state, gamma)
    vo = traced(Oracle.for_params(pp, x))
    t0 = time.perf_counter()
    verdict = posw.verify(pp, x, commitment.N, commitment.phi, gamma, proofs, oracle=vo)
    verify_s = time.perf_counter() - t0
    vt = read_trace(vo)
    single = BenchRow(
        SINGLE_QUERY, pp.n, pp.lam, pp.modulus_bits, pp.t, solve_q, vt.total,
        _per_challenge(vt, pp.t), solve_s, verify_s,
        len(codec.encode_proofs(proofs, pp)), bool(verdict),
    )

    co = traced(Oracle.for_params(pp, x))
    t0 = time.perf_counter()
    cp = baseline.cp_commit(pp, x, oracle=co)
    cp_solve_s = time.perf_counter() - t0
    items = [baseline.cp_open(cp, leaf) for leaf in gamma]
    cvo = traced(Oracle.for_params(pp, x))
    t0 = time.perf_counter()
    ok = all(
        baseline.cp_verify(pp, x, cp.root, leaf, item, oracle=cvo, attribution=f"challenge:{i}")
        for i, (leaf, item) in enumerate(zip(gamma, items))
    )
    cp_verify_s = time.perf_counter() - t0
    cvt = read_trace(cvo)
    cp_row = BenchRow(
        CP_BASELINE, pp.n, pp.lam, pp.modulus_bits, pp.t, read_trace(co).total, cvt.total,
        _per_challenge(cvt, pp.t), cp_solve_s, cp_verify_s,
        sum(len(codec.encode_cp_proof_item(i, pp)) + 4 for i in items), ok,
    )
    return [single, cp_row]


def run_bench(delta: int, lam: int, depths, t: int, seed: int = 0, x: bytes = b"bench") -> list[BenchRow]:
    rng = random.Random(seed)
    rows = []
    for n in depths:
        rows += bench_depth(PublicParams(lam=lam, n=n, delta=delta, t=t), x, rng)
    return rows


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        d = asdict(r)
        d["solve_seconds"] = f"{r.solve_seconds:.6f}"
        d["verify_seconds"] = f"{r.verify_seconds:.6f}"
        w.writerow(d)
    return buf.getvalue()


def to_text(rows) -> str:
    head = f"{'scheme':<13}{'n':>4}{'t':>5}{'solve q':>10}{'verify q':>10}{'q/chal':>8}{'solve s':>10}{'verify s':>10}{'bytes':>9}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r.scheme:<13}{r.n:>4}{r.t:>5}{r.solve_queries:>10}{r.verify_queries_total:>10}"
            f"{r.verify_queries_per_challenge:>8}{r.solve_seconds:>10.3f}{r.verify_seconds:>10.4f}{r.proof_bytes:>9}"
        )
    return "\n".join(lines)
