"""Command-line entry point.

Exit codes: 0 success / accept, 1 reject or failed attack, 2 usage error,
3 malformed input or protocol failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import random
import socket
import sys
from pathlib import Path

from . import adversary, bench, codec, posw, wire
from .errors import InvalidParams, PoswError
from .oracle import Oracle
from .params import ModulusMode, PublicParams, gen, gen_modulus

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3
CONFIG_ENV = "PSW_CONFIG"
PORT_ENV = "PSW_PORT"

DEFAULTS = dict(lam=64, depth=10, t=16, modulus_bits=512)

log = logging.getLogger("sqposw")


class UsageError(Exception):
    pass


def _param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("parameters")
    g.add_argument("--params", type=Path, help="parameter file from `gen`")
    g.add_argument("--lambda", dest="lam", type=int, default=DEFAULTS["lam"])
    g.add_argument("--depth", "-n", dest="depth", type=int, default=DEFAULTS["depth"])
    g.add_argument("--t", type=int, default=DEFAULTS["t"])
    g.add_argument("--modulus-bits", type=int, default=DEFAULTS["modulus_bits"])
    g.add_argument("--profile", type=int, help="log2 N security profile; sizes the modulus from the table")
    g.add_argument("--modulus-mode", choices=[m.value for m in ModulusMode if m is not ModulusMode.EXTERNAL])
    g.add_argument("--modulus-hex", help="externally supplied modulus")
    g.add_argument("--seed", type=int)


def _prover_flags(p):
    p.add_argument("--store-depth", type=int, help="levels of labels the prover keeps (default: all)")
    p.add_argument("--witness-method", choices=posw.WITNESS_METHODS)


def _statement(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--statement", help="statement as UTF-8 text")
    g.add_argument("--statement-hex", help="statement as hex")


def _get_statement(args) -> bytes:
    if getattr(args, "statement_hex", None):
        return bytes.fromhex(args.statement_hex)
    return args.statement.encode()


def _load_params(args) -> PublicParams:
    if args.params:
        return codec.decode_params(args.params.read_bytes())
    if args.modulus_hex:
        delta = int(args.modulus_hex, 16)
        ms = gen_modulus(delta.bit_length(), ModulusMode.EXTERNAL, external=delta)
        return gen(args.lam, args.depth, args.t, modulus=ms)
    return gen(
        args.lam, args.depth, args.t, args.modulus_mode,
        modulus_bits=None if args.profile else args.modulus_bits,
        profile=args.profile, seed=args.seed,
    )


def _write(path: Path | None, data: bytes, what: str) -> None:
    if path is None:
        raise UsageError(f"--out is required to write the {what}")
    path.write_bytes(data)
    print(f"wrote {what} to {path} ({len(data)} bytes)")


def _verdict_exit(v: posw.Verdict) -> int:
    if v:
        print("ACCEPT")
        return EXIT_OK
    where = "" if v.index is None else f" at challenge {v.index}"
    print(f"REJECT ({v.reason}){where}")
    return EXIT_REJECT


# -- commands -------------------------------------------------------------------


def cmd_gen(args) -> int:
    pp = _load_params(args)
    print(pp.describe())
    if args.out:
        _write(args.out, codec.encode_params(pp), "parameters")
    return EXIT_OK


def cmd_solve(args) -> int:
    pp = _load_params(args)
    x = _get_statement(args)
    commitment, state = posw.solve(pp, x, store_depth=args.store_depth)
    print(f"phi = 0x{commitment.phi:x}")
    _write(args.out, codec.encode_proof_file(codec.ProofFile("interactive", commitment), pp), "commitment")
    if args.state is None:
        raise UsageError("--state is required to keep the prover state")
    _write(args.state, codec.encode_state(state, pp), "prover state")
    return EXIT_OK


def cmd_challenge(args) -> int:
    pp = _load_params(args)
    rng = random.Random(args.seed) if args.seed is not None else None
    if args.connect:
        host, _, port = args.connect.rpartition(":")
        with socket.create_connection((host or "127.0.0.1", int(port)), timeout=args.timeout) as sock:
            res = wire.session_verifier(sock, pp, rng=rng, timeout=args.timeout)
        return _verdict_exit(res.verdict)
    if args.input is None:
        raise UsageError("challenge needs --in (commitment file) or --connect")
    pf = codec.decode_proof_file(args.input.read_bytes(), pp)
    gamma = posw.sample_challenges(pp, rng)
    pf = codec.ProofFile("interactive", pf.commitment, tuple(gamma))
    _write(args.out, codec.encode_proof_file(pf, pp), "challenges")
    return EXIT_OK


def cmd_open(args) -> int:
    pp = _load_params(args)
    if args.input is None or args.state is None:
        raise UsageError("open needs --in and --state")
    pf = codec.decode_proof_file(args.input.read_bytes(), pp)
    state = codec.decode_state(args.state.read_bytes(), pp)
    if args.fiat_shamir:
        gamma, proofs = posw.open_noninteractive(pp, pf.commitment, state, method=args.witness_method)
        mode = "fiat-shamir"
    else:
        if not pf.challenges:
            raise UsageError("no challenges in the input file; run `challenge` first or pass --fiat-shamir")
        gamma = list(pf.challenges)
        proofs = posw.open(pp, pf.commitment.x, state, gamma, method=args.witness_method)
        mode = "interactive"
    _write(args.out, codec.encode_proof_file(codec.ProofFile(mode, pf.commitment, tuple(gamma), tuple(proofs)), pp), "proof")
    return EXIT_OK


def cmd_verify(args) -> int:
    pp = _load_params(args)
    if args.input is None:
        raise UsageError("verify needs --in")
    pf = codec.decode_proof_file(args.input.read_bytes(), pp)
    return _verdict_exit(posw.verify_commitment(pp, pf.commitment, list(pf.challenges), list(pf.proofs)))


def cmd_prove(args) -> int:
    pp = _load_params(args)
    commitment, gamma, proofs = posw.prove_noninteractive(
        pp, _get_statement(args), store_depth=args.store_depth, method=args.witness_method
    )
    pf = codec.ProofFile("fiat-shamir", commitment, tuple(gamma), tuple(proofs))
    _write(args.out, codec.encode_proof_file(pf, pp), "proof")
    return EXIT_OK


def cmd_verify_ni(args) -> int:
    pp = _load_params(args)
    if args.input is None:
        raise UsageError("verify-ni needs --in")
    pf = codec.decode_proof_file(args.input.read_bytes(), pp)
    if pf.challenges and list(pf.challenges) != posw.fiat_shamir_challenges(pp, pf.commitment):
        print("REJECT (stale challenges)")
        return EXIT_REJECT
    return _verdict_exit(posw.verify_noninteractive(pp, pf.commitment, list(pf.proofs)))


def cmd_bench(args) -> int:
    ms = gen_modulus(args.modulus_bits, args.modulus_mode, seed=args.seed)
    rows = bench.run_bench(ms.delta, args.lam, args.depths, args.t, seed=args.seed or 0)
    print(bench.to_text(rows))
    if args.csv:
        args.csv.write_text(bench.to_csv(rows))
        print(f"wrote {args.csv}")
    return EXIT_OK if all(r.accepted for r in rows) else EXIT_REJECT


def cmd_attack(args) -> int:
    if not args.retain_trapdoor:
        raise UsageError("the forgery needs the modulus factors: pass --retain-trapdoor (test mode only)")
    rng = random.Random(args.seed)
    setup = gen_modulus(args.modulus_bits, args.modulus_mode, retain_trapdoor=True, seed=args.seed)
    trapdoor = adversary.Trapdoor.from_setup(setup)
    pp = gen(args.lam, args.depth, args.t, modulus=setup)
    x = _get_statement(args) if (args.statement or args.statement_hex) else b"forged-statement"
    honest, _ = posw.solve(pp, x)
    labels = adversary.honest_labels(pp, Oracle.for_params(pp, x))
    wins = 0
    for trial in range(args.trials):
        rho_prime = rng.getrandbits(256) | 1
        gamma = posw.sample_challenges(pp, rng)
        commitment, proofs = adversary.forge(pp, trapdoor, x, rho_prime, gamma, labels=labels)
        v = posw.verify_commitment(pp, commitment, gamma, proofs)
        ok = bool(v) and commitment.phi != honest.phi
        wins += ok
        print(f"trial {trial}: rho' = 0x{rho_prime:x}")
        print(f"  forged phi' = 0x{commitment.phi:x}")
        print(f"  honest phi  = 0x{honest.phi:x}")
        print(f"  challenges  = {' '.join(gamma)}")
        print(f"  verifier    = {'ACCEPT' if v else 'REJECT'}")
    if wins == args.trials:
        print(f"ATTACK-SUCCEEDED: {wins}/{args.trials} forgeries accepted without labeling the graph")
        return EXIT_OK
    print(f"ATTACK-FAILED: {wins}/{args.trials} forgeries accepted")
    return EXIT_REJECT


SOUNDNESS_FIELDS = ["alpha", "t", "trials", "rate", "expected", "sigma", "n"]


def cmd_soundness(args) -> int:
    ms = gen_modulus(args.modulus_bits, args.modulus_mode, seed=args.seed)
    pp = PublicParams(lam=args.lam, n=args.depth, delta=ms.delta, t=1)
    fh = sys.stdout if args.csv is None else args.csv.open("w", newline="")
    try:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(SOUNDNESS_FIELDS)
        for alpha in args.alpha:
            for t in args.ts:
                r = adversary.soundness_experiment(pp, alpha, t, args.trials, seed=args.seed or 0)
                out.writerow([alpha, t, r.trials, f"{r.rate:.6f}", f"{r.expected:.6f}", f"{r.sigma:.6f}", pp.n])
                fh.flush()
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_serve(args) -> int:
    pp = _load_params(args)
    x = _get_statement(args)
    solved = posw.solve(pp, x, store_depth=args.store_depth)
    port = args.port if args.port is not None else int(os.environ.get(PORT_ENV, wire.DEFAULT_PORT))
    with socket.create_server((args.host, port)) as srv:
        print(f"serving statement {x!r} on {args.host}:{srv.getsockname()[1]}", flush=True)
        while True:
            conn, peer = srv.accept()
            with conn:
                try:
                    res = wire.session_prover(conn, pp, x, solved=solved, method=args.witness_method, timeout=args.timeout)
                    print(f"{peer}: {'accept' if res.verdict else 'reject'}", flush=True)
                except PoswError as e:
                    print(f"{peer}: session aborted: {e}", flush=True)
            if args.once:
                return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sqposw", description="Single-query-verifiable proof of sequential work")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=fn)
        _param_flags(p)
        return p

    p = add("gen", cmd_gen, "generate public parameters")
    p.add_argument("--out", type=Path)

    p = add("solve", cmd_solve, "label the graph and commit")
    _statement(p)
    _prover_flags(p)
    p.add_argument("--out", type=Path, help="commitment file")
    p.add_argument("--state", type=Path, help="prover state file")

    p = add("challenge", cmd_challenge, "sample challenges, or challenge a serving prover")
    p.add_argument("--in", dest="input", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--connect", help="HOST:PORT of a prover started with `serve`")
    p.add_argument("--timeout", type=float, default=wire.DEFAULT_TIMEOUT)

    p = add("open", cmd_open, "answer challenges")
    _prover_flags(p)
    p.add_argument("--in", dest="input", type=Path)
    p.add_argument("--state", type=Path)
    p.add_argument("--fiat-shamir", action="store_true", help="derive challenges from the commitment")
    p.add_argument("--out", type=Path)

    p = add("verify", cmd_verify, "verify an interactive proof file")
    p.add_argument("--in", dest="input", type=Path)

    p = add("prove", cmd_prove, "solve and open non-interactively")
    _statement(p)
    _prover_flags(p)
    p.add_argument("--out", type=Path)

    p = add("verify-ni", cmd_verify_ni, "verify a non-interactive proof file")
    p.add_argument("--in", dest="input", type=Path)

    p = sub.add_parser("bench", help="query counts vs the CP baseline")
    p.set_defaults(func=cmd_bench)
    p.add_argument("--depth", "-n", dest="depths", type=int, nargs="+", default=[6, 10])
    p.add_argument("--lambda", dest="lam", type=int, default=DEFAULTS["lam"])
    p.add_argument("--t", type=int, default=DEFAULTS["t"])
    p.add_argument("--modulus-bits", type=int, default=DEFAULTS["modulus_bits"])
    p.add_argument("--modulus-mode", choices=["safe-primes", "strong-primes"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", type=Path)

    p = add("attack", cmd_attack, "forge proofs with a retained modulus trapdoor")
    _statement(p, required=False)
    p.add_argument("--retain-trapdoor", action="store_true")
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(depth=4, t=4, modulus_bits=256, seed=0)

    p = sub.add_parser("soundness", help="Monte Carlo escape rate of an alpha-cheating prover")
    p.set_defaults(func=cmd_soundness)
    p.add_argument("--alpha", type=float, nargs="+", default=[0.5, 0.1])
    p.add_argument("--t", dest="ts", type=int, nargs="+", default=[10, 20])
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--depth", "-n", dest="depth", type=int, default=8)
    p.add_argument("--lambda", dest="lam", type=int, default=DEFAULTS["lam"])
    p.add_argument("--modulus-bits", type=int, default=DEFAULTS["modulus_bits"])
    p.add_argument("--modulus-mode", choices=["safe-primes", "strong-primes"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", type=Path)

    p = add("serve", cmd_serve, "run a prover that answers verifier connections")
    _statement(p)
    _prover_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, help=f"TCP port (default ${PORT_ENV} or {wire.DEFAULT_PORT})")
    p.add_argument("--timeout", type=float, default=wire.DEFAULT_TIMEOUT)
    p.add_argument("--once", action="store_true", help="exit after one session")
    return ap


def _apply_config(ap: argparse.ArgumentParser) -> None:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return
    cfg = json.loads(Path(path).read_text())
    for action in ap._subparsers._group_actions:
        for sp in action.choices.values():
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in cfg.items() if k in known})


def main(argv=None) -> int:
    ap = build_parser()
    _apply_config(ap)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidParams) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PoswError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
