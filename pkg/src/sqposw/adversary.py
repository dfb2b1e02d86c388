"""Attacks and soundness experiments.

* ``forge``: with the factorization of Delta, any exponent rho' can be
  committed and opened without labeling anything.
* ``cheat_solve`` / ``soundness_experiment``: a prover that skipped an
  alpha fraction of the leaves escapes t uniform challenges with
  probability (1 - alpha)^t.
* ``root_game_harness``: the l-th root game with two reference strategies.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import gmpy2

from . import accumulator as acc
from .errors import InverseUndefined
from .graph import labeling_order, leaves, node_index
from .oracle import Oracle
from .params import NODE_TAG, ModulusSetup, PublicParams
from .posw import Commitment, ProofItem, label_subtree, sample_challenges, verify
from .primes import random_prime


@dataclass(frozen=True)
class Trapdoor:
    p: int
    q: int

    def __post_init__(self):
        if self.p <= 1 or self.q <= 1:
            raise ValueError("trapdoor factors must exceed 1")

    @property
    def delta(self) -> int:
        return self.p * self.q

    @property
    def totient(self) -> int:
        return (self.p - 1) * (self.q - 1)

    @classmethod
    def from_setup(cls, setup: ModulusSetup) -> "Trapdoor":
        if setup.trapdoor is None:
            raise ValueError("modulus setup did not retain its trapdoor")
        return cls(*setup.trapdoor)

    def root(self, w: int, ell: int) -> int:
        """The ell-th root of w mod Delta."""
        try:
            e = pow(ell, -1, self.totient)
        except ValueError:
            raise InverseUndefined(f"{ell} is not invertible mod the group order") from None
        return int(gmpy2.powmod(w, e, self.delta))


def honest_labels(pp: PublicParams, oracle: Oracle) -> dict[str, int]:
    labels: dict[str, int] = {}
    label_subtree(oracle, pp.n, labels.__setitem__)
    return labels


def forge(
    pp: PublicParams,
    trapdoor: Trapdoor,
    x: bytes,
    rho_prime: int,
    gamma: Sequence[str],
    *,
    labels: dict[str, int] | None = None,
) -> tuple[Commitment, list[ProofItem]]:
    """Commit to p0^rho_prime and answer ``gamma`` using the group order.

    Each witness is p0^(rho_prime / p_leaf mod phi(Delta)). The parent labels
    handed out are honest ones (pass ``labels`` to reuse a labeling).
    """
    if trapdoor.delta != pp.delta:
        raise ValueError("trapdoor does not factor this modulus")
    oracle = Oracle.for_params(pp, x)
    if labels is None:
        labels = honest_labels(pp, oracle)
    p0 = oracle.base_label(pp.n)
    order = trapdoor.totient
    phi = int(gmpy2.powmod(p0, rho_prime, pp.delta))
    proofs = []
    for leaf in gamma:
        sigma = tuple(labels[leaf[:j] + "0"] for j, b in enumerate(leaf) if b == "1")
        p = labels[leaf]
        if math.gcd(p, order) != 1:
            raise InverseUndefined(f"leaf label {p} divides the group order; resample")
        e = rho_prime * pow(p, -1, order) % order
        proofs.append(ProofItem(sigma=sigma, tau=int(gmpy2.powmod(p0, e, pp.delta))))
    commitment = Commitment(x=bytes(x), N=pp.N, phi=phi, params_digest=pp.digest_bytes())
    return commitment, proofs


@dataclass
class CheatState:
    corrupted: frozenset[str]
    labels: dict[str, int] = field(repr=False)
    junk: dict[str, int] = field(repr=False)
    p0: int = 0
    rho: int = 1

    def accumulated(self, v: str) -> int:
        return self.junk.get(v, self.labels[v])


def cheat_solve(
    pp: PublicParams,
    x: bytes,
    alpha: float,
    rng: random.Random,
    *,
    labels: dict[str, int] | None = None,
) -> tuple[Commitment, CheatState]:
    """Accumulate fresh junk primes in place of the labels of a random
    floor(alpha * 2^n) leaves; every other label is honest.

    ``labels`` may carry a precomputed honest labeling of (pp, x).
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    oracle = Oracle.for_params(pp, x)
    if labels is None:
        labels = honest_labels(pp, oracle)
    k = math.floor(alpha * (1 << pp.n))
    corrupted = frozenset(rng.sample(list(leaves(pp.n)), k))
    junk = {}
    for v in sorted(corrupted):
        p = random_prime(pp.lam, rng)
        while p == labels[v]:
            p = random_prime(pp.lam, rng)
        junk[v] = p
    p0 = oracle.base_label(pp.n)
    seq = [junk.get(v, labels[v]) for v in labeling_order(pp.n)]
    phi, rho = acc.accumulate_all(p0, seq, pp.delta)
    state = CheatState(corrupted=corrupted, labels=labels, junk=junk, p0=p0, rho=rho)
    return Commitment(x=bytes(x), N=pp.N, phi=phi, params_digest=pp.digest_bytes()), state


def cheat_open(pp: PublicParams, state: CheatState, gamma: Sequence[str]) -> list[ProofItem]:
    """Honest parent labels; witnesses for whatever was accumulated."""
    order = list(labeling_order(pp.n))
    seq = [state.accumulated(v) for v in order]
    pos = {leaf: node_index(leaf, pp.n) - 1 for leaf in set(gamma)}
    wit = acc.witnesses_split(state.p0, seq, pos.values(), pp.delta)
    out = []
    for leaf in gamma:
        sigma = tuple(state.labels[leaf[:j] + "0"] for j, b in enumerate(leaf) if b == "1")
        out.append(ProofItem(sigma=sigma, tau=wit[pos[leaf]]))
    return out


@dataclass(frozen=True)
class SoundnessResult:
    alpha: float
    t: int
    trials: int
    accepted: int
    detected_challenges: int
    corrupted_fraction: float

    @property
    def rate(self) -> float:
        return self.accepted / self.trials

    @property
    def expected(self) -> float:
        return (1 - self.alpha) ** self.t

    @property
    def expected_exact(self) -> float:
        """Escape probability for the realized corrupted fraction floor(alpha 2^n)/2^n."""
        return (1 - self.corrupted_fraction) ** self.t

    @property
    def sigma(self) -> float:
        e = self.expected
        return math.sqrt(e * (1 - e) / self.trials)


def soundness_experiment(
    pp: PublicParams,
    alpha: float,
    t: int,
    trials: int,
    seed: int,
    *,
    x: bytes = b"soundness-experiment",
) -> SoundnessResult:
    """Fraction of trials in which a cheat state passes t uniform challenges.

    The honest labeling of ``x`` is computed once and shared; every trial
    draws its own corrupted set, junk labels and challenges from a per-trial
    RNG derived from ``seed``.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    tpp = PublicParams(lam=pp.lam, n=pp.n, delta=pp.delta, t=t)
    oracle = Oracle.for_params(tpp, x)
    labels = honest_labels(tpp, oracle)
    accepted = detected = 0
    for trial in range(trials):
        rng = random.Random(f"{seed}:{trial}")
        commitment, state = cheat_solve(tpp, x, alpha, rng, labels=labels)
        gamma = sample_challenges(tpp, rng)
        detected += sum(leaf in state.corrupted for leaf in gamma)
        proofs = cheat_open(tpp, state, gamma)
        if verify(tpp, x, commitment.N, commitment.phi, gamma, proofs, oracle=oracle):
            accepted += 1
    fraction = math.floor(alpha * (1 << pp.n)) / (1 << pp.n)
    return SoundnessResult(alpha, t, trials, accepted, detected, fraction)


class RootStrategy(Protocol):
    def commit(self, pp: PublicParams) -> int: ...

    def respond(self, pp: PublicParams, ell: int) -> int: ...


class RandomGuessStrategy:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def commit(self, pp):
        return self.rng.randrange(2, pp.delta)

    def respond(self, pp, ell):
        return self.rng.randrange(1, pp.delta)


class TrapdoorStrategy:
    """Knows the group order, so it can take any root of its own w."""

    def __init__(self, trapdoor: Trapdoor, rng: random.Random):
        self.trapdoor = trapdoor
        self.rng = rng
        self._w: int | None = None

    def commit(self, pp):
        while True:
            w = self.rng.randrange(2, pp.delta)
            if math.gcd(w, pp.delta) == 1:
                self._w = w
                return w

    def respond(self, pp, ell):
        return self.trapdoor.root(self._w, ell)


def root_game_harness(pp: PublicParams, strategy: RootStrategy, rng: random.Random) -> bool:
    """One round: the strategy commits to w != 1, a random lambda-bit prime ell
    is drawn through the oracle, and the strategy wins iff v^ell = w."""
    w = strategy.commit(pp) % pp.delta
    if w == 1:
        raise ValueError("w = 1 is excluded from the game")
    seed = rng.getrandbits(128).to_bytes(16, "big")
    ell = Oracle.for_params(pp, b"root-game").hash_to_prime(NODE_TAG, seed)
    v = strategy.respond(pp, ell)
    return int(gmpy2.powmod(v, ell, pp.delta)) == w
