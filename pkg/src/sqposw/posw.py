"""Solve / Open / Verify for the single-query-verifiable proof of sequential
work, plus the Fiat-Shamir non-interactive wrapper."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import gmpy2

from . import accumulator as acc
from .errors import LabelCollision, LabelModulusCollision, NotMember
from .graph import labeling_order, node_index, subtree_size
from .oracle import Oracle
from .params import PublicParams

LITERAL = "literal"
SPLIT = "split"
WITNESS_METHODS = (LITERAL, SPLIT)


@dataclass(frozen=True)
class Commitment:
    x: bytes
    N: int
    phi: int
    params_digest: bytes


@dataclass(frozen=True)
class ProofItem:
    sigma: tuple[int, ...]
    tau: int


@dataclass
class ProverState:
    """What the prover keeps after solving: the base label, the exponent and
    the labels of every node at depth <= m."""

    p0: int
    rho: int
    m: int
    store: dict[str, int] = field(repr=False)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    index: int | None = None
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


ACCEPT = Verdict(True)


def label_subtree(
    oracle: Oracle,
    n: int,
    emit: Callable[[str, int], None],
    root: str = "",
    left_labels: Sequence[int] = (),
) -> int:
    """Label the subtree at ``root`` in post-order, calling ``emit(node, label)``
    for each node; returns the label of ``root``.

    ``left_labels`` are the labels of the left siblings on the path from the
    graph root down to ``root`` (root side first); leaves below ``root``
    inherit them as their first parents. Only the current path's labels are
    live at any time.
    """
    index = node_index(root, n) - subtree_size(len(root), n) + 1
    sib = list(left_labels)

    def rec(v: str) -> int:
        nonlocal index
        if len(v) == n:
            lab = oracle.node_label(index, sib)
        else:
            left = rec(v + "0")
            sib.append(left)
            right = rec(v + "1")
            sib.pop()
            lab = oracle.node_label(index, (left, right))
        index += 1
        emit(v, lab)
        return lab

    return rec(root)


def _left_labels(v: str, lookup: Callable[[str], int]) -> list[int]:
    return [lookup(v[:j] + "0") for j, b in enumerate(v) if b == "1"]


def solve(
    pp: PublicParams,
    x: bytes,
    *,
    store_depth: int | None = None,
    oracle: Oracle | None = None,
    fast: bool = False,
    check_collisions: bool = True,
) -> tuple[Commitment, ProverState]:
    """Label the graph, accumulate every label into phi = p0^rho mod Delta.

    ``store_depth`` m keeps the 2^(m+1) - 1 labels of the top m levels
    (default: all of them). ``fast`` defers exponentiation to one big power
    at the end; the default exponentiates label by label.
    """
    if not x:
        raise ValueError("statement must be non-empty")
    oracle = oracle or Oracle.for_params(pp, x)
    n, delta = pp.n, pp.delta
    m = n if store_depth is None else store_depth
    if not 0 <= m <= n:
        raise ValueError(f"store depth must be in [0, {n}]")

    p0 = oracle.base_label(n)
    if math.gcd(p0, delta) != 1:
        raise LabelModulusCollision("base label shares a factor with the modulus")
    mod = gmpy2.mpz(delta)
    phi = gmpy2.mpz(p0) % mod
    rho = acc.ProductAccumulator()
    deferred: list[int] = []
    store: dict[str, int] = {}
    seen: set[int] | None = set() if check_collisions and pp.lam >= 32 else None

    def emit(v: str, lab: int) -> None:
        nonlocal phi
        if math.gcd(lab, delta) != 1:
            raise LabelModulusCollision(f"label of node {v!r} shares a factor with the modulus")
        if seen is not None:
            if lab in seen:
                raise LabelCollision(f"label of node {v!r} repeats an earlier label")
            seen.add(lab)
        if fast:
            deferred.append(lab)
        else:
            phi = gmpy2.powmod(phi, lab, mod)
            rho.add(lab)
        if len(v) <= m:
            store[v] = lab

    label_subtree(oracle, n, emit)
    if fast:
        phi_int, rho_int = acc.accumulate_all(p0, deferred, delta, fast=True)
    else:
        phi_int, rho_int = int(phi), rho.value()
    commitment = Commitment(x=bytes(x), N=pp.N, phi=phi_int, params_digest=pp.digest_bytes())
    return commitment, ProverState(p0=p0, rho=rho_int, m=m, store=store)


def sample_challenges(pp: PublicParams, rng: random.Random | None = None) -> list[str]:
    """t uniform leaves, with repetition."""
    rng = rng or random.SystemRandom()
    return [format(rng.getrandbits(pp.n), f"0{pp.n}b") for _ in range(pp.t)]


def _recover_labels(pp, oracle, state, gamma, full: bool) -> dict[str, int]:
    """Labels needed to answer ``gamma``: from the store where possible,
    otherwise by relabeling (the whole graph if ``full``, else only the
    subtrees hanging below depth m that contain a challenge)."""
    n, m = pp.n, state.m
    if m == n:
        return state.store
    known: dict[str, int] = dict(state.store)

    def keep(v, lab):
        known[v] = lab

    if full:
        label_subtree(oracle, n, keep)
        return known
    for a in sorted({leaf[:m] for leaf in gamma}):
        if a + "0" in known or len(a) == n:
            continue
        label_subtree(oracle, n, keep, root=a, left_labels=_left_labels(a, known.__getitem__))
    return known


def open(
    pp: PublicParams,
    x: bytes,
    state: ProverState,
    gamma: Sequence[str],
    *,
    method: str | None = None,
    oracle: Oracle | None = None,
) -> list[ProofItem]:
    """Answer each challenged leaf with its parent labels and a membership
    witness tau with tau^(leaf label) = phi."""
    if method is None:
        method = SPLIT if len(gamma) > 1 else LITERAL
    if method not in WITNESS_METHODS:
        raise ValueError(f"unknown witness method {method!r}")
    oracle = oracle or Oracle.for_params(pp, x)
    n, delta = pp.n, pp.delta
    for leaf in gamma:
        if len(leaf) != n or set(leaf) - {"0", "1"}:
            raise ValueError(f"challenge {leaf!r} is not a leaf")

    labels = _recover_labels(pp, oracle, state, gamma, full=(method == SPLIT))

    if method == LITERAL:
        taus = {leaf: acc.witness_literal(state.p0, state.rho, labels[leaf], delta) for leaf in set(gamma)}
    else:
        order = list(labeling_order(n))
        seq = [labels[v] for v in order]
        pos = {leaf: node_index(leaf, n) - 1 for leaf in set(gamma)}
        wit = acc.witnesses_split(state.p0, seq, pos.values(), delta)
        for leaf, i in pos.items():
            # split never divides rho, so check membership explicitly
            if state.rho % seq[i]:
                raise NotMember(f"label of leaf {leaf!r} is not in the accumulated exponent")
        taus = {leaf: wit[i] for leaf, i in pos.items()}

    proofs = []
    for leaf in gamma:
        sigma = tuple(_left_labels(leaf, labels.__getitem__))
        proofs.append(ProofItem(sigma=sigma, tau=taus[leaf]))
    return proofs


def _well_formed(pp: PublicParams, leaf: str, item: ProofItem) -> bool:
    if len(leaf) != pp.n or set(leaf) - {"0", "1"}:
        return False
    if len(item.sigma) != leaf.count("1"):
        return False
    if any(not isinstance(p, int) or p.bit_length() != pp.lam for p in item.sigma):
        return False
    return 0 < item.tau < pp.delta


def verify(
    pp: PublicParams,
    x: bytes,
    N: int,
    phi: int,
    gamma: Sequence[str],
    proofs: Sequence[ProofItem],
    *,
    oracle: Oracle | None = None,
) -> Verdict:
    """One oracle query per challenge: recompute the leaf's label from the
    supplied parent labels, then check tau^label == phi (mod Delta).

    Rejections carry the 0-based index of the first failing challenge.
    """
    oracle = oracle or Oracle.for_params(pp, x)
    if N != pp.N or not 0 < phi < pp.delta:
        return Verdict(False, None, "commitment")
    if len(gamma) != pp.t or len(proofs) != len(gamma):
        return Verdict(False, None, "structure")
    p0 = oracle.base_label(pp.n)
    if math.gcd(p0, pp.delta) != 1:
        return Verdict(False, None, "commitment")
    mod = gmpy2.mpz(pp.delta)
    for i, (leaf, item) in enumerate(zip(gamma, proofs)):
        if not _well_formed(pp, leaf, item):
            return Verdict(False, i, "structure")
        with oracle.attribute(f"challenge:{i}"):
            p = oracle.node_label(node_index(leaf, pp.n), item.sigma)
        if gmpy2.powmod(item.tau, p, mod) != phi:
            return Verdict(False, i, "exponent-check")
    return ACCEPT


def verify_commitment(pp, commitment: Commitment, gamma, proofs, *, oracle=None) -> Verdict:
    if commitment.params_digest != pp.digest_bytes():
        return Verdict(False, None, "params-digest")
    return verify(pp, commitment.x, commitment.N, commitment.phi, gamma, proofs, oracle=oracle)


def fiat_shamir_challenges(pp: PublicParams, commitment: Commitment, *, oracle: Oracle | None = None) -> list[str]:
    oracle = oracle or Oracle.for_params(pp, commitment.x)
    return [oracle.sample_leaf(commitment.phi, i, pp.n, pp.element_bytes) for i in range(1, pp.t + 1)]


def open_noninteractive(pp, commitment: Commitment, state: ProverState, *, method=None, oracle=None):
    gamma = fiat_shamir_challenges(pp, commitment, oracle=oracle)
    return gamma, open(pp, commitment.x, state, gamma, method=method, oracle=oracle)


def prove_noninteractive(
    pp: PublicParams,
    x: bytes,
    *,
    store_depth: int | None = None,
    method: str | None = None,
    oracle: Oracle | None = None,
) -> tuple[Commitment, list[str], list[ProofItem]]:
    commitment, state = solve(pp, x, store_depth=store_depth, oracle=oracle)
    gamma, proofs = open_noninteractive(pp, commitment, state, method=method, oracle=oracle)
    return commitment, gamma, proofs


def verify_noninteractive(pp: PublicParams, commitment: Commitment, proofs, *, oracle: Oracle | None = None) -> Verdict:
    gamma = fiat_shamir_challenges(pp, commitment, oracle=oracle)
    return verify_commitment(pp, commitment, gamma, proofs, oracle=oracle)
