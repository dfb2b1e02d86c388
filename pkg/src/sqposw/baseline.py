"""Merkle-style CP baseline: commit to the root label, verify a challenge by
recomputing the leaf and then every ancestor up to the root (n + 1 oracle
queries per challenge). Exists for query-count comparison only."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import node_index, path_siblings
from .oracle import Oracle
from .params import PublicParams
from .posw import Verdict, label_subtree


@dataclass(frozen=True)
class CpProofItem:
    sigma: tuple[int, ...]
    path: tuple[int, ...]


@dataclass
class CpState:
    root: int
    labels: dict[str, int]
    n: int


def cp_commit(pp: PublicParams, x: bytes, *, oracle: Oracle | None = None) -> CpState:
    oracle = oracle or Oracle.for_params(pp, x)
    labels: dict[str, int] = {}
    root = label_subtree(oracle, pp.n, labels.__setitem__)
    return CpState(root=root, labels=labels, n=pp.n)


def cp_open(state: CpState, leaf: str) -> CpProofItem:
    n = state.n
    if len(leaf) != n:
        raise ValueError(f"{leaf!r} is not a leaf")
    sigma = tuple(state.labels[leaf[:j] + "0"] for j, b in enumerate(leaf) if b == "1")
    path = tuple(state.labels[sib] for _, sib in path_siblings(leaf, n))
    return CpProofItem(sigma=sigma, path=path)


def cp_verify(
    pp: PublicParams,
    x: bytes,
    root: int,
    leaf: str,
    item: CpProofItem,
    *,
    oracle: Oracle | None = None,
    attribution: str = "challenge:0",
) -> Verdict:
    """Recompute the leaf label from sigma, then climb to the root.

    A rejection's ``index`` is the depth where the inconsistency surfaced:
    a right-turn sibling that disagrees with sigma, or 0 for a root mismatch.
    """
    oracle = oracle or Oracle.for_params(pp, x)
    n = pp.n
    if len(leaf) != n or len(item.path) != n or len(item.sigma) != leaf.count("1"):
        return Verdict(False, None, "structure")
    # left siblings on the path are exactly sigma, root side first
    left_sibs = iter(reversed(item.sigma))
    with oracle.attribute(attribution):
        cur = oracle.node_label(node_index(leaf, n), item.sigma)
        for (ancestor, sib), sib_label in zip(path_siblings(leaf, n), item.path):
            if sib.endswith("0"):
                if sib_label != next(left_sibs):
                    return Verdict(False, len(sib), "sibling-mismatch")
                pair = (sib_label, cur)
            else:
                pair = (cur, sib_label)
            cur = oracle.node_label(node_index(ancestor, n), pair)
    if cur != root:
        return Verdict(False, 0, "root-mismatch")
    return Verdict(True)
