"""The CP graph: a complete binary tree of depth n with upward edges, plus an
edge from every left sibling on a leaf's root path into that leaf.

Nodes are bit strings ("" is the root, leaves have length n). Node indices
are 1-based positions in the post-order labeling sequence.
"""

from __future__ import annotations

from typing import Iterator

from .errors import MalformedInput


def subtree_size(depth: int, n: int) -> int:
    return (1 << (n - depth + 1)) - 1


def node_index(v: str, n: int) -> int:
    """1-based position of ``v`` in ``labeling_order(n)``."""
    idx = subtree_size(len(v), n)
    for j, b in enumerate(v):
        if b == "1":
            # the whole left-sibling subtree precedes v
            idx += subtree_size(j + 1, n)
    return idx


def parents(v: str, n: int) -> list[str]:
    if len(v) < n:
        return [v + "0", v + "1"]
    return [v[:j] + "0" for j, b in enumerate(v) if b == "1"]


def is_leaf(v: str, n: int) -> bool:
    return len(v) == n


def leaves(n: int) -> Iterator[str]:
    for i in range(1 << n):
        yield format(i, f"0{n}b")


def labeling_order(n: int, root: str = "") -> Iterator[str]:
    """Post-order traversal of the subtree at ``root``."""
    if len(root) == n:
        yield root
        return
    # iterative post-order to avoid generator-recursion overhead
    stack = [(root, False)]
    while stack:
        v, expanded = stack.pop()
        if len(v) == n or expanded:
            yield v
        else:
            stack.append((v, True))
            stack.append((v + "1", False))
            stack.append((v + "0", False))


def path_siblings(u: str, n: int) -> list[tuple[str, str]]:
    """(ancestor, sibling of the node climbed from) for each step leaf -> root."""
    out = []
    for k in range(n, 0, -1):
        c = u[:k]
        out.append((c[:-1], c[:-1] + ("1" if c[-1] == "0" else "0")))
    return out


def max_memory_frontier(n: int) -> int:
    """Peak number of labels held while labeling in post-order, where a label
    is dropped as soon as its last consumer has been labeled."""
    remaining: dict[str, int] = {}
    live: set[str] = set()
    peak = 0
    for v in labeling_order(n):
        for p in parents(v, n):
            remaining[p] -= 1
            if remaining[p] == 0:
                live.discard(p)
        consumers = _consumer_count(v, n)
        if consumers:
            remaining[v] = consumers
        live.add(v)
        peak = max(peak, len(live))
    return peak


def _consumer_count(v: str, n: int) -> int:
    if v == "":
        # the root's label is the output; keep it
        return 1 << 62
    count = 1  # its tree parent
    if v.endswith("0"):
        # leaves below the right sibling whose path turns right here
        count += 1 << (n - len(v))
    return count


def encode_node(v: str, n: int) -> bytes:
    """1 depth byte + ceil(n/8) bytes holding the bits left-aligned."""
    nbytes = (n + 7) // 8
    bits = int(v, 2) << (8 * nbytes - len(v)) if v else 0
    return bytes([len(v)]) + bits.to_bytes(nbytes, "big")


def decode_node(data: bytes, n: int, offset: int = 0) -> str:
    nbytes = (n + 7) // 8
    if len(data) - offset < 1 + nbytes:
        raise MalformedInput("truncated node id", offset)
    depth = data[offset]
    if depth > n:
        raise MalformedInput(f"node depth {depth} exceeds n={n}", offset)
    value = int.from_bytes(data[offset + 1 : offset + 1 + nbytes], "big")
    pad = 8 * nbytes - depth
    if value & ((1 << pad) - 1):
        raise MalformedInput("non-zero padding bits in node id", offset)
    return format(value >> pad, f"0{depth}b") if depth else ""
