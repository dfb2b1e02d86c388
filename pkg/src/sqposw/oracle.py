"""Statement-keyed random oracle, hash-to-prime, Fiat-Shamir leaf sampling,
and query instrumentation."""

from __future__ import annotations

import contextlib
import copy
import hashlib
import struct
import threading
from collections import Counter
from dataclasses import dataclass, field

from .errors import CounterExhausted, UnknownTag
from .params import BASE_TAG, DEFAULT_TAGS, DIGEST_ID, FS_TAG, NODE_TAG, PublicParams
from .primes import is_probable_prime

MAX_COUNTER = 1 << 16
_COUNTER_BYTES = [c.to_bytes(8, "big") for c in range(4096)]


def _counter(c: int) -> bytes:
    return _COUNTER_BYTES[c] if c < 4096 else c.to_bytes(8, "big")

# Attribution tag for the per-statement base label.
BASE_ATTRIBUTION = "base"


@dataclass
class QueryTrace:
    """Counts of oracle queries.

    ``total`` counts logical label queries to the statement oracle (one per
    hash-to-prime call, retries folded in). ``per_label`` splits them by the
    attribution in force when the call was made; calls outside any
    attribution land in ``unattributed``. Fiat-Shamir samples go to a
    separate oracle and are counted in ``fiat_shamir``; ``raw_digests``
    counts every underlying digest evaluation of either oracle.
    """

    total: int = 0
    per_label: Counter = field(default_factory=Counter)
    unattributed: int = 0
    fiat_shamir: int = 0
    raw_digests: int = 0

    def check(self) -> None:
        assert self.total == sum(self.per_label.values()) + self.unattributed

    def snapshot(self) -> "QueryTrace":
        return QueryTrace(self.total, Counter(self.per_label), self.unattributed, self.fiat_shamir, self.raw_digests)


class Oracle:
    """H_x: the random oracle keyed by statement ``x``.

    Digests are SHAKE-256 over a length-prefixed encoding of
    (domain tag, statement, message), so distinct tags or statements never
    share a preimage.
    """

    def __init__(self, x: bytes, lam: int, tags: dict[str, bytes] | None = None, digest: str = DIGEST_ID):
        if digest != DIGEST_ID:
            raise ValueError(f"unsupported digest {digest!r}")
        self.x = bytes(x)
        self.lam = lam
        self.digest_id = digest
        self.tags = dict(tags if tags is not None else DEFAULT_TAGS)
        self._prefix = {}
        for name, value in self.tags.items():
            h = hashlib.shake_256()
            h.update(struct.pack(">H", len(value)) + value)
            h.update(struct.pack(">Q", len(self.x)) + self.x)
            self._prefix[name] = h
        self.trace: QueryTrace | None = None
        self._lock = threading.Lock()
        self._local = threading.local()

    @classmethod
    def for_params(cls, pp: PublicParams, x: bytes) -> "Oracle":
        return cls(x, pp.lam, pp.tags, pp.digest)

    def _state(self, tag: str):
        try:
            return self._prefix[tag]
        except KeyError:
            raise UnknownTag(tag) from None

    # -- instrumentation -------------------------------------------------

    @contextlib.contextmanager
    def attribute(self, label: str):
        prev = getattr(self._local, "label", None)
        self._local.label = label
        try:
            yield
        finally:
            self._local.label = prev

    def _logical(self, tag: str) -> None:
        tr = self.trace
        if tr is None:
            return
        with self._lock:
            if tag == FS_TAG:
                tr.fiat_shamir += 1
                return
            tr.total += 1
            label = getattr(self._local, "label", None)
            if label is None:
                tr.unattributed += 1
            else:
                tr.per_label[label] += 1

    def _raw(self, k: int = 1) -> None:
        if self.trace is not None:
            with self._lock:
                self.trace.raw_digests += k

    # -- queries ---------------------------------------------------------

    def _digest_int(self, h, bits: int) -> int:
        nbytes = (bits + 7) // 8
        return int.from_bytes(h.digest(nbytes), "big") >> (8 * nbytes - bits)

    def digest(self, tag: str, message: bytes, bits: int | None = None) -> int:
        """One oracle query: a ``bits``-bit integer (default lambda)."""
        h = self._state(tag).copy()
        h.update(message)
        self._logical(tag)
        self._raw()
        return self._digest_int(h, bits or self.lam)

    def hash_to_prime_with_counter(self, tag: str, message: bytes) -> tuple[int, int]:
        """First lambda-bit prime among digest(message || c) with the top bit
        forced, for c = 0, 1, ...; c is an 8-byte big-endian counter."""
        base = self._state(tag).copy()
        base.update(message)
        lam = self.lam
        top = 1 << (lam - 1)
        nbytes = (lam + 7) // 8
        shift = 8 * nbytes - lam
        self._logical(tag)
        copy, from_bytes = base.copy, int.from_bytes
        for c in range(MAX_COUNTER + 1):
            h = copy()
            h.update(_COUNTER_BYTES[c] if c < 4096 else _counter(c))
            d = (from_bytes(h.digest(nbytes), "big") >> shift) | top
            if d & 1 and is_probable_prime(d):
                self._raw(c + 1)
                return d, c
        self._raw(MAX_COUNTER + 1)
        raise CounterExhausted(f"no prime within {MAX_COUNTER + 1} counters; digest is broken")

    def hash_to_prime(self, tag: str, message: bytes) -> int:
        return self.hash_to_prime_with_counter(tag, message)[0]

    def base_label(self, n: int) -> int:
        # canonical encoding of the leaf 0^n
        msg = bytes([n]) + bytes((n + 7) // 8)
        with self.attribute(BASE_ATTRIBUTION):
            return self.hash_to_prime(BASE_TAG, msg)

    def node_label(self, index: int, parent_labels) -> int:
        width = (self.lam + 7) // 8
        msg = index.to_bytes(8, "big") + b"".join(p.to_bytes(width, "big") for p in parent_labels)
        return self.hash_to_prime(NODE_TAG, msg)

    def sample_leaf(self, phi: int, i: int, n: int, element_bytes: int) -> str:
        """Fiat-Shamir challenge ``i`` (1-based) as an n-bit leaf string.

        Rejection sampling on the low 8*ceil(n/8) bits of digest(phi || i || c).
        """
        width = 8 * ((n + 7) // 8)
        prefix = phi.to_bytes(element_bytes, "big") + i.to_bytes(8, "big")
        base = self._state(FS_TAG).copy()
        base.update(prefix)
        self._logical(FS_TAG)
        bound = 1 << n
        for c in range(MAX_COUNTER + 1):
            h = base.copy()
            h.update(_counter(c))
            v = self._digest_int(h, max(width, self.lam)) & ((1 << width) - 1)
            if v < bound:
                self._raw(c + 1)
                return format(v, f"0{n}b")
        raise CounterExhausted("leaf sampling did not terminate")


def traced(oracle: Oracle) -> Oracle:
    """A copy of ``oracle`` that records queries into a fresh QueryTrace."""
    t = copy.copy(oracle)
    t.trace = QueryTrace()
    t._lock = threading.Lock()
    t._local = threading.local()
    return t


def read_trace(oracle: Oracle) -> QueryTrace:
    if oracle.trace is None:
        raise ValueError("oracle is not traced")
    return oracle.trace


def queries(trace: QueryTrace, raw: bool = False) -> int:
    """Logical query count, or every digest evaluation when ``raw``."""
    return trace.raw_digests if raw else trace.total
