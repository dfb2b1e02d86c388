"""Canonical binary encodings.

All integers are big-endian and fixed width: labels take ceil(lambda/8)
bytes, group elements ceil(|Delta|/8) bytes, node ids 1 + ceil(n/8) bytes.
Decoders reject anything that would not re-encode to the same bytes.
"""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass

from .baseline import CpProofItem
from .errors import InvalidParams, MalformedInput, ParamsDigestMismatch, VersionMismatch
from .graph import decode_node, encode_node
from .oracle import QueryTrace
from .params import PublicParams
from .posw import Commitment, ProofItem, ProverState
from .primes import is_probable_prime

VERSION = 1
FILE_MAGIC = b"PSWF"
MODE_INTERACTIVE = 0
MODE_FIAT_SHAMIR = 1
MODES = {MODE_INTERACTIVE: "interactive", MODE_FIAT_SHAMIR: "fiat-shamir"}


class Reader:
    def __init__(self, data: bytes, offset: int = 0):
        self.data = memoryview(bytes(data))
        self.pos = offset

    def take(self, k: int) -> bytes:
        if k < 0 or self.pos + k > len(self.data):
            raise MalformedInput(f"truncated input: need {k} bytes", self.pos)
        out = bytes(self.data[self.pos : self.pos + k])
        self.pos += k
        return out

    def uint(self, k: int) -> int:
        return int.from_bytes(self.take(k), "big")

    def end(self) -> None:
        if self.pos != len(self.data):
            raise MalformedInput(f"{len(self.data) - self.pos} trailing bytes", self.pos)


def _label_bytes(p: int, pp: PublicParams) -> bytes:
    return p.to_bytes(pp.label_bytes, "big")


def _read_label(r: Reader, pp: PublicParams) -> int:
    at = r.pos
    p = r.uint(pp.label_bytes)
    if p.bit_length() != pp.lam:
        raise MalformedInput(f"label is not exactly {pp.lam} bits", at)
    if not is_probable_prime(p):
        raise MalformedInput("label is not prime", at)
    return p


def _read_element(r: Reader, pp: PublicParams) -> int:
    at = r.pos
    v = r.uint(pp.element_bytes)
    if not 0 < v < pp.delta:
        raise MalformedInput("group element out of range", at)
    return v


# -- parameters --------------------------------------------------------------


def encode_params(pp: PublicParams) -> bytes:
    return pp.to_bytes()


def decode_params(data: bytes) -> PublicParams:
    r = Reader(data)
    version = r.uint(1)
    if version != VERSION:
        raise VersionMismatch(f"params version {version}", 0)
    lam, n, t = r.uint(2), r.uint(1), r.uint(4)
    digest = r.take(r.uint(1)).decode("ascii", errors="strict")
    bits = r.uint(2)
    at = r.pos
    delta = r.uint((bits + 7) // 8)
    if delta.bit_length() != bits:
        raise MalformedInput("modulus width does not match its declared bit length", at)
    tags = {}
    for _ in range(r.uint(1)):
        name = r.take(r.uint(1)).decode("ascii")
        tags[name] = r.take(r.uint(1))
    r.end()
    try:
        pp = PublicParams(lam=lam, n=n, delta=delta, t=t, digest=digest, tags=tags)
    except InvalidParams as e:
        raise MalformedInput(f"invalid parameters: {e}") from e
    if pp.to_bytes() != bytes(data):
        raise MalformedInput("non-canonical parameter encoding")
    return pp


# -- commitments and challenges ---------------------------------------------


def encode_commitment(c: Commitment, pp: PublicParams) -> bytes:
    return (
        c.params_digest
        + struct.pack(">I", len(c.x))
        + c.x
        + struct.pack(">Q", c.N)
        + c.phi.to_bytes(pp.element_bytes, "big")
    )


def _read_commitment(r: Reader, pp: PublicParams) -> Commitment:
    digest = r.take(32)
    if digest != pp.digest_bytes():
        raise ParamsDigestMismatch("commitment was made under different parameters")
    x = r.take(r.uint(4))
    if not x:
        raise MalformedInput("empty statement", r.pos)
    at = r.pos
    N = r.uint(8)
    if N != pp.N:
        raise MalformedInput(f"node count {N} does not match parameters ({pp.N})", at)
    phi = _read_element(r, pp)
    return Commitment(x=x, N=N, phi=phi, params_digest=digest)


def decode_commitment(data: bytes, pp: PublicParams) -> Commitment:
    r = Reader(data)
    c = _read_commitment(r, pp)
    r.end()
    return c


def encode_challenges(gamma, pp: PublicParams) -> bytes:
    return struct.pack(">I", len(gamma)) + b"".join(encode_node(v, pp.n) for v in gamma)


def _read_challenges(r: Reader, pp: PublicParams) -> list[str]:
    out = []
    for _ in range(r.uint(4)):
        at = r.pos
        v = decode_node(r.take(1 + (pp.n + 7) // 8), pp.n)
        if len(v) != pp.n:
            raise MalformedInput("challenge is not a leaf", at)
        out.append(v)
    return out


def decode_challenges(data: bytes, pp: PublicParams) -> list[str]:
    r = Reader(data)
    g = _read_challenges(r, pp)
    r.end()
    return g


# -- proofs -------------------------------------------------------------------


def encode_proof_item(item: ProofItem, pp: PublicParams) -> bytes:
    return (
        struct.pack(">B", len(item.sigma))
        + b"".join(_label_bytes(p, pp) for p in item.sigma)
        + item.tau.to_bytes(pp.element_bytes, "big")
    )


def read_proof_item(r: Reader, pp: PublicParams) -> ProofItem:
    at = r.pos
    k = r.uint(1)
    if k > pp.n:
        raise MalformedInput(f"{k} parent labels exceed depth {pp.n}", at)
    sigma = tuple(_read_label(r, pp) for _ in range(k))
    return ProofItem(sigma=sigma, tau=_read_element(r, pp))


def decode_proof_item(data: bytes, pp: PublicParams) -> ProofItem:
    r = Reader(data)
    item = read_proof_item(r, pp)
    r.end()
    return item


def encode_proofs(items, pp: PublicParams) -> bytes:
    return struct.pack(">I", len(items)) + b"".join(encode_proof_item(i, pp) for i in items)


def _read_proofs(r: Reader, pp: PublicParams) -> list[ProofItem]:
    return [read_proof_item(r, pp) for _ in range(r.uint(4))]


def decode_proofs(data: bytes, pp: PublicParams) -> list[ProofItem]:
    r = Reader(data)
    items = _read_proofs(r, pp)
    r.end()
    return items


def encode_cp_proof_item(item: CpProofItem, pp: PublicParams) -> bytes:
    return (
        struct.pack(">B", len(item.sigma))
        + b"".join(_label_bytes(p, pp) for p in item.sigma)
        + struct.pack(">B", len(item.path))
        + b"".join(_label_bytes(p, pp) for p in item.path)
    )


def decode_cp_proof_item(data: bytes, pp: PublicParams) -> CpProofItem:
    r = Reader(data)
    k = r.uint(1)
    if k > pp.n:
        raise MalformedInput("too many parent labels", 0)
    sigma = tuple(_read_label(r, pp) for _ in range(k))
    at = r.pos
    m = r.uint(1)
    if m != pp.n:
        raise MalformedInput(f"path has {m} entries, expected {pp.n}", at)
    path = tuple(_read_label(r, pp) for _ in range(m))
    r.end()
    return CpProofItem(sigma=sigma, path=path)


# -- traces and prover state ---------------------------------------------------


def encode_trace(tr: QueryTrace) -> bytes:
    out = struct.pack(">QQQQI", tr.total, tr.unattributed, tr.fiat_shamir, tr.raw_digests, len(tr.per_label))
    for tag in sorted(tr.per_label):
        tb = tag.encode()
        out += struct.pack(">H", len(tb)) + tb + struct.pack(">Q", tr.per_label[tag])
    return out


def decode_trace(data: bytes) -> QueryTrace:
    r = Reader(data)
    total, unattributed, fs, raw, k = (r.uint(8), r.uint(8), r.uint(8), r.uint(8), r.uint(4))
    per = Counter()
    prev = None
    for _ in range(k):
        at = r.pos
        tag = r.take(r.uint(2)).decode()
        if prev is not None and tag <= prev:
            raise MalformedInput("trace entries not in canonical order", at)
        count = r.uint(8)
        if count == 0:
            raise MalformedInput("zero-count trace entry", at)
        per[tag] = count
        prev = tag
    r.end()
    tr = QueryTrace(total, per, unattributed, fs, raw)
    if tr.total != sum(per.values()) + unattributed:
        raise MalformedInput("trace totals are inconsistent")
    return tr


def encode_state(state: ProverState, pp: PublicParams) -> bytes:
    rho = state.rho.to_bytes((state.rho.bit_length() + 7) // 8, "big")
    out = bytearray(struct.pack(">B", state.m) + _label_bytes(state.p0, pp))
    out += struct.pack(">Q", len(rho)) + rho + struct.pack(">Q", len(state.store))
    for v in sorted(state.store, key=lambda v: (len(v), v)):
        out += encode_node(v, pp.n) + _label_bytes(state.store[v], pp)
    return bytes(out)


def decode_state(data: bytes, pp: PublicParams) -> ProverState:
    r = Reader(data)
    m = r.uint(1)
    if m > pp.n:
        raise MalformedInput("store depth exceeds n", 0)
    p0 = r.uint(pp.label_bytes)
    rho = r.uint(r.uint(8))
    store = {}
    for _ in range(r.uint(8)):
        at = r.pos
        v = decode_node(r.take(1 + (pp.n + 7) // 8), pp.n)
        if len(v) > m:
            raise MalformedInput("stored node below the store depth", at)
        store[v] = r.uint(pp.label_bytes)
    r.end()
    if len(store) != (1 << (m + 1)) - 1:
        raise MalformedInput("store is incomplete")
    return ProverState(p0=p0, rho=rho, m=m, store=store)


# -- proof files ---------------------------------------------------------------


@dataclass(frozen=True)
class ProofFile:
    mode: str
    commitment: Commitment
    challenges: tuple[str, ...] = ()
    proofs: tuple[ProofItem, ...] = ()


def _chunk(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def encode_proof_file(pf: ProofFile, pp: PublicParams) -> bytes:
    mode = {v: k for k, v in MODES.items()}[pf.mode]
    d = pp.digest.encode()
    header = (
        pp.digest_bytes()
        + struct.pack(">B", len(d))
        + d
        + struct.pack(">BHHIB", pp.n, pp.lam, pp.modulus_bits, pp.t, mode)
    )
    return (
        FILE_MAGIC
        + struct.pack(">B", VERSION)
        + header
        + _chunk(encode_commitment(pf.commitment, pp))
        + _chunk(encode_challenges(pf.challenges, pp))
        + _chunk(encode_proofs(pf.proofs, pp))
    )


def decode_proof_file(data: bytes, pp: PublicParams) -> ProofFile:
    r = Reader(data)
    if r.take(4) != FILE_MAGIC:
        raise MalformedInput("bad magic", 0)
    if (v := r.uint(1)) != VERSION:
        raise VersionMismatch(f"file version {v}", 4)
    if r.take(32) != pp.digest_bytes():
        raise ParamsDigestMismatch("proof file was made under different parameters")
    digest = r.take(r.uint(1)).decode()
    at = r.pos
    n, lam, bits, t, mode = r.uint(1), r.uint(2), r.uint(2), r.uint(4), r.uint(1)
    if (digest, n, lam, bits, t) != (pp.digest, pp.n, pp.lam, pp.modulus_bits, pp.t):
        raise MalformedInput("header disagrees with parameters", at)
    if mode not in MODES:
        raise MalformedInput(f"unknown mode {mode}", at + 9)

    def sub(read):
        body = r.take(r.uint(4))
        rr = Reader(body)
        val = read(rr, pp)
        rr.end()
        return val

    commitment = sub(_read_commitment)
    challenges = tuple(sub(_read_challenges))
    proofs = tuple(sub(_read_proofs))
    r.end()
    return ProofFile(MODES[mode], commitment, challenges, proofs)
