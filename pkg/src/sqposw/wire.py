"""Length-prefixed framing and the four-message interactive session:

    prover -> COMMIT(x, N, phi)
    verifier -> CHALLENGE(gamma)
    prover -> PROOF(pi)
    verifier -> RESULT(accept | reject + index)

Frame: magic "PSW1" | version (1) | type (1) | length (4, BE) | payload.
Any malformed or out-of-order frame aborts the session with an ERROR frame.
"""

from __future__ import annotations

import random
import socket
import struct
from dataclasses import dataclass, field

from . import codec
from .errors import MalformedInput, ParamsDigestMismatch, PoswError, ProtocolViolation, SessionTimeout
from .params import PublicParams
from .posw import Commitment, ProofItem, Verdict, open, sample_challenges, solve, verify_commitment

MAGIC = b"PSW1"
VERSION = 1
COMMIT, CHALLENGE, PROOF, RESULT, ERROR = 1, 2, 3, 4, 5
FRAME_NAMES = {COMMIT: "COMMIT", CHALLENGE: "CHALLENGE", PROOF: "PROOF", RESULT: "RESULT", ERROR: "ERROR"}
HEADER = struct.Struct(">4sBBI")
MAX_PAYLOAD = 1 << 28
NO_INDEX = 0xFFFFFFFF

ERR_PROTOCOL, ERR_PARAMS, ERR_MALFORMED = 1, 2, 3
DEFAULT_TIMEOUT = 60.0
DEFAULT_PORT = 7441


def encode_frame(ftype: int, payload: bytes) -> bytes:
    return HEADER.pack(MAGIC, VERSION, ftype, len(payload)) + payload


def decode_frame(data: bytes) -> tuple[int, bytes]:
    if len(data) < HEADER.size:
        raise MalformedInput("truncated frame header", 0)
    ftype, length = _check_header(data[: HEADER.size])
    if len(data) != HEADER.size + length:
        raise MalformedInput("frame length mismatch", 6)
    return ftype, data[HEADER.size :]


def _check_header(head: bytes) -> tuple[int, int]:
    magic, version, ftype, length = HEADER.unpack(head)
    if magic != MAGIC:
        raise ProtocolViolation("bad frame magic")
    if version != VERSION:
        raise ProtocolViolation(f"unsupported frame version {version}")
    if ftype not in FRAME_NAMES:
        raise ProtocolViolation(f"unknown frame type {ftype}")
    if length > MAX_PAYLOAD:
        raise ProtocolViolation("frame too large")
    return ftype, length


def _recv_exact(sock, k: int) -> bytes:
    buf = bytearray()
    while len(buf) < k:
        try:
            chunk = sock.recv(k - len(buf))
        except socket.timeout:
            raise SessionTimeout("peer went silent") from None
        if not chunk:
            raise ProtocolViolation("connection closed mid-frame")
        buf += chunk
    return bytes(buf)


def send_frame(sock, ftype: int, payload: bytes) -> None:
    sock.sendall(encode_frame(ftype, payload))


def recv_frame(sock) -> tuple[int, bytes]:
    ftype, length = _check_header(_recv_exact(sock, HEADER.size))
    return ftype, _recv_exact(sock, length)


def encode_result(v: Verdict) -> bytes:
    reason = (v.reason or "").encode()
    index = NO_INDEX if v.index is None else v.index
    return struct.pack(">BIB", int(v.accepted), index, len(reason)) + reason


def decode_result(payload: bytes) -> Verdict:
    r = codec.Reader(payload)
    accepted, index = r.uint(1), r.uint(4)
    reason = r.take(r.uint(1)).decode()
    r.end()
    if accepted not in (0, 1):
        raise MalformedInput("bad verdict byte", 0)
    return Verdict(bool(accepted), None if index == NO_INDEX else index, reason or None)


def _fail(sock, code: int, exc: PoswError):
    try:
        send_frame(sock, ERROR, bytes([code]) + str(exc).encode()[:1024])
    except OSError:
        pass
    raise exc


def _expect(sock, wanted: int) -> bytes:
    ftype, payload = recv_frame(sock)
    if ftype == ERROR:
        code = payload[0] if payload else 0
        raise ProtocolViolation(f"peer aborted (code {code}): {payload[1:].decode(errors='replace')}")
    if ftype != wanted:
        _fail(sock, ERR_PROTOCOL, ProtocolViolation(f"expected {FRAME_NAMES[wanted]}, got {FRAME_NAMES[ftype]}"))
    return payload


@dataclass
class SessionResult:
    verdict: Verdict
    commitment: Commitment | None = None
    challenges: list[str] = field(default_factory=list)
    proofs: list[ProofItem] = field(default_factory=list)


def _guard(sock, fn):
    try:
        return fn()
    except ProtocolViolation as e:
        _fail(sock, ERR_PROTOCOL, e)


def session_prover(
    sock,
    pp: PublicParams,
    x: bytes,
    *,
    solved=None,
    store_depth: int | None = None,
    method: str | None = None,
    timeout: float | None = DEFAULT_TIMEOUT,
) -> SessionResult:
    """Run the prover side. ``solved`` may carry a (Commitment, ProverState)
    pair to skip solving."""
    sock.settimeout(timeout)
    commitment, state = solved or solve(pp, x, store_depth=store_depth)
    send_frame(sock, COMMIT, codec.encode_commitment(commitment, pp))
    payload = _guard(sock, lambda: _expect(sock, CHALLENGE))
    try:
        gamma = codec.decode_challenges(payload, pp)
    except MalformedInput as e:
        _fail(sock, ERR_MALFORMED, e)
    if len(gamma) != pp.t:
        _fail(sock, ERR_PROTOCOL, ProtocolViolation(f"expected {pp.t} challenges, got {len(gamma)}"))
    proofs = open(pp, x, state, gamma, method=method)
    send_frame(sock, PROOF, codec.encode_proofs(proofs, pp))
    payload = _guard(sock, lambda: _expect(sock, RESULT))
    return SessionResult(decode_result(payload), commitment, gamma, proofs)


def _decode_proofs_lenient(payload: bytes, pp: PublicParams) -> tuple[list[ProofItem] | None, int | None]:
    """Proof items, or (None, index of the first undecodable item)."""
    r = codec.Reader(payload)
    items: list[ProofItem] = []
    try:
        count = r.uint(4)
        for _ in range(count):
            items.append(codec.read_proof_item(r, pp))
        r.end()
    except MalformedInput:
        return None, min(len(items), pp.t - 1)
    return items, None


def session_verifier(
    sock,
    pp: PublicParams,
    *,
    rng: random.Random | None = None,
    timeout: float | None = DEFAULT_TIMEOUT,
) -> SessionResult:
    sock.settimeout(timeout)
    payload = _guard(sock, lambda: _expect(sock, COMMIT))
    try:
        commitment = codec.decode_commitment(payload, pp)
    except ParamsDigestMismatch as e:
        _fail(sock, ERR_PARAMS, e)
    except MalformedInput as e:
        _fail(sock, ERR_MALFORMED, e)
    gamma = sample_challenges(pp, rng)
    send_frame(sock, CHALLENGE, codec.encode_challenges(gamma, pp))
    payload = _guard(sock, lambda: _expect(sock, PROOF))
    proofs, bad = _decode_proofs_lenient(payload, pp)
    if proofs is None:
        verdict = Verdict(False, bad, "structure")
        proofs = []
    else:
        verdict = verify_commitment(pp, commitment, gamma, proofs)
    send_frame(sock, RESULT, encode_result(verdict))
    return SessionResult(verdict, commitment, gamma, proofs)
