import random
import socket

import pytest

from sqposw import codec, posw, wire
from sqposw.errors import MalformedInput, ProtocolViolation, SessionTimeout
from sqposw.params import PublicParams

from harness import proxied, run_pair


@pytest.fixture(scope="module")
def pp(delta512):
    return PublicParams(lam=64, n=6, delta=delta512, t=4)


@pytest.fixture(scope="module")
def solved(pp):
    return posw.solve(pp, b"wire")


def prover(pp, solved):
    return lambda s: wire.session_prover(s, pp, b"wire", solved=solved, timeout=10)


def verifier(pp, seed):
    return lambda s: wire.session_verifier(s, pp, rng=random.Random(seed), timeout=10)


def test_honest_loopback(pp, solved):
    p, v = run_pair(prover(pp, solved), verifier(pp, 1))
    assert v.verdict.accepted and p.verdict.accepted
    assert p.challenges == v.challenges
    # offline replay of the transcript reaches the same verdict
    assert posw.verify_commitment(pp, v.commitment, v.challenges, p.proofs) == v.verdict


def test_tau_flip_rejected_with_index(pp, solved):
    def flip_last_tau(ftype, payload):
        if ftype != wire.PROOF:
            return payload
        data = bytearray(payload)
        data[-1] ^= 1  # last byte of the last item's tau
        return bytes(data)

    p, v = proxied(prover(pp, solved), verifier(pp, 2), flip_last_tau)
    assert not v.verdict.accepted
    assert v.verdict.index == pp.t - 1
    assert p.verdict == v.verdict


def test_random_single_byte_tamper_rejected(pp, solved):
    rng = random.Random(11)
    for trial in range(30):
        def tamper(ftype, payload):
            if ftype != wire.PROOF:
                return payload
            data = bytearray(payload)
            data[rng.randrange(len(data))] ^= 1 << rng.randrange(8)
            return bytes(data)

        _, v = proxied(prover(pp, solved), verifier(pp, 100 + trial), tamper)
        assert isinstance(v, wire.SessionResult) and not v.verdict.accepted, trial


def test_challenge_before_commit_is_violation(pp):
    def rogue(sock):
        wire.send_frame(sock, wire.CHALLENGE, codec.encode_challenges(["000000"] * pp.t, pp))
        return wire.recv_frame(sock)

    p, v = run_pair(rogue, verifier(pp, 3))
    assert isinstance(v, ProtocolViolation)
    assert p[0] == wire.ERROR and p[1][0] == wire.ERR_PROTOCOL


def test_prover_rejects_out_of_order(pp, solved):
    def rogue(sock):
        wire.recv_frame(sock)  # COMMIT
        wire.send_frame(sock, wire.RESULT, wire.encode_result(posw.ACCEPT))
        return wire.recv_frame(sock)

    p, v = run_pair(prover(pp, solved), rogue)
    assert isinstance(p, ProtocolViolation)
    assert v[0] == wire.ERROR


def test_params_mismatch_aborts(pp, solved, delta512):
    other = PublicParams(lam=64, n=6, delta=delta512, t=5)
    p, v = run_pair(prover(pp, solved), lambda s: wire.session_verifier(s, other, timeout=10))
    assert not isinstance(v, wire.SessionResult)
    assert isinstance(p, ProtocolViolation)


def test_bad_magic_and_type():
    a, b = socket.socketpair()
    with a, b:
        a.sendall(b"XXXX" + bytes(6))
        with pytest.raises(ProtocolViolation):
            wire.recv_frame(b)
    with pytest.raises(ProtocolViolation):
        wire.decode_frame(wire.HEADER.pack(wire.MAGIC, 1, 9, 0))
    with pytest.raises(MalformedInput):
        wire.decode_frame(wire.encode_frame(wire.COMMIT, b"abc")[:-1])


def test_peer_silence_times_out(pp):
    a, b = socket.socketpair()
    with a, b:
        with pytest.raises(SessionTimeout):
            wire.session_verifier(b, pp, timeout=0.2)


def test_result_round_trip():
    for v in (posw.ACCEPT, posw.Verdict(False, 3, "exponent-check"), posw.Verdict(False, None, "structure")):
        assert wire.decode_result(wire.encode_result(v)) == v


def test_frame_round_trip():
    assert wire.decode_frame(wire.encode_frame(wire.PROOF, b"xyz")) == (wire.PROOF, b"xyz")
