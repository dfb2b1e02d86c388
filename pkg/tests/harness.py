"""Socket plumbing shared by the wire tests and the acceptance suite."""

import socket
import threading

from sqposw import wire


def run_pair(prover_fn, verifier_fn):
    """Run both ends over a socketpair; returns (prover outcome, verifier outcome)
    where an outcome is a result or the raised exception."""
    a, b = socket.socketpair()
    out = {}

    def side(name, fn, sock):
        try:
            out[name] = fn(sock)
        except Exception as e:  # noqa: BLE001 - recorded for the assertion
            out[name] = e
        finally:
            sock.close()

    th = threading.Thread(target=side, args=("prover", prover_fn, a))
    th.start()
    side("verifier", verifier_fn, b)
    th.join(10)
    return out["prover"], out["verifier"]


def proxied(prover_fn, verifier_fn, tamper):
    """Prover <-> proxy <-> verifier; ``tamper(ftype, payload)`` may rewrite frames."""
    p_end, pa = socket.socketpair()
    pb, v_end = socket.socketpair()
    out = {}

    def relay():
        try:
            for src, dst in ((pa, pb), (pb, pa), (pa, pb), (pb, pa)):
                ftype, payload = wire.recv_frame(src)
                wire.send_frame(dst, ftype, tamper(ftype, payload))
        except Exception:  # noqa: BLE001 - the ends report the failure
            pass

    def side(name, fn, sock):
        try:
            out[name] = fn(sock)
        except Exception as e:  # noqa: BLE001
            out[name] = e

    threads = [
        threading.Thread(target=relay),
        threading.Thread(target=side, args=("prover", prover_fn, p_end)),
    ]
    for t in threads:
        t.start()
    side("verifier", verifier_fn, v_end)
    for t in threads:
        t.join(10)
    for s in (p_end, pa, pb, v_end):
        s.close()
    return out["prover"], out["verifier"]
