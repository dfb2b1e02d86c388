"""Primality testing and prime generation.

Miller-Rabin rounds are delegated to ``gmpy2.is_strong_prp``; base selection,
trial division and the generators are ours.
"""

from __future__ import annotations

import random

import gmpy2

from .errors import GenerationTimeout


def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * limit
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(limit**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(limit) if sieve[i]]


SMALL_PRIMES = _small_primes(2000)
_SMALL_SET = frozenset(SMALL_PRIMES)
# trial division by the primes below 300 via one gcd
_PRIMORIAL = gmpy2.mpz(1)
for _p in SMALL_PRIMES[:62]:
    _PRIMORIAL *= _p

# Bases 2..41 make Miller-Rabin exact below this bound (Sorenson & Webster).
_DETERMINISTIC_BOUND = 3317044064679887385961981
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

# 40 random-base rounds bound the error for a composite by 4^-40 = 2^-80.
MR_ROUNDS = 40


def is_probable_prime(n: int) -> bool:
    """Trial division, then Miller-Rabin.

    Exact for n < 3.3e24 (covers every label width up to 81 bits). Above
    that, runs ``MR_ROUNDS`` rounds with bases drawn from an RNG seeded by n
    itself, so the answer is reproducible across processes.
    """
    if n < 2:
        return False
    if n < SMALL_PRIMES[-1]:
        return n in _SMALL_SET
    if gmpy2.gcd(n, _PRIMORIAL) != 1:
        return False
    n = gmpy2.mpz(n)
    if n < _DETERMINISTIC_BOUND:
        return all(gmpy2.is_strong_prp(n, a) for a in _DETERMINISTIC_BASES)
    if not gmpy2.is_strong_prp(n, 2):
        return False
    rng = random.Random(int(n))
    for _ in range(MR_ROUNDS - 1):
        if not gmpy2.is_strong_prp(n, rng.randrange(3, n - 1)):
            return False
    return True


def _top_bits_candidate(bits: int, rng: random.Random) -> int:
    # top two bits set so a product of two such numbers has full width; toy
    # sizes have too few such primes, so there only the top bit is forced and
    # the caller retries until the product width is right
    if bits < 12:
        return rng.getrandbits(bits) | (1 << (bits - 1)) | 1
    return rng.getrandbits(bits) | (3 << (bits - 2)) | 1


def random_prime(bits: int, rng: random.Random, max_attempts: int = 1_000_000) -> int:
    for _ in range(max_attempts):
        c = _top_bits_candidate(bits, rng)
        if is_probable_prime(c):
            return c
    raise GenerationTimeout(f"no {bits}-bit prime after {max_attempts} candidates")


def is_safe_prime(p: int) -> bool:
    return p > 4 and p % 2 == 1 and is_probable_prime((p - 1) // 2) and is_probable_prime(p)


def random_safe_prime(bits: int, rng: random.Random, max_attempts: int = 10_000_000) -> int:
    """A ``bits``-bit prime p with (p - 1)/2 also prime."""
    if bits < 3:
        raise ValueError("safe primes need at least 3 bits")
    small = [q for q in SMALL_PRIMES[1:200]]
    for _ in range(max_attempts):
        p = _top_bits_candidate(bits, rng)
        # p = 3 mod 4 so that q = (p-1)/2 is odd
        p |= 3
        if p.bit_length() != bits:
            continue
        q = p >> 1
        if p > small[-1] * 2 and any(q % s == 0 or p % s == 0 for s in small if s < q):
            continue
        if is_probable_prime(q) and is_probable_prime(p):
            return p
    raise GenerationTimeout(f"no {bits}-bit safe prime after {max_attempts} candidates")


def random_strong_prime(bits: int, rng: random.Random, max_attempts: int = 1_000_000) -> int:
    """Gordon's algorithm: p - 1 has a large prime factor r, p + 1 has a large
    prime factor s, and r - 1 has a large prime factor t."""
    if bits < 64:
        raise ValueError("strong-prime generation needs at least 64 bits")
    aux = bits // 2 - 16
    s = random_prime(aux, rng)
    t = random_prime(aux - 8, rng)
    for i in range(1, max_attempts):
        r = 2 * i * t + 1
        if is_probable_prime(r):
            break
    else:
        raise GenerationTimeout("Gordon: no prime r found")
    p0 = 2 * pow(s, r - 2, r) * s - 1
    step = 2 * r * s
    lo = 3 << (bits - 2)
    start = lo + rng.randrange(1 << (bits - 3))
    j = max(0, -(-(start - p0) // step))
    for _ in range(max_attempts):
        p = p0 + j * step
        if p.bit_length() > bits:
            # wrapped past the top; restart lower in the window
            j = max(0, -(-(lo - p0) // step)) + rng.randrange(1 << 8)
            continue
        if is_probable_prime(p):
            return p
        j += 1
    raise GenerationTimeout(f"no {bits}-bit strong prime after {max_attempts} candidates")
