"""Public parameters and modulus setup."""

from __future__ import annotations

import hashlib
import logging
import random
import secrets
import struct
from dataclasses import dataclass, field
from enum import Enum

from . import primes
from .errors import (
    ExternalModulusInvalid,
    InvalidDepth,
    InvalidModulusSize,
    InvalidParams,
)

log = logging.getLogger(__name__)

MIN_LAMBDA = 16
PRODUCTION_MIN_LAMBDA = 128
MIN_MODULUS_BITS = 128
SAFE_PRIME_DEFAULT_LIMIT = 512

DIGEST_ID = "shake256"

BASE_TAG = "base-label"
NODE_TAG = "node-label"
FS_TAG = "fiat-shamir"

DEFAULT_TAGS: dict[str, bytes] = {
    BASE_TAG: b"sqposw/base-label/v1",
    NODE_TAG: b"sqposw/node-label/v1",
    FS_TAG: b"sqposw/fiat-shamir/v1",
}

# log2(N) -> modulus bits for factoring to take ~N time.
MODULUS_TABLE: tuple[tuple[int, int], ...] = (
    (80, 1024),
    (112, 2048),
    (128, 3072),
    (192, 7680),
    (256, 15360),
)


def modulus_bits_for(log_n: int) -> int:
    """Table lookup; values between rows round up to the next row."""
    for row_log_n, bits in MODULUS_TABLE:
        if log_n <= row_log_n:
            return bits
    raise InvalidParams(f"log N = {log_n} exceeds the largest tabulated size (256)")


class ModulusMode(str, Enum):
    SAFE_PRIMES = "safe-primes"
    STRONG_PRIMES = "strong-primes"
    EXTERNAL = "external"


class Provenance(str, Enum):
    GENERATED_DISCARDED = "generated-discarded"
    GENERATED_RETAINED = "generated-retained"
    EXTERNAL = "external"


@dataclass(frozen=True)
class ModulusSetup:
    delta: int
    trapdoor: tuple[int, int] | None = None
    provenance: Provenance = Provenance.GENERATED_DISCARDED

    def __post_init__(self):
        if self.trapdoor is not None:
            p, q = self.trapdoor
            if p * q != self.delta:
                raise InvalidParams("trapdoor factors do not multiply to the modulus")
            if not (primes.is_probable_prime(p) and primes.is_probable_prime(q)):
                raise InvalidParams("trapdoor factor is not prime")
            if self.provenance is not Provenance.GENERATED_RETAINED:
                raise InvalidParams("a trapdoor may only be held with generated-retained provenance")
        elif self.provenance is Provenance.GENERATED_RETAINED:
            raise InvalidParams("generated-retained provenance without a trapdoor")


def _rng(seed: int | None) -> random.Random:
    return random.Random(seed) if seed is not None else secrets.SystemRandom()


def gen_modulus(
    bits: int,
    mode: ModulusMode | str | None = None,
    retain_trapdoor: bool = False,
    *,
    seed: int | None = None,
    external: int | bytes | None = None,
    max_attempts: int = 10_000_000,
    allow_insecure: bool = False,
) -> ModulusSetup:
    """Generate (or validate) an RSA-type modulus of exactly ``bits`` bits.

    ``mode`` defaults to safe primes up to 512 bits and strong primes above.
    ``allow_insecure`` lifts the 128-bit floor for toy moduli in tests.
    """
    if mode is None:
        mode = ModulusMode.SAFE_PRIMES if bits <= SAFE_PRIME_DEFAULT_LIMIT else ModulusMode.STRONG_PRIMES
    mode = ModulusMode(mode)

    if mode is ModulusMode.EXTERNAL:
        if external is None:
            raise ExternalModulusInvalid("external mode requires a modulus")
        delta = int.from_bytes(external, "big") if isinstance(external, bytes) else int(external)
        if delta < 3 or delta % 2 == 0:
            raise ExternalModulusInvalid("external modulus must be odd")
        if primes.is_probable_prime(delta):
            raise ExternalModulusInvalid("external modulus is prime")
        if delta.bit_length() != bits:
            raise ExternalModulusInvalid(f"external modulus has {delta.bit_length()} bits, expected {bits}")
        return ModulusSetup(delta, None, Provenance.EXTERNAL)

    if bits < MIN_MODULUS_BITS and not allow_insecure:
        raise InvalidModulusSize(f"modulus size {bits} is below the {MIN_MODULUS_BITS}-bit floor")

    rng = _rng(seed)
    half = bits - bits // 2
    gen_prime = primes.random_safe_prime if mode is ModulusMode.SAFE_PRIMES else primes.random_strong_prime
    for _ in range(64):
        p = gen_prime(half, rng, max_attempts=max_attempts)
        q = gen_prime(bits // 2, rng, max_attempts=max_attempts)
        if p != q and (p * q).bit_length() == bits:
            break
    else:
        raise InvalidModulusSize(f"could not hit exactly {bits} bits")

    if retain_trapdoor:
        log.warning("TEST MODE: modulus trapdoor retained; this setup is insecure by construction")
        return ModulusSetup(p * q, (p, q), Provenance.GENERATED_RETAINED)
    delta = p * q
    del p, q
    return ModulusSetup(delta)


@dataclass(frozen=True)
class PublicParams:
    lam: int
    n: int
    delta: int
    t: int
    digest: str = DIGEST_ID
    tags: dict[str, bytes] = field(default_factory=lambda: dict(DEFAULT_TAGS))

    def __post_init__(self):
        if self.lam < MIN_LAMBDA:
            raise InvalidParams(f"lambda must be >= {MIN_LAMBDA}")
        if self.n < 1:
            raise InvalidDepth("depth must be >= 1")
        if self.n >= self.lam:
            raise InvalidDepth(f"depth {self.n} must be below lambda {self.lam}")
        if self.t < 1:
            raise InvalidParams("t must be >= 1")
        if self.delta < 3 or self.delta % 2 == 0:
            raise InvalidParams("modulus must be odd")
        if primes.is_probable_prime(self.delta):
            raise InvalidParams("modulus must be composite")
        if set(self.tags) != set(DEFAULT_TAGS):
            raise InvalidParams(f"tags must be exactly {sorted(DEFAULT_TAGS)}")
        if len(set(self.tags.values())) != len(self.tags):
            raise InvalidParams("domain-separation tags must be distinct")
        if self.digest != DIGEST_ID:
            raise InvalidParams(f"unsupported digest {self.digest!r}")

    def __hash__(self):
        return hash(self.to_bytes())

    @property
    def N(self) -> int:
        return (1 << (self.n + 1)) - 1

    @property
    def modulus_bits(self) -> int:
        return self.delta.bit_length()

    @property
    def label_bytes(self) -> int:
        return (self.lam + 7) // 8

    @property
    def element_bytes(self) -> int:
        return (self.modulus_bits + 7) // 8

    def to_bytes(self) -> bytes:
        """Canonical header encoding."""
        out = bytearray()
        out += struct.pack(">BHBI", 1, self.lam, self.n, self.t)
        d = self.digest.encode()
        out += struct.pack(">B", len(d)) + d
        out += struct.pack(">H", self.modulus_bits)
        out += self.delta.to_bytes(self.element_bytes, "big")
        out += struct.pack(">B", len(self.tags))
        for name in sorted(self.tags):
            nb, vb = name.encode(), self.tags[name]
            out += struct.pack(">B", len(nb)) + nb + struct.pack(">B", len(vb)) + vb
        return bytes(out)

    def digest_bytes(self) -> bytes:
        return hashlib.sha256(self.to_bytes()).digest()

    def describe(self) -> str:
        return "\n".join(
            [
                f"lambda        {self.lam}",
                f"depth n       {self.n}",
                f"nodes N       {self.N}",
                f"challenges t  {self.t}",
                f"modulus bits  {self.modulus_bits}",
                f"modulus       0x{self.delta:x}",
                f"digest        {self.digest}",
                f"params digest {self.digest_bytes().hex()}",
            ]
        )


def gen(
    lam: int,
    n: int,
    t: int,
    modulus_mode: ModulusMode | str | None = None,
    *,
    modulus_bits: int | None = None,
    profile: int | None = None,
    modulus: ModulusSetup | None = None,
    seed: int | None = None,
    allow_insecure: bool = False,
) -> PublicParams:
    """Build public parameters.

    The modulus comes from ``modulus`` if given, else it is generated at
    ``modulus_bits`` or, with ``profile`` (a log2 N security target), at the
    tabulated size for that profile.
    """
    if n >= lam:
        raise InvalidDepth(f"depth {n} must be below lambda {lam}")
    if modulus is None:
        if profile is not None:
            modulus_bits = modulus_bits_for(profile)
        if modulus_bits is None:
            raise InvalidModulusSize("need modulus_bits, profile or an explicit modulus")
        if modulus_bits < MIN_MODULUS_BITS and not allow_insecure:
            raise InvalidModulusSize(f"modulus size {modulus_bits} is below the {MIN_MODULUS_BITS}-bit floor")
        modulus = gen_modulus(modulus_bits, modulus_mode, seed=seed, allow_insecure=allow_insecure)
    elif modulus.delta.bit_length() < MIN_MODULUS_BITS and not allow_insecure:
        raise InvalidModulusSize(f"modulus size {modulus.delta.bit_length()} is below the {MIN_MODULUS_BITS}-bit floor")
    return PublicParams(lam=lam, n=n, delta=modulus.delta, t=t)
