import pytest
import sympy

from sqposw import primes
from sqposw.errors import ExternalModulusInvalid, InvalidDepth, InvalidModulusSize, InvalidParams
from sqposw.params import (
    DEFAULT_TAGS,
    MODULUS_TABLE,
    ModulusMode,
    ModulusSetup,
    Provenance,
    PublicParams,
    gen,
    gen_modulus,
    modulus_bits_for,
)

from conftest import TOY_DELTA

# transcribed from the published table
PUBLISHED_TABLE = [(80, 1024), (112, 2048), (128, 3072), (192, 7680), (256, 15360)]


def test_modulus_table_matches_published_pairs():
    assert list(MODULUS_TABLE) == PUBLISHED_TABLE
    for log_n, bits in PUBLISHED_TABLE:
        assert modulus_bits_for(log_n) == bits


@pytest.mark.parametrize("log_n,bits", [(1, 1024), (81, 2048), (129, 7680), (200, 15360)])
def test_between_rows_rounds_up(log_n, bits):
    assert modulus_bits_for(log_n) == bits


def test_beyond_table_is_rejected():
    with pytest.raises(InvalidParams):
        modulus_bits_for(257)


def test_depth_must_be_below_lambda():
    with pytest.raises(InvalidDepth):
        PublicParams(lam=16, n=16, delta=TOY_DELTA, t=1)
    with pytest.raises(InvalidDepth):
        gen(64, 64, 1, modulus_bits=512)


def test_small_modulus_needs_opt_in():
    with pytest.raises(InvalidModulusSize):
        gen(64, 4, 1, modulus_bits=64)
    with pytest.raises(InvalidModulusSize):
        gen_modulus(32)


def test_toy_safe_prime_modulus():
    s = gen_modulus(16, allow_insecure=True, seed=1, retain_trapdoor=True)
    p, q = s.trapdoor
    assert s.delta.bit_length() == 16 and p * q == s.delta
    for f in (p, q):
        assert sympy.isprime(f) and sympy.isprime((f - 1) // 2)


@pytest.mark.parametrize("bits", [128, 256, 512])
def test_safe_prime_modulus(bits):
    s = gen_modulus(bits, seed=bits, retain_trapdoor=True)
    assert s.delta.bit_length() == bits
    assert s.provenance is Provenance.GENERATED_RETAINED
    assert all(sympy.isprime(f) and sympy.isprime((f - 1) // 2) for f in s.trapdoor)


def test_strong_prime_modulus():
    s = gen_modulus(1024, seed=5, retain_trapdoor=True)
    assert s.delta.bit_length() == 1024
    assert all(sympy.isprime(f) for f in s.trapdoor)


def test_trapdoor_discarded_by_default():
    s = gen_modulus(256, seed=9)
    assert s.trapdoor is None
    assert s.provenance is Provenance.GENERATED_DISCARDED


def test_retained_trapdoor_logs_warning(caplog):
    gen_modulus(128, seed=3, retain_trapdoor=True)
    assert any("trapdoor retained" in r.message for r in caplog.records)


def test_generation_is_deterministic_under_seed():
    assert gen_modulus(256, seed=42).delta == gen_modulus(256, seed=42).delta
    assert gen_modulus(256, seed=42).delta != gen_modulus(256, seed=43).delta


def test_provenance_consistency():
    with pytest.raises(InvalidParams):
        ModulusSetup(TOY_DELTA, (23, 47), Provenance.GENERATED_DISCARDED)
    with pytest.raises(InvalidParams):
        ModulusSetup(TOY_DELTA, None, Provenance.GENERATED_RETAINED)
    with pytest.raises(InvalidParams):
        ModulusSetup(TOY_DELTA, (23, 46), Provenance.GENERATED_RETAINED)


@pytest.mark.parametrize(
    "value,bits",
    [(1082, 11), (1087, 11), (TOY_DELTA, 12)],  # even, prime, wrong width
)
def test_external_modulus_checks(value, bits):
    with pytest.raises(ExternalModulusInvalid):
        gen_modulus(bits, ModulusMode.EXTERNAL, external=value)


def test_external_modulus_accepted():
    s = gen_modulus(11, ModulusMode.EXTERNAL, external=TOY_DELTA.to_bytes(2, "big"))
    assert s.delta == TOY_DELTA and s.provenance is Provenance.EXTERNAL


def test_params_invariants():
    with pytest.raises(InvalidParams):
        PublicParams(lam=64, n=4, delta=1082, t=1)
    with pytest.raises(InvalidParams):
        PublicParams(lam=64, n=4, delta=TOY_DELTA, t=0)
    tags = dict(DEFAULT_TAGS)
    tags["fiat-shamir"] = tags["node-label"]
    with pytest.raises(InvalidParams):
        PublicParams(lam=64, n=4, delta=TOY_DELTA, t=1, tags=tags)


def test_params_digest_is_sensitive_to_every_field(delta512):
    base = PublicParams(lam=64, n=6, delta=delta512, t=4)
    variants = [
        PublicParams(lam=65, n=6, delta=delta512, t=4),
        PublicParams(lam=64, n=7, delta=delta512, t=4),
        PublicParams(lam=64, n=6, delta=delta512, t=5),
        PublicParams(lam=64, n=6, delta=TOY_DELTA, t=4),
    ]
    assert len({base.digest_bytes(), *(v.digest_bytes() for v in variants)}) == 5


def test_derived_sizes():
    pp = PublicParams(lam=64, n=10, delta=TOY_DELTA, t=16)
    assert pp.N == 2047
    assert (pp.label_bytes, pp.element_bytes, pp.modulus_bits) == (8, 2, 11)


def test_primality_against_sympy(rng):
    for _ in range(3000):
        n = rng.getrandbits(rng.choice([8, 20, 40, 70, 90, 130]))
        assert primes.is_probable_prime(n) == sympy.isprime(n), n


def test_primality_on_pseudoprimes():
    # strong pseudoprimes to several small bases, and Carmichael numbers
    for n in (561, 41041, 3215031751, 3825123056546413051, 318665857834031151167461):
        assert not primes.is_probable_prime(n)
