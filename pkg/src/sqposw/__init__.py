"""Single-query-verifiable proof of sequential work over an RSA accumulator."""

from .params import ModulusSetup, PublicParams, gen, gen_modulus, modulus_bits_for
from .oracle import Oracle, QueryTrace, read_trace, traced
from .posw import (
    Commitment,
    ProofItem,
    ProverState,
    Verdict,
    fiat_shamir_challenges,
    open,
    prove_noninteractive,
    sample_challenges,
    solve,
    verify,
    verify_commitment,
    verify_noninteractive,
)

__version__ = "0.1.0"
