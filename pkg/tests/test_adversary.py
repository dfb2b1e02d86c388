import math
import random

import pytest

from sqposw import adversary, posw
from sqposw.errors import InverseUndefined
from sqposw.oracle import Oracle
from sqposw.params import PublicParams


@pytest.fixture(scope="module")
def trapdoor(setup512):
    return adversary.Trapdoor.from_setup(setup512)


def test_trapdoor_from_setup(trapdoor, delta512):
    assert trapdoor.delta == delta512
    with pytest.raises(ValueError):
        adversary.Trapdoor.from_setup(type("S", (), {"trapdoor": None})())


def test_forgery_accepted(trapdoor, make_pp, rng):
    pp = make_pp(4, t=4)
    x = b"forge"
    honest_phi = posw.solve(pp, x)[0].phi
    labels = adversary.honest_labels(pp, Oracle.for_params(pp, x))
    for _ in range(100):
        rho_prime = rng.getrandbits(256)
        gamma = posw.sample_challenges(pp, rng)
        try:
            c, proofs = adversary.forge(pp, trapdoor, x, rho_prime, gamma, labels=labels)
        except InverseUndefined:
            continue
        assert c.phi != honest_phi
        assert posw.verify(pp, x, c.N, c.phi, gamma, proofs)


def test_forge_requires_matching_trapdoor(make_pp):
    with pytest.raises(ValueError):
        adversary.forge(make_pp(3), adversary.Trapdoor(23, 47), b"x", 5, ["000"])


def test_alpha_zero_is_honest(make_pp, rng):
    pp = make_pp(5)
    c, state = adversary.cheat_solve(pp, b"a0", 0.0, rng)
    assert not state.corrupted
    assert c == posw.solve(pp, b"a0")[0]


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.9])
def test_corrupted_set_size(alpha, make_pp, rng):
    pp = make_pp(6)
    _, state = adversary.cheat_solve(pp, b"sz", alpha, rng)
    assert len(state.corrupted) == math.floor(alpha * 64)
    assert all(state.junk[v] != state.labels[v] for v in state.corrupted)


def test_corrupted_challenge_rejected_clean_accepted(make_pp, rng):
    pp = make_pp(5, t=1)
    c, state = adversary.cheat_solve(pp, b"hit", 0.5, rng)
    hit = sorted(state.corrupted)[0]
    miss = next(v for v in sorted(state.labels) if len(v) == 5 and v not in state.corrupted)
    assert not posw.verify(pp, b"hit", c.N, c.phi, [hit], adversary.cheat_open(pp, state, [hit]))
    assert posw.verify(pp, b"hit", c.N, c.phi, [miss], adversary.cheat_open(pp, state, [miss]))


def test_per_challenge_detection_rate(make_pp):
    pp = make_pp(6, t=1)
    alpha, trials = 0.25, 600
    rng = random.Random(5)
    labels = adversary.honest_labels(pp, Oracle.for_params(pp, b"rate"))
    rejected = 0
    for _ in range(trials):
        c, state = adversary.cheat_solve(pp, b"rate", alpha, rng, labels=labels)
        gamma = posw.sample_challenges(pp, rng)
        rejected += not posw.verify(pp, b"rate", c.N, c.phi, gamma, adversary.cheat_open(pp, state, gamma))
    sigma = math.sqrt(alpha * (1 - alpha) / trials)
    assert abs(rejected / trials - alpha) <= 3 * sigma


def test_alpha_one_never_escapes(make_pp):
    r = adversary.soundness_experiment(make_pp(4), 1.0, 3, 100, seed=1)
    assert r.accepted == 0


def test_soundness_experiment_is_deterministic(make_pp):
    a = adversary.soundness_experiment(make_pp(4), 0.5, 2, 100, seed=9)
    b = adversary.soundness_experiment(make_pp(4), 0.5, 2, 100, seed=9)
    assert a == b


def test_soundness_needs_enough_trials(make_pp):
    with pytest.raises(ValueError):
        adversary.soundness_experiment(make_pp(4), 0.5, 2, 99, seed=0)


def test_root_game(trapdoor, delta512):
    pp = PublicParams(lam=64, n=4, delta=delta512, t=1)
    rng = random.Random(3)
    guess = adversary.RandomGuessStrategy(random.Random(4))
    assert sum(adversary.root_game_harness(pp, guess, rng) for _ in range(1000)) == 0
    strong = adversary.TrapdoorStrategy(trapdoor, random.Random(5))
    assert all(adversary.root_game_harness(pp, strong, rng) for _ in range(50))


def test_root_game_rejects_trivial_w(delta512):
    pp = PublicParams(lam=64, n=4, delta=delta512, t=1)

    class One:
        def commit(self, pp):
            return 1

        def respond(self, pp, ell):
            return 1

    with pytest.raises(ValueError):
        adversary.root_game_harness(pp, One(), random.Random(0))
