"""Accumulator algebra: a commutative monoid of exponents acting on a group.

``AccumulatorScheme`` captures the axioms the protocol relies on; ``RSAScheme``
instantiates them with integer multiplication and exponentiation mod Delta.
The module-level functions are the RSA instantiation in functional form.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Sequence

import gmpy2

from .errors import LabelModulusCollision, NotMember


class AccumulatorScheme(ABC):
    """Exponent monoid (identity, combine, remove) acting on group elements via
    ``apply``, with apply(apply(g, a), b) == apply(g, combine(a, b))."""

    identity: object

    @abstractmethod
    def combine(self, a, b): ...

    @abstractmethod
    def remove(self, a, b):
        """The exponent c with combine(c, b) == a; NotMember if none exists."""

    @abstractmethod
    def apply(self, g, a): ...

    def accumulate(self, g, items: Iterable):
        acc, rho = g, self.identity
        for p in items:
            acc = self.apply(acc, p)
            rho = self.combine(rho, p)
        return acc, rho

    def witness(self, g, rho, p):
        return self.apply(g, self.remove(rho, p))

    def check(self, acc, w, p) -> bool:
        return self.apply(w, p) == acc


class RSAScheme(AccumulatorScheme):
    identity = 1

    def __init__(self, delta: int):
        self.delta = delta

    def combine(self, a: int, b: int) -> int:
        return combine(a, b)

    def remove(self, a: int, b: int) -> int:
        return remove(a, b)

    def apply(self, g: int, a: int) -> int:
        return apply(g, a, self.delta)


def combine(a: int, b: int) -> int:
    return a * b


def apply(g: int, a: int, delta: int) -> int:
    return int(gmpy2.powmod(g, a, delta))


def remove(rho: int, p: int) -> int:
    q, r = divmod(rho, p)
    if r:
        raise NotMember(f"{p} does not divide the accumulated exponent")
    return q


def witness_literal(base: int, rho: int, p: int, delta: int) -> int:
    return apply(base, remove(rho, p), delta)


@dataclass
class ExpCounter:
    """Exponentiation cost in units of one label-sized exponent."""

    count: int = 0


def product(values: Sequence[int]) -> int:
    """Balanced product tree; far faster than a running product for long lists."""
    if not values:
        return 1
    layer = [gmpy2.mpz(v) for v in values]
    while len(layer) > 1:
        nxt = [layer[i] * layer[i + 1] for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return int(layer[0])


def witnesses_split(
    base: int,
    labels: Sequence[int],
    targets: Iterable[int],
    delta: int,
    counter: ExpCounter | None = None,
) -> dict[int, int]:
    """base^(prod of all labels except position i) for each target position i.

    Recursive halving: each half is entered carrying the base raised to the
    other half's labels. With fewer targets than labels the non-targets are
    folded into the base first, so the halving runs over the targets only.
    """
    targets = sorted(set(targets))
    if not targets:
        return {}
    if targets[0] < 0 or targets[-1] >= len(labels):
        raise IndexError("target position out of range")
    mod = gmpy2.mpz(delta)
    g = gmpy2.mpz(base) % mod
    if len(targets) < len(labels):
        # sparse targets: fold every non-target label in up front, then
        # split over the targets alone
        tset = set(targets)
        rest = [p for i, p in enumerate(labels) if i not in tset]
        if counter is not None:
            counter.count += len(rest)
        g = gmpy2.powmod(g, product(rest), mod)
    sub = [labels[i] for i in targets]
    out: dict[int, int] = {}

    def descend(g, lo: int, hi: int) -> None:
        if hi - lo == 1:
            out[targets[lo]] = int(g)
            return
        mid = (lo + hi) // 2
        if counter is not None:
            counter.count += hi - lo
        descend(gmpy2.powmod(g, product(sub[mid:hi]), mod), lo, mid)
        descend(gmpy2.powmod(g, product(sub[lo:mid]), mod), mid, hi)

    descend(g, 0, len(sub))
    return out


class ProductAccumulator:
    """Running product kept as a stack of balanced partial products, so the
    total cost stays quasi-linear while memory stays logarithmic in count."""

    def __init__(self):
        self._stack: list[tuple[int, object]] = []

    def add(self, value: int) -> None:
        weight, acc = 1, gmpy2.mpz(value)
        while self._stack and self._stack[-1][0] == weight:
            w, top = self._stack.pop()
            acc = top * acc
            weight += w
        self._stack.append((weight, acc))

    def value(self) -> int:
        acc = gmpy2.mpz(1)
        for _, v in reversed(self._stack):
            acc = v * acc
        return int(acc)


def accumulate_all(
    base: int, labels: Iterable[int], delta: int, fast: bool = False, check_coprime: bool = False
) -> tuple[int, int]:
    """(base^(prod labels) mod delta, prod labels).

    Exponentiates label by label so the group state stays constant-size.
    ``fast`` instead multiplies everything first and exponentiates once.
    Pure algebra by default; ``check_coprime`` raises LabelModulusCollision
    on a label sharing a factor with delta (solve does this itself).
    """
    mod = gmpy2.mpz(delta)
    labels = iter(labels)
    if check_coprime:
        labels = (_check_coprime(p, delta) for p in labels)
    if fast:
        rho = product(list(labels))
        return int(gmpy2.powmod(base, rho, mod)), rho
    phi = gmpy2.mpz(base) % mod
    rho = ProductAccumulator()
    for p in labels:
        phi = gmpy2.powmod(phi, p, mod)
        rho.add(p)
    return int(phi), rho.value()


def _check_coprime(p: int, delta: int) -> int:
    if math.gcd(p, delta) != 1:
        raise LabelModulusCollision(f"label {p} shares a factor with the modulus")
    return p
