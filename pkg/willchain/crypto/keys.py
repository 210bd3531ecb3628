from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Protocol

from ..core.errors import ValidationError
from .group import Group, GroupElement, Scalar


@dataclass(frozen=True)
class KeyPair:
    sk: Scalar
    pk: GroupElement

    def __post_init__(self) -> None:
        if self.sk.is_zero():
            raise ValidationError("secret key must be nonzero")
        if self.sk.group.generator() ** self.sk != self.pk:
            raise ValidationError("public key does not match secret key")

    @property
    def group(self) -> Group:
        return self.pk.group

    @classmethod
    def from_secret(cls, sk: Scalar) -> "KeyPair":
        return cls(sk=sk, pk=sk.group.generator() ** sk)

    @classmethod
    def generate(cls, group: Group, rng: random.Random | None = None) -> "KeyPair":
        return cls.from_secret(group.random_scalar(rng))

    @classmethod
    def derive(cls, group: Group, seed: bytes, label: str) -> "KeyPair":
        """Seed-derived test key; the same (seed, label) always gives the same pair."""
        sk = group.hash_to_scalar(b"willchain/key/v1", seed, label.encode("utf-8"))
        if sk.is_zero():
            sk = group.scalar(1)
        return cls.from_secret(sk)


class NonceSource(Protocol):
    def nonce(self, sk: Scalar, msg: bytes) -> Scalar: ...


@dataclass
class DeterministicNonceSource:
    """k = H(seed || sk || msg || counter); the counter advances on every draw."""

    seed: bytes = b""
    counter: int = field(default=0)

    def nonce(self, sk: Scalar, msg: bytes) -> Scalar:
        while True:
            k = sk.group.hash_to_scalar(
                b"willchain/nonce/v1", self.seed, sk.to_bytes(), msg, self.counter.to_bytes(8, "big")
            )
            self.counter += 1
            if not k.is_zero():
                return k


@dataclass
class RandomNonceSource:
    rng: random.Random

    def nonce(self, sk: Scalar, msg: bytes) -> Scalar:
        return sk.group.random_scalar(self.rng)
