"""Schnorr signatures over any `Group`, plus non-interactive aggregation.

Aggregation keeps per-signer challenges c_i = H(R_i, pk_i, msg) and only
sums the responses, so the verifier checks

    g^(sum s_i) == prod(R_i * pk_i^c_i)

Members must have registered a proof of possession for their key first;
without it a rogue key could cancel out honest ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from loguru import logger

from ..core.errors import AggregationRejectedError, InvalidEncodingError, ValidationError
from .group import Group, GroupElement, Scalar
from .keys import KeyPair, NonceSource
from .proofs import DlogProof, dlog_prove, dlog_verify

SCHNORR_TAG = b"willchain/schnorr/v1"
POP_TAG = b"willchain/pop/v1"


@dataclass(frozen=True)
class SchnorrSignature:
    nonce_point: GroupElement
    response: Scalar

    def to_bytes(self) -> bytes:
        return self.nonce_point.to_bytes() + self.response.to_bytes()

    def hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "SchnorrSignature":
        if len(data) != group.element_size + group.scalar_size:
            raise InvalidEncodingError("signature has the wrong length")
        size = group.element_size
        return cls(group.decode_element(data[:size]), group.decode_scalar(data[size:]))

    @classmethod
    def from_hex(cls, group: Group, value: str) -> "SchnorrSignature":
        try:
            raw = bytes.fromhex(value)
        except (TypeError, ValueError) as exc:
            raise InvalidEncodingError("signature is not valid hex") from exc
        return cls.from_bytes(group, raw)


@dataclass(frozen=True)
class AggregateSignature:
    nonce_points: tuple[GroupElement, ...]
    response_sum: Scalar
    signer_pks: tuple[GroupElement, ...]

    def __post_init__(self) -> None:
        if len(self.nonce_points) != len(self.signer_pks):
            raise InvalidEncodingError("nonce points and signer keys differ in length")
        if not self.signer_pks:
            raise InvalidEncodingError("aggregate signature has no signers")


def schnorr_challenge(nonce_point: GroupElement, pk: GroupElement, msg: bytes) -> Scalar:
    return pk.group.hash_to_scalar(SCHNORR_TAG, nonce_point.to_bytes(), pk.to_bytes(), msg)


def schnorr_sign(kp: KeyPair, msg: bytes, nonce_source: NonceSource) -> SchnorrSignature:
    k = nonce_source.nonce(kp.sk, msg)
    nonce_point = kp.group.generator() ** k
    c = schnorr_challenge(nonce_point, kp.pk, msg)
    return SchnorrSignature(nonce_point=nonce_point, response=k + c * kp.sk)


def schnorr_verify(pk: GroupElement, msg: bytes, sig: SchnorrSignature) -> bool:
    group = pk.group
    if sig.nonce_point.group is not group or sig.response.group is not group:
        raise InvalidEncodingError("signature and key belong to different groups")
    c = schnorr_challenge(sig.nonce_point, pk, msg)
    return group.generator() ** sig.response == sig.nonce_point * (pk ** c)


@dataclass
class KeyRegistry:
    """Public keys that have proven possession of their secret."""

    group: Group
    keys: set[bytes] = field(default_factory=set)

    def __contains__(self, pk: GroupElement) -> bool:
        return pk.to_bytes() in self.keys

    def __len__(self) -> int:
        return len(self.keys)

    def encoded(self) -> list[str]:
        return sorted(k.hex() for k in self.keys)

    @classmethod
    def from_encoded(cls, group: Group, keys: Iterable[str]) -> "KeyRegistry":
        return cls(group, {bytes.fromhex(k) for k in keys})


def pop_context(pk: GroupElement) -> bytes:
    return POP_TAG + pk.to_bytes()


def make_pop(kp: KeyPair, nonce_source: NonceSource) -> DlogProof:
    return dlog_prove(kp, pop_context(kp.pk), nonce_source)


def register_key(registry: KeyRegistry, pk: GroupElement, pop: DlogProof) -> None:
    if pk.is_identity():
        raise ValidationError("identity cannot be registered as a public key")
    if not dlog_verify(pk, pop_context(pk), pop):
        raise ValidationError("proof of possession does not verify")
    registry.keys.add(pk.to_bytes())


def schnorr_aggregate(
    sigs: Sequence[tuple[SchnorrSignature, GroupElement]],
    msg: bytes,
    registry: KeyRegistry,
) -> AggregateSignature:
    if not sigs:
        raise AggregationRejectedError("nothing to aggregate")
    for index, (sig, pk) in enumerate(sigs):
        if pk not in registry:
            logger.debug("aggregation rejected: member {} has no proof of possession", index)
            raise AggregationRejectedError(f"signer {index} has no registered proof of possession")
        if not schnorr_verify(pk, msg, sig):
            logger.debug("aggregation rejected: member {} signature invalid", index)
            raise AggregationRejectedError(f"signature of signer {index} does not verify")
    group = sigs[0][1].group
    total = group.scalar(0)
    for sig, _ in sigs:
        total = total + sig.response
    return AggregateSignature(
        nonce_points=tuple(sig.nonce_point for sig, _ in sigs),
        response_sum=total,
        signer_pks=tuple(pk for _, pk in sigs),
    )


def schnorr_aggregate_verify(agg: AggregateSignature, msg: bytes) -> bool:
    if len(agg.nonce_points) != len(agg.signer_pks) or not agg.signer_pks:
        raise InvalidEncodingError("malformed aggregate signature")
    group = agg.signer_pks[0].group
    expected = group.identity()
    for nonce_point, pk in zip(agg.nonce_points, agg.signer_pks):
        expected = expected * nonce_point * (pk ** schnorr_challenge(nonce_point, pk, msg))
    return group.generator() ** agg.response_sum == expected
