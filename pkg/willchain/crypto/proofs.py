"""Non-interactive proof of knowledge of a discrete logarithm.

Prover knows x with P = g^x. Commit R = g^k, challenge c = H(R, P, context)
(Fiat-Shamir), respond z = k + c*x. Verifier checks g^z == R * P^c.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core.errors import InvalidEncodingError
from .group import Group, GroupElement, Scalar
from .keys import KeyPair, NonceSource

DLOG_TAG = b"willchain/dlog/v1"


@dataclass(frozen=True)
class DlogProof:
    commitment: GroupElement
    response: Scalar

    def to_bytes(self) -> bytes:
        return self.commitment.to_bytes() + self.response.to_bytes()

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "DlogProof":
        if len(data) != group.element_size + group.scalar_size:
            raise InvalidEncodingError("proof has the wrong length")
        size = group.element_size
        return cls(group.decode_element(data[:size]), group.decode_scalar(data[size:]))


def dlog_challenge(commitment: GroupElement, statement: GroupElement, context: bytes) -> Scalar:
    return commitment.group.hash_to_scalar(
        DLOG_TAG, commitment.to_bytes(), statement.to_bytes(), context
    )


def dlog_prove(kp: KeyPair, context: bytes, nonce_source: NonceSource) -> DlogProof:
    k = nonce_source.nonce(kp.sk, DLOG_TAG + context)
    commitment = kp.group.generator() ** k
    c = dlog_challenge(commitment, kp.pk, context)
    return DlogProof(commitment=commitment, response=k + c * kp.sk)


def dlog_verify(statement: GroupElement, context: bytes, proof: DlogProof) -> bool:
    group = statement.group
    if proof.commitment.group is not group or proof.response.group is not group:
        raise InvalidEncodingError("proof and statement belong to different groups")
    c = dlog_challenge(proof.commitment, statement, context)
    return group.generator() ** proof.response == proof.commitment * (statement ** c)
