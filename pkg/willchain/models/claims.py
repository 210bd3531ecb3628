from enum import Enum
from typing import Annotated, List, Literal, Union

from pydantic import BaseModel, Field, model_validator


class ClaimType(str, Enum):
    DIRECT = "direct"
    SCHNORR = "schnorr-claim"
    PEDERSEN = "pedersen-claim"
    GNARK = "gnark-claim"
    SIGNATURE_PROOF = "signature-proof"


class Visibility(str, Enum):
    PUBLIC = "public"
    PRIVATE = "private"


class AccessControl(BaseModel):
    visibility: Visibility = Visibility.PUBLIC
    allowed: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _private_needs_allowed(self):
        if self.visibility == Visibility.PRIVATE and not self.allowed:
            raise ValueError("private access requires a nonempty allowed list")
        return self


# What a requirement stores, one variant per claim type.

class BeneficiaryAddress(BaseModel):
    kind: Literal["beneficiary-address"] = "beneficiary-address"
    address: str


class StoredCommitment(BaseModel):
    kind: Literal["commitment"] = "commitment"
    commitment: str


class SignerSet(BaseModel):
    kind: Literal["signer-set"] = "signer-set"
    public_keys: List[str] = Field(min_length=1)


class StatementKey(BaseModel):
    kind: Literal["statement-key"] = "statement-key"
    public_key: str


class SignatureHash(BaseModel):
    kind: Literal["signature-hash"] = "signature-hash"
    h_s: str
    public_key: str


Expected = Annotated[
    Union[BeneficiaryAddress, StoredCommitment, SignerSet, StatementKey, SignatureHash],
    Field(discriminator="kind"),
]

EXPECTED_KIND = {
    ClaimType.DIRECT: "beneficiary-address",
    ClaimType.PEDERSEN: "commitment",
    ClaimType.SCHNORR: "signer-set",
    ClaimType.GNARK: "statement-key",
    ClaimType.SIGNATURE_PROOF: "signature-hash",
}


class ClaimRequirement(BaseModel):
    claim_type: ClaimType
    expected: Expected
    access: AccessControl = Field(default_factory=AccessControl)

    @model_validator(mode="after")
    def _expected_matches_type(self):
        if EXPECTED_KIND[self.claim_type] != self.expected.kind:
            raise ValueError(
                f"{self.claim_type.value} requires a {EXPECTED_KIND[self.claim_type]} expectation"
            )
        return self


# Evidence submitted by a claimant. Byte strings are lowercase hex.

class DirectSig(BaseModel):
    kind: Literal["direct-sig"] = "direct-sig"
    signature: str
    public_key: str


class PedersenOpening(BaseModel):
    kind: Literal["pedersen-opening"] = "pedersen-opening"
    m: str
    r: str

    def __repr__(self) -> str:
        return "PedersenOpening(<hidden>)"

    __str__ = __repr__


class Aggregate(BaseModel):
    kind: Literal["aggregate"] = "aggregate"
    nonce_points: List[str]
    response_sum: str
    signer_pks: List[str]


class KnowledgeProof(BaseModel):
    kind: Literal["knowledge-proof"] = "knowledge-proof"
    commitment: str
    response: str


class SignatureReveal(BaseModel):
    kind: Literal["signature-reveal"] = "signature-reveal"
    signature: str


ClaimEvidence = Annotated[
    Union[DirectSig, PedersenOpening, Aggregate, KnowledgeProof, SignatureReveal],
    Field(discriminator="kind"),
]

EVIDENCE_KIND = {
    ClaimType.DIRECT: "direct-sig",
    ClaimType.PEDERSEN: "pedersen-opening",
    ClaimType.SCHNORR: "aggregate",
    ClaimType.GNARK: "knowledge-proof",
    ClaimType.SIGNATURE_PROOF: "signature-reveal",
}
