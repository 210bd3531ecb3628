from typing import Callable, Dict, Optional

from loguru import logger

from ..core.encoding import hash_fields, sha256
from ..core.errors import EvidenceTypeError, InvalidEncodingError, UnsupportedClaimError
from ..crypto.group import Group, GroupElement, Scalar, production_group
from ..crypto.keys import KeyPair, NonceSource
from ..crypto.pedersen import Commitment, default_params, pedersen_verify_opening
from ..crypto.proofs import DlogProof, dlog_prove, dlog_verify
from ..crypto.schnorr import (
    AggregateSignature,
    KeyRegistry,
    SchnorrSignature,
    schnorr_aggregate_verify,
    schnorr_sign,
    schnorr_verify,
)
from ..models.claims import (
    EVIDENCE_KIND,
    AccessControl,
    Aggregate,
    BeneficiaryAddress,
    ClaimEvidence,
    ClaimRequirement,
    ClaimType,
    DirectSig,
    KnowledgeProof,
    PedersenOpening,
    SignatureHash,
    SignatureReveal,
    SignerSet,
    StatementKey,
    StoredCommitment,
    Visibility,
)

ADDRESS_BYTES = 20

# Beneficiaries sign this once at setup for signature-proof components.
SIGNATURE_PROOF_CHALLENGE = b"willchain/signature-proof/challenge/v1"


def derive_address(pk: GroupElement) -> str:
    return sha256(pk.to_bytes())[:ADDRESS_BYTES].hex()


def claim_message(did: str, component_id: str, claimant: str, chain_id: str) -> bytes:
    """Binds evidence to one will, one component, one claimant and one chain."""
    return hash_fields(
        did.encode("utf-8"),
        component_id.encode("utf-8"),
        claimant.encode("utf-8"),
        chain_id.encode("utf-8"),
    )


def check_access(access: AccessControl | ClaimRequirement, caller: str) -> bool:
    if isinstance(access, ClaimRequirement):
        access = access.access
    if access.visibility == Visibility.PUBLIC:
        return True
    return caller in access.allowed


def signature_hash(sig: SchnorrSignature) -> str:
    return sha256(sig.to_bytes()).hex()


# Evidence builders, used by the simulation keyring and by tests.

def direct_evidence(kp: KeyPair, claim_msg: bytes, nonce_source: NonceSource) -> DirectSig:
    sig = schnorr_sign(kp, claim_msg, nonce_source)
    return DirectSig(signature=sig.hex(), public_key=kp.pk.hex())


def pedersen_evidence(m: Scalar, r: Scalar) -> PedersenOpening:
    return PedersenOpening(m=m.hex(), r=r.hex())


def aggregate_evidence(agg: AggregateSignature) -> Aggregate:
    return Aggregate(
        nonce_points=[p.hex() for p in agg.nonce_points],
        response_sum=agg.response_sum.hex(),
        signer_pks=[pk.hex() for pk in agg.signer_pks],
    )


def knowledge_evidence(kp: KeyPair, claim_msg: bytes, nonce_source: NonceSource) -> KnowledgeProof:
    proof = dlog_prove(kp, claim_msg, nonce_source)
    return KnowledgeProof(commitment=proof.commitment.hex(), response=proof.response.hex())


def signature_proof_setup(kp: KeyPair, nonce_source: NonceSource) -> tuple[SignatureHash, SignatureReveal]:
    """Beneficiary side: pre-sign the fixed challenge; the creator stores only its hash."""
    sig = schnorr_sign(kp, SIGNATURE_PROOF_CHALLENGE, nonce_source)
    return (
        SignatureHash(h_s=signature_hash(sig), public_key=kp.pk.hex()),
        SignatureReveal(signature=sig.hex()),
    )


# Verification paths, one per claim type.

def _verify_direct(expected: BeneficiaryAddress, ev: DirectSig, msg: bytes, group: Group, registry) -> bool:
    pk = group.element_from_hex(ev.public_key)
    if derive_address(pk) != expected.address:
        return False
    return schnorr_verify(pk, msg, SchnorrSignature.from_hex(group, ev.signature))


def _verify_pedersen(expected: StoredCommitment, ev: PedersenOpening, msg: bytes, group: Group, registry) -> bool:
    # A commitment opening is not bound to the claim message.
    params = default_params(group)
    return pedersen_verify_opening(
        params,
        Commitment.from_hex(group, expected.commitment),
        group.scalar_from_hex(ev.m),
        group.scalar_from_hex(ev.r),
    )


def _verify_aggregate(expected: SignerSet, ev: Aggregate, msg: bytes, group: Group, registry) -> bool:
    if sorted(ev.signer_pks) != sorted(expected.public_keys):
        return False
    if len(ev.nonce_points) != len(ev.signer_pks):
        raise InvalidEncodingError("aggregate nonce points and signer keys differ in length")
    signers = [group.element_from_hex(pk) for pk in ev.signer_pks]
    if registry is not None and any(pk not in registry for pk in signers):
        return False
    agg = AggregateSignature(
        nonce_points=tuple(group.element_from_hex(p) for p in ev.nonce_points),
        response_sum=group.scalar_from_hex(ev.response_sum),
        signer_pks=tuple(signers),
    )
    return schnorr_aggregate_verify(agg, msg)


def _verify_knowledge(expected: StatementKey, ev: KnowledgeProof, msg: bytes, group: Group, registry) -> bool:
    proof = DlogProof(group.element_from_hex(ev.commitment), group.scalar_from_hex(ev.response))
    return dlog_verify(group.element_from_hex(expected.public_key), msg, proof)


def _verify_signature_reveal(expected: SignatureHash, ev: SignatureReveal, msg: bytes, group: Group, registry) -> bool:
    sig = SchnorrSignature.from_hex(group, ev.signature)
    if signature_hash(sig) != expected.h_s:
        return False
    return schnorr_verify(group.element_from_hex(expected.public_key), SIGNATURE_PROOF_CHALLENGE, sig)


_VERIFIERS: Dict[ClaimType, Callable[..., bool]] = {
    ClaimType.DIRECT: _verify_direct,
    ClaimType.PEDERSEN: _verify_pedersen,
    ClaimType.SCHNORR: _verify_aggregate,
    ClaimType.GNARK: _verify_knowledge,
    ClaimType.SIGNATURE_PROOF: _verify_signature_reveal,
}


def verify_claim(
    req: ClaimRequirement,
    ev: ClaimEvidence,
    claim_msg: bytes,
    *,
    group: Optional[Group] = None,
    registry: Optional[KeyRegistry] = None,
) -> bool:
    """Check claim evidence against a stored requirement.

    Malformed hex or points count as invalid evidence, not as errors: a
    claimant can always submit garbage and the answer is simply no.
    """
    verifier = _VERIFIERS.get(req.claim_type)
    if verifier is None:
        raise UnsupportedClaimError(f"no verification path for claim type {req.claim_type!r}")
    if EVIDENCE_KIND[req.claim_type] != ev.kind:
        raise EvidenceTypeError(
            f"{req.claim_type.value} expects {EVIDENCE_KIND[req.claim_type]} evidence, got {ev.kind}"
        )
    group = group or production_group()
    try:
        valid = verifier(req.expected, ev, claim_msg, group, registry)
    except InvalidEncodingError as exc:
        logger.debug("claim evidence of kind {} is malformed: {}", ev.kind, exc.message)
        return False
    logger.debug("claim evidence of kind {} verified: {}", ev.kind, valid)
    return valid
