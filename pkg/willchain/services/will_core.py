"""Pure will rules: minting, the per-component transition function, execution
and refungible share accounting. Nothing here touches balances; the chain
runtime applies the outputs these functions return."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from loguru import logger

from ..core.encoding import sha256
from ..core.errors import (
    ApprovalMissingError,
    ClaimRejectedError,
    NothingToClaimError,
    PrematureClaimError,
    PrematureExecutionError,
    UnauthorizedError,
    ValidationError,
)
from ..crypto.group import Group
from ..crypto.schnorr import KeyRegistry
from ..models.will import (
    DID_PREFIX,
    CheckinOccurred,
    ClaimSubmitted,
    ClaimWindow,
    ClaimWindowElapsed,
    ComponentDraft,
    ComponentOutput,
    ComponentState,
    ContractCall,
    Emit,
    ExecutionEvent,
    Expire,
    ShareLedger,
    SoulboundToken,
    Transfer,
    TransferEmit,
    Will,
    WillComponent,
    WillStatus,
)
from .claims import check_access, claim_message, verify_claim


def will_identifier(creator_pk: bytes, nonce: int) -> str:
    return sha256(creator_pk, nonce.to_bytes(8, "big")).hex()


def make_did(creator_pk: bytes, nonce: int) -> str:
    return DID_PREFIX + will_identifier(creator_pk, nonce)


def component_id(did: str, index: int) -> str:
    return f"{did}#{index}"


def contract_key(chain_id: str, address: str) -> str:
    return f"{chain_id}/{address}"


def create_will(
    creator: str,
    creator_pk: bytes,
    expiration: int,
    components: Sequence[ComponentDraft],
    beneficiaries: Sequence[str],
    nonce: int,
    current_height: int,
    *,
    approvals: Optional[Set[str]] = None,
    home_chain_id: str = "willchain-1",
    claim_window: int = 100,
) -> Tuple[Will, SoulboundToken]:
    if not components:
        raise ValidationError("a will must have at least one component")
    if expiration <= current_height:
        raise ValidationError(
            f"expiration {expiration} must be after the current height {current_height}"
        )
    approvals = approvals or set()
    for draft in components:
        if isinstance(draft.output, ContractCall):
            key = contract_key(draft.output.chain_id or home_chain_id, draft.output.contract_address)
            if key not in approvals:
                raise ApprovalMissingError(f"contract {key} has not been approved by {creator}")

    identifier = will_identifier(creator_pk, nonce)
    did = DID_PREFIX + identifier
    will = Will(
        did=did,
        creator=creator,
        creator_pk=creator_pk.hex(),
        nonce=nonce,
        created_at=current_height,
        expiration=expiration,
        components=[
            WillComponent(id=component_id(did, index), **draft.model_dump())
            for index, draft in enumerate(components)
        ],
        beneficiaries=list(beneficiaries),
        claim_window=claim_window,
    )
    token = SoulboundToken(token_id=identifier, owner=creator, will=did)
    logger.bind(did=did).info("will created with {} component(s)", len(components))
    return will, token


@dataclass(frozen=True)
class StepContext:
    """What the transition function needs to check a claim."""

    did: str
    chain_id: str
    expiration: int
    claim_window: int = 100
    group: Optional[Group] = None
    registry: Optional[KeyRegistry] = None


def expand_output(output: ComponentOutput) -> List[ComponentOutput]:
    if isinstance(output, TransferEmit):
        return [
            Transfer(to=output.to, amount=output.amount, denom=output.denom),
            Emit(message=output.message),
        ]
    return [output]


def _executed(comp: WillComponent) -> Tuple[WillComponent, List[ComponentOutput]]:
    return (
        comp.model_copy(update={"state": ComponentState.EXECUTED, "claim_window": None}),
        expand_output(comp.output),
    )


def may_claim(comp: WillComponent, claimant: str) -> bool:
    """The component's own access list and its requirement's must both admit the claimant."""
    return check_access(comp.access, claimant) and check_access(comp.requirement, claimant)


def _step_claim(
    comp: WillComponent, event: ClaimSubmitted, ctx: Optional[StepContext]
) -> Tuple[WillComponent, List[ComponentOutput]]:
    if ctx is None:
        raise ValueError("a claim needs a StepContext")
    if not comp.is_claim:
        raise ClaimRejectedError(f"{comp.id} is not claimable")
    if comp.state not in (ComponentState.INACTIVE, ComponentState.CANCELLED):
        raise ClaimRejectedError(f"{comp.id} is {comp.state.value}")
    if not may_claim(comp, event.claimant):
        raise UnauthorizedError(f"{event.claimant} may not claim {comp.id}")
    msg = claim_message(ctx.did, comp.id, event.claimant, ctx.chain_id)
    if not verify_claim(comp.requirement, event.evidence, msg, group=ctx.group, registry=ctx.registry):
        raise ClaimRejectedError(f"evidence for {comp.id} does not verify")
    if event.height >= ctx.expiration:
        return _executed(comp)
    window = ClaimWindow(start=event.height, length=ctx.claim_window, claimant=event.claimant)
    return comp.model_copy(update={"state": ComponentState.ACTIVE, "claim_window": window}), []


def step_component(
    comp: WillComponent, event: ExecutionEvent, ctx: Optional[StepContext] = None
) -> Tuple[WillComponent, List[ComponentOutput]]:
    """One application of the component transition function.

    Returns the new component and the outputs it produced; the input is
    never mutated.
    """
    if isinstance(event, ClaimSubmitted):
        return _step_claim(comp, event, ctx)

    if isinstance(event, Expire):
        if comp.state == ComponentState.INACTIVE and not comp.is_claim:
            return _executed(comp)
        if comp.state == ComponentState.ACTIVE:
            return _executed(comp)
        return comp, []

    if isinstance(event, CheckinOccurred):
        if comp.state == ComponentState.ACTIVE:
            return comp.model_copy(update={"state": ComponentState.CANCELLED, "claim_window": None}), []
        return comp, []

    if isinstance(event, ClaimWindowElapsed):
        if (
            comp.state == ComponentState.ACTIVE
            and comp.claim_window is not None
            and event.height >= comp.claim_window.end
        ):
            return _executed(comp)
        return comp, []

    raise ValueError(f"unknown execution event {event!r}")


def settle_status(will: Will) -> Will:
    """Executed once nothing claimable is left, otherwise expired (or still active)."""
    if will.status == WillStatus.ACTIVE:
        return will
    pending = any(c.is_claim and c.state != ComponentState.EXECUTED for c in will.components)
    status = WillStatus.EXPIRED if pending else WillStatus.EXECUTED
    if status == will.status:
        return will
    return will.model_copy(update={"status": status})


def execute_will(w: Will, height: int) -> Tuple[Will, List[ComponentOutput]]:
    if height < w.expiration:
        raise PrematureExecutionError(f"{w.did} expires at {w.expiration}, current height {height}")
    if w.status == WillStatus.EXECUTED:
        return w, []
    outputs: List[ComponentOutput] = []
    components = []
    for comp in w.components:
        new_comp, produced = step_component(comp, Expire(height=height))
        components.append(new_comp)
        outputs.extend(produced)
    will = w.model_copy(update={"components": components, "status": WillStatus.EXPIRED})
    will = settle_status(will)
    logger.bind(did=w.did, height=height).info(
        "will {} at height {} with {} output(s)", will.status.value, height, len(outputs)
    )
    return will, outputs


def replace_component(w: Will, comp: WillComponent) -> Will:
    return w.model_copy(
        update={"components": [comp if c.id == comp.id else c for c in w.components]}
    )


def mint_rft(w: Will, shares: Dict[str, int], escrow_amount: int) -> ShareLedger:
    if not shares:
        raise ValidationError(f"{w.did}: share map is empty")
    for holder, amount in shares.items():
        if amount <= 0:
            raise ValidationError(f"{w.did}: share of {holder} must be positive, got {amount}")
    if escrow_amount < 0:
        raise ValidationError("escrow amount cannot be negative")
    return ShareLedger(
        total=sum(shares.values()),
        balances=dict(shares),
        escrow=escrow_amount,
        initial_escrow=escrow_amount,
    )


def rft_claim(ledger: ShareLedger, claimant: str, w: Will) -> Tuple[ShareLedger, int]:
    """Burn all of the claimant's shares for floor(escrow * s_i / S)."""
    if w.status == WillStatus.ACTIVE:
        raise PrematureClaimError(f"{w.did} has not expired")
    held = ledger.balances.get(claimant, 0)
    if held == 0:
        raise NothingToClaimError(f"{claimant} holds no shares of {w.did}")
    payout = ledger.initial_escrow * held // ledger.total
    balances = dict(ledger.balances)
    balances[claimant] = 0
    new_ledger = ledger.model_copy(
        update={
            "balances": balances,
            "redeemed": ledger.redeemed + held,
            "escrow": ledger.escrow - payout,
            "paid": ledger.paid + payout,
        }
    )
    return new_ledger, payout
