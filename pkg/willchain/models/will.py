from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, model_validator

from .claims import AccessControl, ClaimEvidence, ClaimRequirement, ClaimType

DID_PREFIX = "did:will:"

CLAIM_TAGS = {t.value for t in ClaimType}
EXECUTION_TAGS = {"transfer", "emit", "ibc-msg", "ibc-send", "contract-call"}


class ComponentState(str, Enum):
    INACTIVE = "inactive"
    ACTIVE = "active"
    EXECUTED = "executed"
    CANCELLED = "cancelled"


class WillStatus(str, Enum):
    ACTIVE = "active"
    EXPIRED = "expired"
    EXECUTED = "executed"


class TransferEmit(BaseModel):
    type: Literal["transfer-emit"] = "transfer-emit"
    to: str
    amount: NonNegativeInt
    denom: str
    message: str


class Transfer(BaseModel):
    type: Literal["transfer"] = "transfer"
    to: str
    amount: NonNegativeInt
    denom: str


class IbcSend(BaseModel):
    type: Literal["ibc-send"] = "ibc-send"
    channel: str
    address: str
    amount: NonNegativeInt
    denom: str


class ContractCall(BaseModel):
    type: Literal["contract-call"] = "contract-call"
    contract_address: str
    payload: str = ""
    # None means a contract on the home chain
    chain_id: Optional[str] = None
    # escrow an eligible claim on this call releases; empty means all that is left
    release: Dict[str, PositiveInt] = Field(default_factory=dict)


class Emit(BaseModel):
    type: Literal["emit"] = "emit"
    message: str


ComponentOutput = Annotated[
    Union[TransferEmit, Transfer, IbcSend, ContractCall, Emit],
    Field(discriminator="type"),
]


class ClaimWindow(BaseModel):
    start: NonNegativeInt
    length: PositiveInt
    claimant: Optional[str] = None

    @property
    def end(self) -> int:
        return self.start + self.length


class ComponentDraft(BaseModel):
    """A component as written by the creator, before the will assigns it an id."""

    ctype: str
    access: AccessControl = Field(default_factory=AccessControl)
    output: ComponentOutput
    requirement: Optional[ClaimRequirement] = None

    @property
    def tags(self) -> List[str]:
        return self.ctype.split("+")

    @property
    def claim_type(self) -> Optional[ClaimType]:
        head = self.tags[0]
        return ClaimType(head) if head in CLAIM_TAGS else None

    @property
    def is_claim(self) -> bool:
        return self.claim_type is not None

    @model_validator(mode="after")
    def _check_shape(self):
        unknown = [t for t in self.tags if t not in CLAIM_TAGS | EXECUTION_TAGS]
        if unknown:
            raise ValueError(f"unknown component tag(s): {', '.join(unknown)}")
        if self.is_claim:
            if self.requirement is None:
                raise ValueError("claim components must carry a requirement")
            if self.requirement.claim_type != self.claim_type:
                raise ValueError("requirement claim type does not match the component type")
        elif self.requirement is not None:
            raise ValueError("execution components do not carry a requirement")
        return self


class WillComponent(ComponentDraft):
    id: str
    state: ComponentState = ComponentState.INACTIVE
    claim_window: Optional[ClaimWindow] = None
    attachment: Optional[str] = None


class Will(BaseModel):
    did: str
    creator: str
    creator_pk: str
    nonce: NonNegativeInt
    created_at: NonNegativeInt
    expiration: NonNegativeInt
    components: List[WillComponent] = Field(min_length=1)
    beneficiaries: List[str] = Field(default_factory=list)
    status: WillStatus = WillStatus.ACTIVE
    claim_window: PositiveInt = 100
    checkin_contract: Optional[str] = None

    def component(self, component_id: str) -> WillComponent:
        for comp in self.components:
            if comp.id == component_id:
                return comp
        raise KeyError(component_id)


class SoulboundToken(BaseModel):
    model_config = ConfigDict(frozen=True)

    token_id: str
    owner: str
    will: str


class ShareLedger(BaseModel):
    """Refungible shares over a will escrow.

    `total` never changes; redeemed shares move from `balances` to `redeemed`,
    so sum(balances) + redeemed == total.
    """

    total: PositiveInt
    balances: Dict[str, NonNegativeInt]
    escrow: NonNegativeInt
    initial_escrow: NonNegativeInt
    redeemed: NonNegativeInt = 0
    paid: NonNegativeInt = 0

    @property
    def dust(self) -> int:
        """What stays in escrow once every holder has redeemed."""
        owed = sum(self.initial_escrow * s // self.total for s in self.balances.values())
        return self.escrow - owed


# Inputs to the component transition function.

class Expire(BaseModel):
    kind: Literal["expire"] = "expire"
    height: NonNegativeInt


class ClaimSubmitted(BaseModel):
    kind: Literal["claim"] = "claim"
    evidence: ClaimEvidence
    claimant: str
    height: NonNegativeInt


class ClaimWindowElapsed(BaseModel):
    kind: Literal["window-elapsed"] = "window-elapsed"
    height: NonNegativeInt


class CheckinOccurred(BaseModel):
    kind: Literal["checkin"] = "checkin"
    height: NonNegativeInt


ExecutionEvent = Annotated[
    Union[Expire, ClaimSubmitted, ClaimWindowElapsed, CheckinOccurred],
    Field(discriminator="kind"),
]
