from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, NonNegativeInt, PositiveInt, model_validator

from ..core.config import settings
from .claims import ClaimEvidence
from .interchain import Packet
from .will import ComponentDraft, ShareLedger, SoulboundToken, Will


class ChainParams(BaseModel):
    chain_id: str = "willchain-1"
    native_denom: str = settings.NATIVE_DENOM
    penalty_amount: NonNegativeInt = settings.PENALTY_AMOUNT
    checkin_period: PositiveInt = settings.CHECKIN_PERIOD
    claim_window: PositiveInt = settings.CLAIM_WINDOW
    tx_fee: NonNegativeInt = settings.TX_FEE


class Account(BaseModel):
    address: str
    pk: Optional[str] = None
    balances: Dict[str, NonNegativeInt] = Field(default_factory=dict)
    sponsor: Optional[str] = None
    sequence: NonNegativeInt = 0

    @model_validator(mode="after")
    def _sponsor_not_self(self):
        if self.sponsor is not None and self.sponsor == self.address:
            raise ValueError("an account cannot sponsor itself")
        return self

    def balance(self, denom: str) -> int:
        return self.balances.get(denom, 0)


class GenesisAccount(BaseModel):
    """Either a raw address or a keyring alias resolved by the simulation."""

    address: Optional[str] = None
    alias: Optional[str] = None
    balance: NonNegativeInt = 0

    @model_validator(mode="after")
    def _one_identity(self):
        if (self.address is None) == (self.alias is None):
            raise ValueError("genesis accounts need exactly one of address or alias")
        return self


class Genesis(BaseModel):
    chain_id: str = "willchain-1"
    accounts: List[GenesisAccount] = Field(default_factory=list)
    penalty_amount: NonNegativeInt = settings.PENALTY_AMOUNT
    checkin_period: PositiveInt = settings.CHECKIN_PERIOD
    claim_window_default: PositiveInt = settings.CLAIM_WINDOW
    tx_fee: NonNegativeInt = settings.TX_FEE
    native_denom: str = settings.NATIVE_DENOM

    def params(self) -> ChainParams:
        return ChainParams(
            chain_id=self.chain_id,
            native_denom=self.native_denom,
            penalty_amount=self.penalty_amount,
            checkin_period=self.checkin_period,
            claim_window=self.claim_window_default,
            tx_fee=self.tx_fee,
        )


# Transaction bodies

class CreateWill(BaseModel):
    type: Literal["create-will"] = "create-will"
    expiration: NonNegativeInt
    components: List[ComponentDraft]
    beneficiaries: List[str] = Field(default_factory=list)
    nonce: NonNegativeInt = 0
    deposit: NonNegativeInt = 0
    shares: Dict[str, int] = Field(default_factory=dict)
    rft_escrow: NonNegativeInt = 0
    claim_window: Optional[PositiveInt] = None


class Checkin(BaseModel):
    type: Literal["checkin"] = "checkin"
    did: str


class Claim(BaseModel):
    type: Literal["claim"] = "claim"
    did: str
    component_id: str
    evidence: ClaimEvidence


class InterchainClaim(BaseModel):
    type: Literal["interchain-claim"] = "interchain-claim"
    did: str
    component_id: str
    evidence: ClaimEvidence
    recipient: str


class TransferTx(BaseModel):
    type: Literal["transfer"] = "transfer"
    to: str
    amount: NonNegativeInt
    denom: Optional[str] = None


class ApproveContract(BaseModel):
    type: Literal["approve-contract"] = "approve-contract"
    chain_id: str
    address: str


class AdvanceNoop(BaseModel):
    type: Literal["advance-noop"] = "advance-noop"


class RftClaim(BaseModel):
    type: Literal["rft-claim"] = "rft-claim"
    did: str


class Sponsor(BaseModel):
    type: Literal["sponsor"] = "sponsor"
    account: str


class RegisterKey(BaseModel):
    """Publish a proof of possession so the key may join aggregate signatures."""

    type: Literal["register-key"] = "register-key"
    pop_commitment: str
    pop_response: str


class RegisterCheckinContract(BaseModel):
    type: Literal["register-checkin-contract"] = "register-checkin-contract"
    did: str
    contract: str


class ContractCheckin(BaseModel):
    type: Literal["contract-checkin"] = "contract-checkin"
    did: str


TxBody = Annotated[
    Union[
        CreateWill,
        Checkin,
        Claim,
        InterchainClaim,
        TransferTx,
        ApproveContract,
        AdvanceNoop,
        RftClaim,
        Sponsor,
        RegisterKey,
        RegisterCheckinContract,
        ContractCheckin,
    ],
    Field(discriminator="type"),
]


class Tx(BaseModel):
    sender: str
    public_key: str
    nonce: NonNegativeInt
    body: TxBody
    fee_payer: Optional[str] = None
    signature: str = ""

    def signing_payload(self, chain_id: str) -> Dict[str, Any]:
        payload = self.model_dump(mode="json", exclude={"signature"})
        payload["chain_id"] = chain_id
        return payload


class ChainEvent(BaseModel):
    height: NonNegativeInt
    type: str
    attributes: Dict[str, Any] = Field(default_factory=dict)


class TxResult(BaseModel):
    ok: bool
    code: str = "ok"
    message: str = ""
    events: List[ChainEvent] = Field(default_factory=list)
    data: Dict[str, Any] = Field(default_factory=dict)


class PendingInterchainClaim(BaseModel):
    did: str
    component_id: str
    claimant: str
    recipient: str
    evidence: ClaimEvidence
    channel: str
    # penalty held back while the will is still active; burned on an early verdict
    bond: NonNegativeInt = 0


class ChainState(BaseModel):
    height: NonNegativeInt = 0
    params: ChainParams = Field(default_factory=ChainParams)
    supply: NonNegativeInt = 0
    burned: NonNegativeInt = 0
    accounts: Dict[str, Account] = Field(default_factory=dict)
    wills: Dict[str, Will] = Field(default_factory=dict)
    tokens: Dict[str, SoulboundToken] = Field(default_factory=dict)
    expiration_index: Dict[int, List[str]] = Field(default_factory=dict)
    window_index: Dict[int, List[str]] = Field(default_factory=dict)
    share_ledgers: Dict[str, ShareLedger] = Field(default_factory=dict)
    approvals: Dict[str, List[str]] = Field(default_factory=dict)
    registered_keys: List[str] = Field(default_factory=list)
    checkin_contracts: Dict[str, str] = Field(default_factory=dict)
    # interchain endpoint of the will module
    channels: Dict[str, str] = Field(default_factory=dict)
    outbox: Dict[str, Packet] = Field(default_factory=dict)
    next_sequence: Dict[str, int] = Field(default_factory=dict)
    receipts: Dict[str, NonNegativeInt] = Field(default_factory=dict)
    interchain_claims: Dict[str, PendingInterchainClaim] = Field(default_factory=dict)
