class WillchainError(Exception):
    """Base error; `code` is stable and appears in reports and CLI output."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class ValidationError(WillchainError):
    code = "validation"


class InvalidEncodingError(WillchainError):
    code = "invalid-encoding"


class AggregationRejectedError(WillchainError):
    code = "aggregation-rejected"


class DecryptionError(WillchainError):
    code = "decryption-failure"


class EvidenceTypeError(WillchainError):
    code = "evidence-type"


class UnsupportedClaimError(WillchainError):
    code = "unsupported-claim"


class ClaimRejectedError(WillchainError):
    code = "claim-rejected"


class UnauthorizedError(WillchainError):
    code = "unauthorized"


class ApprovalMissingError(WillchainError):
    code = "approval-missing"


class PrematureExecutionError(WillchainError):
    code = "premature-execution"


class PrematureClaimError(WillchainError):
    code = "premature-claim"


class NothingToClaimError(WillchainError):
    code = "nothing-to-claim"


class AuthError(WillchainError):
    code = "auth"


class BalanceError(WillchainError):
    code = "balance"


class TooLateError(WillchainError):
    code = "too-late"


class NotEncapsulableError(WillchainError):
    code = "not-encapsulable"


class ChannelNotFoundError(WillchainError):
    code = "channel-not-found"


class ReplayRejectedError(WillchainError):
    code = "replay-rejected"


class ProofRejectedError(WillchainError):
    code = "proof-rejected"


class ChunkMissingError(WillchainError):
    code = "chunk-missing"


class CorruptionDetectedError(WillchainError):
    code = "corruption-detected"


class CellOccupiedError(WillchainError):
    code = "cell-occupied"


class PrematureRevealError(WillchainError):
    code = "premature-reveal"


class NotFoundError(WillchainError):
    code = "not-found"


class InputError(WillchainError):
    code = "input"


class ScenarioAssertionError(WillchainError):
    code = "assertion"
