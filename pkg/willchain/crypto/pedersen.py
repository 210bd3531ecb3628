from __future__ import annotations

from dataclasses import dataclass

from .group import PEDERSEN_H_TAG, Group, GroupElement, Scalar


@dataclass(frozen=True)
class PedersenParams:
    g: GroupElement
    h: GroupElement

    def __post_init__(self) -> None:
        if self.h.is_identity():
            raise ValueError("second generator must not be the identity")

    @property
    def group(self) -> Group:
        return self.g.group

    @classmethod
    def derive(cls, group: Group, tag: bytes = PEDERSEN_H_TAG) -> "PedersenParams":
        """g is the standard generator; h comes from hash-to-group so nobody knows log_g(h)."""
        return cls(g=group.generator(), h=group.hash_to_group(tag))


@dataclass(frozen=True)
class Commitment:
    point: GroupElement

    def __mul__(self, other: "Commitment") -> "Commitment":
        return Commitment(self.point * other.point)

    def to_bytes(self) -> bytes:
        return self.point.to_bytes()

    def hex(self) -> str:
        return self.point.hex()

    @classmethod
    def from_hex(cls, group: Group, value: str) -> "Commitment":
        return cls(group.element_from_hex(value))


_PARAMS: dict[str, PedersenParams] = {}


def default_params(group: Group) -> PedersenParams:
    params = _PARAMS.get(group.name)
    if params is None:
        params = _PARAMS[group.name] = PedersenParams.derive(group)
    return params


def pedersen_commit(params: PedersenParams, m: Scalar | int, r: Scalar | int) -> Commitment:
    return Commitment((params.g ** m) * (params.h ** r))


def pedersen_verify_opening(
    params: PedersenParams, c: Commitment, m: Scalar | int, r: Scalar | int
) -> bool:
    return pedersen_commit(params, m, r).point == c.point
