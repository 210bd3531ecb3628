"""Prime-order groups behind one multiplicative interface.

Two backends are provided: secp256k1 for everything the chain does, and a
tiny multiplicative subgroup of Z_607^* of order 101 whose elements can be
enumerated, so verification equations can be checked against brute force.

The group operation is written as multiplication (``a * b``) and repeated
application as exponentiation (``g ** k``), whatever the backend does
underneath.
"""

from __future__ import annotations

import random
import secrets
from abc import ABC, abstractmethod
from itertools import count
from typing import Any, Iterator

from coincurve import PublicKey

from ..core.encoding import hash_fields, sha256
from ..core.errors import InvalidEncodingError

PEDERSEN_H_TAG = b"willchain/pedersen/h/v1"


class Scalar:
    """Integer modulo the group order."""

    __slots__ = ("group", "value")

    def __init__(self, group: "Group", value: int):
        self.group = group
        self.value = value % group.order

    def _coerce(self, other: "Scalar | int") -> int:
        if isinstance(other, Scalar):
            if other.group is not self.group:
                raise InvalidEncodingError("scalars belong to different groups")
            return other.value
        return other

    def __add__(self, other: "Scalar | int") -> "Scalar":
        return Scalar(self.group, self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: "Scalar | int") -> "Scalar":
        return Scalar(self.group, self.value - self._coerce(other))

    def __rsub__(self, other: int) -> "Scalar":
        return Scalar(self.group, other - self.value)

    def __mul__(self, other: "Scalar | int") -> "Scalar":
        return Scalar(self.group, self.value * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Scalar":
        return Scalar(self.group, -self.value)

    def inverse(self) -> "Scalar":
        if self.value == 0:
            raise ZeroDivisionError("zero scalar has no inverse")
        return Scalar(self.group, pow(self.value, -1, self.group.order))

    def is_zero(self) -> bool:
        return self.value == 0

    def __int__(self) -> int:
        return self.value

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self.group is other.group and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.group.order
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.group.name, self.value))

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(self.group.scalar_size, "little")

    def hex(self) -> str:
        return self.to_bytes().hex()

    def __repr__(self) -> str:
        return f"Scalar({self.group.name}, {self.value})"


class GroupElement:
    """Element of a prime-order group; immutable."""

    __slots__ = ("group", "value")

    def __init__(self, group: "Group", value: Any):
        self.group = group
        self.value = value

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.group is not self.group:
            raise InvalidEncodingError("elements belong to different groups")
        return GroupElement(self.group, self.group._op(self.value, other.value))

    def __pow__(self, exponent: "Scalar | int") -> "GroupElement":
        k = exponent.value if isinstance(exponent, Scalar) else exponent % self.group.order
        if self.value == self.group._generator_value:
            return GroupElement(self.group, self.group._exp_generator(k))
        return GroupElement(self.group, self.group._exp(self.value, k))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, self.group._inv(self.value))

    def __truediv__(self, other: "GroupElement") -> "GroupElement":
        return self * other.inverse()

    def is_identity(self) -> bool:
        return self.value == self.group._identity_value

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.group is other.group and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.group.name, self.value))

    def to_bytes(self) -> bytes:
        return self.group._encode(self.value)

    def hex(self) -> str:
        return self.to_bytes().hex()

    def __repr__(self) -> str:
        return f"GroupElement({self.group.name}, {self.hex()})"


class Group(ABC):
    name: str
    order: int
    element_size: int

    _identity_value: Any
    _generator_value: Any

    @property
    def scalar_size(self) -> int:
        return (self.order.bit_length() + 7) // 8

    # backend primitives
    @abstractmethod
    def _op(self, a: Any, b: Any) -> Any: ...

    @abstractmethod
    def _exp(self, a: Any, k: int) -> Any: ...

    @abstractmethod
    def _inv(self, a: Any) -> Any: ...

    @abstractmethod
    def _encode(self, a: Any) -> bytes: ...

    @abstractmethod
    def _decode(self, data: bytes) -> Any: ...

    @abstractmethod
    def _map_to_element(self, digest: bytes) -> Any | None:
        """Candidate element for hash-to-group, or None to try the next counter."""

    def _exp_generator(self, k: int) -> Any:
        return self._exp(self._generator_value, k)

    # public interface
    def scalar(self, value: int) -> Scalar:
        return Scalar(self, value)

    def identity(self) -> GroupElement:
        return GroupElement(self, self._identity_value)

    def generator(self) -> GroupElement:
        return GroupElement(self, self._generator_value)

    def random_scalar(self, rng: random.Random | None = None) -> Scalar:
        """Uniform nonzero scalar from [1, q-1]."""
        rng = rng or secrets.SystemRandom()
        return Scalar(self, rng.randrange(1, self.order))

    def hash_to_scalar(self, *parts: bytes) -> Scalar:
        # Widen to 64 bytes so the reduction bias is negligible for a 256-bit order.
        wide = hash_fields(*parts) + sha256(b"wide", *parts)
        return Scalar(self, int.from_bytes(wide, "big"))

    def hash_to_group(self, tag: bytes, data: bytes = b"") -> GroupElement:
        """Try-and-increment; the discrete log of the result is unknown to everyone."""
        for counter in count():
            candidate = self._map_to_element(hash_fields(tag, data, counter.to_bytes(4, "big")))
            if candidate is not None and candidate != self._identity_value:
                return GroupElement(self, candidate)
        raise AssertionError("unreachable")

    def decode_element(self, data: bytes) -> GroupElement:
        if len(data) != self.element_size:
            raise InvalidEncodingError(
                f"{self.name} element must be {self.element_size} bytes, got {len(data)}"
            )
        return GroupElement(self, self._decode(data))

    def decode_scalar(self, data: bytes) -> Scalar:
        if len(data) != self.scalar_size:
            raise InvalidEncodingError(
                f"{self.name} scalar must be {self.scalar_size} bytes, got {len(data)}"
            )
        value = int.from_bytes(data, "little")
        if value >= self.order:
            raise InvalidEncodingError("scalar is not reduced modulo the group order")
        return Scalar(self, value)

    def element_from_hex(self, value: str) -> GroupElement:
        try:
            raw = bytes.fromhex(value)
        except (TypeError, ValueError) as exc:
            raise InvalidEncodingError("group element is not valid hex") from exc
        return self.decode_element(raw)

    def scalar_from_hex(self, value: str) -> Scalar:
        try:
            raw = bytes.fromhex(value)
        except (TypeError, ValueError) as exc:
            raise InvalidEncodingError("scalar is not valid hex") from exc
        return self.decode_scalar(raw)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class ModPGroup(Group):
    """Order-q subgroup of Z_p^* for a prime p with q | p - 1."""

    def __init__(self, name: str, p: int, q: int, g: int):
        if (p - 1) % q != 0:
            raise ValueError("q must divide p - 1")
        if g in (0, 1) or pow(g, q, p) != 1:
            raise ValueError("g must generate the order-q subgroup")
        self.name = name
        self.p = p
        self.order = q
        self.cofactor = (p - 1) // q
        self.element_size = (p.bit_length() + 7) // 8
        self._identity_value = 1
        self._generator_value = g

    def _op(self, a: int, b: int) -> int:
        return a * b % self.p

    def _exp(self, a: int, k: int) -> int:
        return pow(a, k, self.p)

    def _inv(self, a: int) -> int:
        return pow(a, -1, self.p)

    def _encode(self, a: int) -> bytes:
        return a.to_bytes(self.element_size, "big")

    def _decode(self, data: bytes) -> int:
        value = int.from_bytes(data, "big")
        if not 1 <= value < self.p or pow(value, self.order, self.p) != 1:
            raise InvalidEncodingError(f"not an element of the order-{self.order} subgroup")
        return value

    def _map_to_element(self, digest: bytes) -> int | None:
        base = int.from_bytes(digest, "big") % self.p
        if base == 0:
            return None
        return pow(base, self.cofactor, self.p)

    def elements(self) -> Iterator[GroupElement]:
        """All q elements in the order g^0, g^1, ... (toy groups only)."""
        if self.order > 10_000:
            raise ValueError("refusing to enumerate a large group")
        value = 1
        for _ in range(self.order):
            yield GroupElement(self, value)
            value = value * self._generator_value % self.p


class Secp256k1Group(Group):
    """secp256k1 through libsecp256k1 (coincurve).

    Elements are held as compressed SEC1 bytes; ``None`` flags the point at
    infinity, which libsecp256k1 cannot represent and which encodes as 33
    zero bytes.
    """

    P = 2**256 - 2**32 - 977
    N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141

    def __init__(self) -> None:
        self.name = "secp256k1"
        self.order = self.N
        self.element_size = 33
        self._identity_value = None
        self._generator_value = PublicKey.from_secret((1).to_bytes(32, "big")).format()

    def _op(self, a: bytes | None, b: bytes | None) -> bytes | None:
        if a is None:
            return b
        if b is None:
            return a
        if a == self._inv(b):
            return None
        return PublicKey.combine_keys([PublicKey(a), PublicKey(b)]).format()

    def _exp(self, a: bytes | None, k: int) -> bytes | None:
        k %= self.N
        if a is None or k == 0:
            return None
        return PublicKey(a).multiply(k.to_bytes(32, "big")).format()

    def _exp_generator(self, k: int) -> bytes | None:
        k %= self.N
        if k == 0:
            return None
        return PublicKey.from_secret(k.to_bytes(32, "big")).format()

    def _inv(self, a: bytes | None) -> bytes | None:
        if a is None:
            return None
        # negation flips the parity of y, i.e. the 0x02/0x03 prefix
        return bytes([a[0] ^ 0x01]) + a[1:]

    def _encode(self, a: bytes | None) -> bytes:
        return bytes(33) if a is None else a

    def _decode(self, data: bytes) -> bytes | None:
        if data == bytes(33):
            return None
        if data[0] not in (2, 3):
            raise InvalidEncodingError("compressed point must start with 0x02 or 0x03")
        try:
            return PublicKey(data).format()
        except ValueError as exc:
            raise InvalidEncodingError("x coordinate is not on secp256k1") from exc

    def _map_to_element(self, digest: bytes) -> bytes | None:
        x = int.from_bytes(digest, "big") % self.P
        try:
            return PublicKey(b"\x02" + x.to_bytes(32, "big")).format()
        except ValueError:
            return None


SECP256K1 = Secp256k1Group()

# 606 = 6 * 101, and 2^6 = 64 has order 101 modulo 607.
TOY_GROUP = ModPGroup("toy101", p=607, q=101, g=64)

_GROUPS: dict[str, Group] = {SECP256K1.name: SECP256K1, TOY_GROUP.name: TOY_GROUP}


def get_group(name: str) -> Group:
    try:
        return _GROUPS[name]
    except KeyError as exc:
        raise InvalidEncodingError(f"unknown group {name!r}") from exc


def production_group() -> Group:
    return SECP256K1
