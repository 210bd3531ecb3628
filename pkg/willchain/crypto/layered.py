"""Two-layer hybrid encryption for deferred key revelation.

The inner layer is sealed to the beneficiary key k_b and the outer layer to a
temporary key k_t whose secret is released once the will has executed:

    c1 = E_kb(data)
    c2 = E_kt(c1)

Each layer is an ECIES-style construction over the will group: ephemeral
e, E = g^e, shared = pk^e, HKDF-SHA256 -> (enc_key, mac_key), body =
data XOR SHAKE256(enc_key), tag = HMAC-SHA256(mac_key, E || body).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes, hmac
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..core.errors import DecryptionError, InvalidEncodingError
from .group import Group, GroupElement, Scalar

LAYER_INFO = b"willchain/layer/v1"
TAG_SIZE = 32


@dataclass(frozen=True)
class LayeredCiphertext:
    outer_kem: GroupElement
    outer_body: bytes
    tag: bytes

    def to_bytes(self) -> bytes:
        return self.outer_kem.to_bytes() + self.tag + self.outer_body

    @classmethod
    def from_bytes(cls, group: Group, data: bytes) -> "LayeredCiphertext":
        kem, tag, body = _split(group, data)
        return cls(outer_kem=kem, outer_body=body, tag=tag)


def _split(group: Group, data: bytes) -> tuple[GroupElement, bytes, bytes]:
    size = group.element_size
    if len(data) < size + TAG_SIZE:
        raise DecryptionError("ciphertext too short")
    try:
        kem = group.decode_element(data[:size])
    except InvalidEncodingError as exc:
        raise DecryptionError("ciphertext carries an invalid ephemeral key") from exc
    return kem, data[size : size + TAG_SIZE], data[size + TAG_SIZE :]


def _derive_keys(shared: GroupElement, kem: GroupElement) -> tuple[bytes, bytes]:
    okm = HKDF(
        algorithm=hashes.SHA256(),
        length=64,
        salt=None,
        info=LAYER_INFO,
    ).derive(shared.to_bytes() + kem.to_bytes())
    return okm[:32], okm[32:]


def _keystream(enc_key: bytes, length: int) -> bytes:
    if length == 0:
        return b""
    digest = hashes.Hash(hashes.SHAKE256(digest_size=length))
    digest.update(enc_key)
    return digest.finalize()


def _xor(data: bytes, stream: bytes) -> bytes:
    if not data:
        return b""
    mixed = int.from_bytes(data, "big") ^ int.from_bytes(stream, "big")
    return mixed.to_bytes(len(data), "big")


def _tag(mac_key: bytes, kem: GroupElement, body: bytes) -> bytes:
    mac = hmac.HMAC(mac_key, hashes.SHA256())
    mac.update(kem.to_bytes() + body)
    return mac.finalize()


def _seal(data: bytes, pk: GroupElement, rng: random.Random | None) -> tuple[GroupElement, bytes, bytes]:
    group = pk.group
    e = group.random_scalar(rng)
    kem = group.generator() ** e
    enc_key, mac_key = _derive_keys(pk ** e, kem)
    body = _xor(data, _keystream(enc_key, len(data)))
    return kem, body, _tag(mac_key, kem, body)


def _open(kem: GroupElement, body: bytes, tag: bytes, sk: Scalar) -> bytes:
    if sk.group is not kem.group:
        raise DecryptionError("key belongs to a different group")
    enc_key, mac_key = _derive_keys(kem ** sk, kem)
    mac = hmac.HMAC(mac_key, hashes.SHA256())
    mac.update(kem.to_bytes() + body)
    try:
        mac.verify(tag)
    except InvalidSignature as exc:
        raise DecryptionError("authentication tag mismatch") from exc
    return _xor(body, _keystream(enc_key, len(body)))


def layered_encrypt(
    data: bytes, k_b: GroupElement, k_t: GroupElement, rng: random.Random | None = None
) -> LayeredCiphertext:
    inner_kem, inner_body, inner_tag = _seal(data, k_b, rng)
    c1 = inner_kem.to_bytes() + inner_tag + inner_body
    outer_kem, outer_body, outer_tag = _seal(c1, k_t, rng)
    return LayeredCiphertext(outer_kem=outer_kem, outer_body=outer_body, tag=outer_tag)


def layered_decrypt_outer(c: LayeredCiphertext, sk_t: Scalar) -> bytes:
    return _open(c.outer_kem, c.outer_body, c.tag, sk_t)


def layered_decrypt_inner(c1: bytes, sk_b: Scalar) -> bytes:
    kem, tag, body = _split(sk_b.group, c1)
    return _open(kem, body, tag, sk_b)
