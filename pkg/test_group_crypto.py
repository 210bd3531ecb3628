"""
Tests for the group primitives: Pedersen commitments, Schnorr signatures and
their aggregation, discrete-log proofs and two-layer encryption.
"""
import dataclasses
import io
import random
import sys
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path

from hypothesis import given, settings as hsettings, strategies as st

# Add the project root to the Python path
PROJECT_ROOT = Path(__file__).parent
sys.path.append(str(PROJECT_ROOT))

from willchain.core.errors import AggregationRejectedError, DecryptionError, InvalidEncodingError, ValidationError
from willchain.crypto.group import SECP256K1, TOY_GROUP, get_group
from willchain.crypto.keys import DeterministicNonceSource, KeyPair
from willchain.crypto.layered import LayeredCiphertext, layered_decrypt_inner, layered_decrypt_outer, layered_encrypt
from willchain.crypto.pedersen import default_params, pedersen_commit, pedersen_verify_opening
from willchain.crypto.proofs import DlogProof, dlog_challenge, dlog_prove, dlog_verify
from willchain.crypto.schnorr import (
    AggregateSignature,
    KeyRegistry,
    SchnorrSignature,
    make_pop,
    register_key,
    schnorr_aggregate,
    schnorr_aggregate_verify,
    schnorr_challenge,
    schnorr_sign,
    schnorr_verify,
)
from willchain.tools import export_vectors

SEED = b"group-crypto-tests"


def registered(group, labels):
    registry = KeyRegistry.from_encoded(group, [])
    keys = [KeyPair.derive(group, SEED, label) for label in labels]
    for kp in keys:
        register_key(registry, kp.pk, make_pop(kp, DeterministicNonceSource(seed=b"pop")))
    return keys, registry


class ToyGroupOracleTest(unittest.TestCase):
    """Exhaustive checks over the 101-element group."""

    def setUp(self):
        self.group = TOY_GROUP
        self.elements = list(self.group.elements())
        self.params = default_params(self.group)

    def test_enumeration_matches_exponentiation(self):
        g = self.group.generator()
        for k, element in enumerate(self.elements):
            self.assertEqual(g ** k, element)
        self.assertEqual(len(set(self.elements)), 101)

    def test_commitment_matches_oracle_for_every_message(self):
        r = self.group.scalar(17)
        h_r = self.params.h ** r
        commitments = set()
        for m in range(self.group.order):
            c = pedersen_commit(self.params, m, r)
            self.assertEqual(c.point, self.elements[m] * h_r)
            commitments.add(c.point)
        # with r fixed, distinct messages never collide
        self.assertEqual(len(commitments), self.group.order)

    def test_only_the_committed_pair_opens(self):
        c = pedersen_commit(self.params, 42, 7)
        openings = [
            (m, r)
            for m in range(self.group.order)
            for r in (7, 8)
            if pedersen_verify_opening(self.params, c, m, r)
        ]
        self.assertEqual(openings, [(42, 7)])

    def test_elements_outside_the_subgroup_are_rejected(self):
        # 606 is -1 mod 607, of order 2
        with self.assertRaises(InvalidEncodingError):
            self.group.decode_element((606).to_bytes(self.group.element_size, "big"))


def oracle_pow(base, k):
    """Repeated multiplication, no square-and-multiply."""
    result = base.group.identity()
    for _ in range(int(k) % base.group.order):
        result = result * base
    return result


class ToyGroupVerificationOracleTest(unittest.TestCase):
    """Verification equations against a brute-force exponentiation oracle."""

    def setUp(self):
        self.group = TOY_GROUP
        self.g = self.group.generator()

    def test_schnorr_matches_oracle(self):
        nonces = DeterministicNonceSource(seed=b"toy")
        for sk in range(1, self.group.order):
            kp = KeyPair.from_secret(self.group.scalar(sk))
            sig = schnorr_sign(kp, b"toy message", nonces)
            c = schnorr_challenge(sig.nonce_point, kp.pk, b"toy message")
            for response in (sig.response, sig.response + 1):
                expected = oracle_pow(self.g, response) == sig.nonce_point * oracle_pow(kp.pk, c)
                candidate = SchnorrSignature(sig.nonce_point, response)
                self.assertEqual(schnorr_verify(kp.pk, b"toy message", candidate), expected, f"sk={sk}")
            self.assertTrue(schnorr_verify(kp.pk, b"toy message", sig))

    def test_dlog_matches_oracle(self):
        nonces = DeterministicNonceSource(seed=b"toy")
        for sk in range(1, self.group.order):
            kp = KeyPair.from_secret(self.group.scalar(sk))
            proof = dlog_prove(kp, b"ctx", nonces)
            c = dlog_challenge(proof.commitment, kp.pk, b"ctx")
            for response in (proof.response, proof.response + 3):
                expected = oracle_pow(self.g, response) == proof.commitment * oracle_pow(kp.pk, c)
                self.assertEqual(dlog_verify(kp.pk, b"ctx", DlogProof(proof.commitment, response)), expected)

    def test_aggregate_verifies_iff_every_member_does(self):
        rng = random.Random(2024)
        nonces = DeterministicNonceSource(seed=b"toy-agg")
        msg = b"aggregate trial"
        for trial in range(200):
            n = rng.randint(1, 16)
            keys = [KeyPair.from_secret(self.group.scalar(sk)) for sk in rng.sample(range(1, 101), n)]
            sigs = [schnorr_sign(kp, msg, nonces) for kp in keys]
            if trial % 2:
                bad = rng.randrange(n)
                sigs[bad] = SchnorrSignature(sigs[bad].nonce_point, sigs[bad].response + rng.randint(1, 100))
            members_ok = all(schnorr_verify(kp.pk, msg, sig) for kp, sig in zip(keys, sigs))
            total = self.group.scalar(0)
            for sig in sigs:
                total = total + sig.response
            agg = AggregateSignature(
                nonce_points=tuple(s.nonce_point for s in sigs),
                response_sum=total,
                signer_pks=tuple(kp.pk for kp in keys),
            )
            self.assertEqual(schnorr_aggregate_verify(agg, msg), members_ok, f"trial {trial}")
            self.assertEqual(members_ok, trial % 2 == 0)


class Secp256k1Test(unittest.TestCase):
    def setUp(self):
        self.group = SECP256K1
        self.g = self.group.generator()

    def test_small_multiples_match_known_points(self):
        known = {
            1: "0279be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798",
            2: "02c6047f9441ed7d6d3045406e95c07cd85c778e4b8cef3ca7abac09b95c709ee5",
            3: "02f9308a019258c31049344f85f89d5229b531c845836f99b08601f113bce036f9",
        }
        for k, point in known.items():
            self.assertEqual((self.g ** k).hex(), point)
        self.assertEqual((self.g * self.g).hex(), known[2])
        self.assertEqual((self.g * self.g * self.g).hex(), known[3])

    def test_identity_and_inverses(self):
        identity = self.group.identity()
        self.assertTrue((self.g ** self.group.order).is_identity())
        self.assertTrue((self.g ** 5 * self.g ** (self.group.order - 5)).is_identity())
        self.assertEqual(self.g * identity, self.g)
        self.assertEqual(identity * self.g, self.g)
        self.assertEqual(identity.to_bytes(), bytes(33))
        self.assertTrue(self.group.decode_element(bytes(33)).is_identity())

    def test_exponent_laws_hold_off_the_generator(self):
        rng = random.Random(256)
        for _ in range(50):
            a, b = self.group.random_scalar(rng), self.group.random_scalar(rng)
            self.assertEqual(self.g ** a * self.g ** b, self.g ** (a + b))
            self.assertEqual((self.g ** a) ** b, self.g ** (a * b))

    def test_malformed_points_are_rejected(self):
        for data in (b"\x04" + bytes(32), b"\x02" + b"\xff" * 32, b"\x02" + bytes(31)):
            with self.subTest(data=data.hex()):
                with self.assertRaises(InvalidEncodingError):
                    self.group.decode_element(data)


class PedersenTest(unittest.TestCase):
    def setUp(self):
        self.group = SECP256K1
        self.params = default_params(self.group)

    def test_opening_verifies(self):
        c = pedersen_commit(self.params, 42, 7)
        self.assertTrue(pedersen_verify_opening(self.params, c, 42, 7))
        self.assertFalse(pedersen_verify_opening(self.params, c, 41, 7))
        self.assertFalse(pedersen_verify_opening(self.params, c, 42, 8))

    def test_h_is_not_the_generator(self):
        self.assertNotEqual(self.params.h, self.params.g)
        self.assertFalse(self.params.h.is_identity())

    @hsettings(max_examples=20, deadline=None)
    @given(
        st.integers(min_value=0, max_value=2**64),
        st.integers(min_value=0, max_value=2**64),
        st.integers(min_value=0, max_value=2**64),
        st.integers(min_value=0, max_value=2**64),
    )
    def test_commitments_are_additively_homomorphic(self, m1, r1, m2, r2):
        product = pedersen_commit(self.params, m1, r1) * pedersen_commit(self.params, m2, r2)
        self.assertEqual(product, pedersen_commit(self.params, m1 + m2, r1 + r2))

    def test_fresh_blinding_gives_distinct_commitments(self):
        rng = random.Random(1000)
        seen = {pedersen_commit(self.params, 42, self.group.random_scalar(rng)).hex() for _ in range(1000)}
        self.assertEqual(len(seen), 1000)

    def test_homomorphism_over_random_scalars(self):
        rng = random.Random(519)
        for _ in range(1000):
            m1, r1, m2, r2 = (self.group.random_scalar(rng) for _ in range(4))
            product = pedersen_commit(self.params, m1, r1) * pedersen_commit(self.params, m2, r2)
            self.assertEqual(product, pedersen_commit(self.params, m1 + m2, r1 + r2))


class SchnorrTest(unittest.TestCase):
    def setUp(self):
        self.group = SECP256K1
        self.kp = KeyPair.derive(self.group, SEED, "alice")

    def test_sign_and_verify(self):
        sig = schnorr_sign(self.kp, b"hello", DeterministicNonceSource(seed=b"t"))
        self.assertTrue(schnorr_verify(self.kp.pk, b"hello", sig))
        self.assertFalse(schnorr_verify(self.kp.pk, b"hullo", sig))
        other = KeyPair.derive(self.group, SEED, "bob")
        self.assertFalse(schnorr_verify(other.pk, b"hello", sig))

    def test_signature_survives_hex_encoding(self):
        sig = schnorr_sign(self.kp, b"hello", DeterministicNonceSource(seed=b"t"))
        decoded = SchnorrSignature.from_hex(self.group, sig.hex())
        self.assertTrue(schnorr_verify(self.kp.pk, b"hello", decoded))

    def test_deterministic_nonces_repeat_for_a_fresh_source(self):
        a = schnorr_sign(self.kp, b"m", DeterministicNonceSource(seed=b"same"))
        b = schnorr_sign(self.kp, b"m", DeterministicNonceSource(seed=b"same"))
        self.assertEqual(a.hex(), b.hex())

    def test_key_derivation_is_stable(self):
        again = KeyPair.derive(self.group, SEED, "alice")
        self.assertEqual(again.pk, self.kp.pk)

    def test_zero_secret_is_rejected(self):
        with self.assertRaises(ValidationError):
            KeyPair(sk=self.group.scalar(0), pk=self.group.identity())


class AggregationTest(unittest.TestCase):
    def setUp(self):
        self.group = SECP256K1
        self.msg = b"claim message"

    def test_aggregate_verifies_for_every_group_size(self):
        keys, registry = registered(self.group, [f"signer-{i}" for i in range(16)])
        nonces = DeterministicNonceSource(seed=b"agg")
        for n in range(1, 17):
            signers = keys[:n]
            sigs = [(schnorr_sign(kp, self.msg, nonces), kp.pk) for kp in signers]
            agg = schnorr_aggregate(sigs, self.msg, registry)
            self.assertTrue(schnorr_aggregate_verify(agg, self.msg), f"n={n}")
            self.assertFalse(schnorr_aggregate_verify(agg, b"other message"), f"n={n}")

    def test_unregistered_signer_is_rejected(self):
        keys, registry = registered(self.group, ["a", "b"])
        outsider = KeyPair.derive(self.group, SEED, "outsider")
        nonces = DeterministicNonceSource(seed=b"agg")
        sigs = [(schnorr_sign(kp, self.msg, nonces), kp.pk) for kp in keys + [outsider]]
        with self.assertRaises(AggregationRejectedError):
            schnorr_aggregate(sigs, self.msg, registry)

    def test_invalid_member_signature_is_rejected(self):
        keys, registry = registered(self.group, ["a", "b"])
        nonces = DeterministicNonceSource(seed=b"agg")
        good = schnorr_sign(keys[0], self.msg, nonces)
        wrong = schnorr_sign(keys[1], b"something else", nonces)
        with self.assertRaises(AggregationRejectedError):
            schnorr_aggregate([(good, keys[0].pk), (wrong, keys[1].pk)], self.msg, registry)

    def test_empty_aggregate_is_rejected(self):
        _, registry = registered(self.group, [])
        with self.assertRaises(AggregationRejectedError):
            schnorr_aggregate([], self.msg, registry)

    def test_bad_proof_of_possession_is_rejected(self):
        registry = KeyRegistry.from_encoded(self.group, [])
        kp = KeyPair.derive(self.group, SEED, "a")
        other = KeyPair.derive(self.group, SEED, "b")
        pop = make_pop(other, DeterministicNonceSource(seed=b"pop"))
        with self.assertRaises(ValidationError):
            register_key(registry, kp.pk, pop)
        self.assertEqual(len(registry), 0)


class DlogProofTest(unittest.TestCase):
    def setUp(self):
        self.group = SECP256K1
        self.kp = KeyPair.derive(self.group, SEED, "prover")

    def test_proof_is_bound_to_its_context(self):
        proof = dlog_prove(self.kp, b"ctx", DeterministicNonceSource(seed=b"d"))
        self.assertTrue(dlog_verify(self.kp.pk, b"ctx", proof))
        self.assertFalse(dlog_verify(self.kp.pk, b"other", proof))

    def test_proof_for_another_statement_fails(self):
        proof = dlog_prove(self.kp, b"ctx", DeterministicNonceSource(seed=b"d"))
        other = KeyPair.derive(self.group, SEED, "someone else")
        self.assertFalse(dlog_verify(other.pk, b"ctx", proof))

    def test_proof_survives_byte_encoding(self):
        proof = dlog_prove(self.kp, b"ctx", DeterministicNonceSource(seed=b"d"))
        decoded = DlogProof.from_bytes(self.group, proof.to_bytes())
        self.assertTrue(dlog_verify(self.kp.pk, b"ctx", decoded))

    def test_truncated_or_padded_bytes_are_refused(self):
        raw = dlog_prove(self.kp, b"ctx", DeterministicNonceSource(seed=b"d")).to_bytes()
        for data in (raw[:-1], raw + b"\x00", raw[: self.group.element_size], b""):
            with self.subTest(length=len(data)):
                with self.assertRaises(InvalidEncodingError):
                    DlogProof.from_bytes(self.group, data)

    def test_proof_from_another_group_is_an_encoding_error(self):
        toy = KeyPair.derive(TOY_GROUP, SEED, "prover")
        proof = dlog_prove(toy, b"ctx", DeterministicNonceSource(seed=b"d"))
        with self.assertRaises(InvalidEncodingError):
            dlog_verify(self.kp.pk, b"ctx", proof)

    def test_reused_nonce_gives_the_secret_away(self):
        class FixedNonce:
            def nonce(self, sk, msg):
                return sk.group.scalar(0xC0FFEE)

        first = dlog_prove(self.kp, b"context one", FixedNonce())
        second = dlog_prove(self.kp, b"context two", FixedNonce())
        self.assertEqual(first.commitment, second.commitment)
        c1 = dlog_challenge(first.commitment, self.kp.pk, b"context one")
        c2 = dlog_challenge(second.commitment, self.kp.pk, b"context two")
        extracted = (first.response - second.response) * (c1 - c2).inverse()
        self.assertEqual(extracted, self.kp.sk)
        self.assertEqual(self.group.generator() ** extracted, self.kp.pk)


class LayeredEncryptionTest(unittest.TestCase):
    def setUp(self):
        self.group = SECP256K1
        self.beneficiary = KeyPair.derive(self.group, SEED, "beneficiary")
        self.temp = KeyPair.derive(self.group, SEED, "temp")

    def test_both_layers_open_in_order(self):
        data = b"the deed to the house"
        c = layered_encrypt(data, self.beneficiary.pk, self.temp.pk, random.Random(1))
        c1 = layered_decrypt_outer(c, self.temp.sk)
        self.assertNotIn(data, c1)
        self.assertEqual(layered_decrypt_inner(c1, self.beneficiary.sk), data)

    def test_wrong_keys_fail(self):
        c = layered_encrypt(b"secret", self.beneficiary.pk, self.temp.pk, random.Random(2))
        with self.assertRaises(DecryptionError):
            layered_decrypt_outer(c, self.beneficiary.sk)
        c1 = layered_decrypt_outer(c, self.temp.sk)
        with self.assertRaises(DecryptionError):
            layered_decrypt_inner(c1, self.temp.sk)

    def test_tampered_ciphertext_fails(self):
        c = layered_encrypt(b"secret", self.beneficiary.pk, self.temp.pk, random.Random(3))
        raw = bytearray(c.to_bytes())
        raw[-1] ^= 0x01
        tampered = LayeredCiphertext.from_bytes(self.group, bytes(raw))
        with self.assertRaises(DecryptionError):
            layered_decrypt_outer(tampered, self.temp.sk)

    def test_every_flipped_body_or_tag_byte_fails(self):
        c = layered_encrypt(b"the deed to the house", self.beneficiary.pk, self.temp.pk, random.Random(5))
        for field in ("outer_body", "tag"):
            original = getattr(c, field)
            for i in range(len(original)):
                raw = bytearray(original)
                raw[i] ^= 0x80
                tampered = dataclasses.replace(c, **{field: bytes(raw)})
                with self.subTest(field=field, byte=i):
                    with self.assertRaises(DecryptionError):
                        layered_decrypt_outer(tampered, self.temp.sk)

    def test_toy_group_round_trip(self):
        group = get_group("toy101")
        b = KeyPair.derive(group, SEED, "b")
        t = KeyPair.derive(group, SEED, "t")
        c = layered_encrypt(b"tiny", b.pk, t.pk, random.Random(4))
        restored = LayeredCiphertext.from_bytes(group, c.to_bytes())
        self.assertEqual(layered_decrypt_inner(layered_decrypt_outer(restored, t.sk), b.sk), b"tiny")

    def test_unknown_group_name(self):
        with self.assertRaises(InvalidEncodingError):
            get_group("p-256")


class ExportedVectorsTest(unittest.TestCase):
    def read_vectors(self, path):
        vectors, current = [], {}
        for line in path.read_text(encoding="utf-8").splitlines():
            if line.startswith("#"):
                continue
            if not line:
                if current:
                    vectors.append(current)
                current = {}
                continue
            key, _, value = line.partition(" = ")
            current[key] = value
        if current:
            vectors.append(current)
        return vectors

    def test_exported_vectors_verify(self):
        group = TOY_GROUP
        with tempfile.TemporaryDirectory() as out, redirect_stdout(io.StringIO()):
            export_vectors.main(out, group.name, 4, 12)
            schnorr = self.read_vectors(Path(out) / "schnorr_toy101.txt")
            dlog = self.read_vectors(Path(out) / "dlog_toy101.txt")
            layered = self.read_vectors(Path(out) / "layered_toy101.txt")

        self.assertEqual(len(schnorr), 4)
        for v in schnorr:
            pk = group.element_from_hex(v["pk"])
            sig = SchnorrSignature.from_hex(group, v["signature"])
            self.assertTrue(schnorr_verify(pk, bytes.fromhex(v["msg"]), sig))
        for v in dlog:
            proof = DlogProof.from_bytes(group, bytes.fromhex(v["proof"]))
            self.assertTrue(dlog_verify(group.element_from_hex(v["pk"]), bytes.fromhex(v["context"]), proof))
        for v in layered:
            c = LayeredCiphertext.from_bytes(group, bytes.fromhex(v["ciphertext"]))
            c1 = layered_decrypt_outer(c, group.scalar_from_hex(v["sk_t"]))
            self.assertEqual(layered_decrypt_inner(c1, group.scalar_from_hex(v["sk_b"])).hex(), v["plaintext"])


if __name__ == "__main__":
    unittest.main()
