"""
Tests for the three-phase packet flow between the will module and an
entrypoint contract: relayer decisions, replay protection and independence
from delivery order.
"""
import random
import sys
import unittest
from collections import Counter
from pathlib import Path

# Add the project root to the Python path
PROJECT_ROOT = Path(__file__).parent
sys.path.append(str(PROJECT_ROOT))

from willchain.core.errors import (
    BalanceError,
    ChannelNotFoundError,
    NotEncapsulableError,
    ProofRejectedError,
    ReplayRejectedError,
    ValidationError,
)
from willchain.models.chain import Genesis, GenesisAccount
from willchain.models.interchain import (
    ChainSpec,
    ChannelSpec,
    Decision,
    ExecutePayload,
    Packet,
    Phase,
    Proof,
    RelayerSpec,
    Topology,
)
from willchain.models.will import ContractCall, Emit, IbcSend
from willchain.services.chain import CLAIM_BOND_ACCOUNT
from willchain.services.interchain.packets import decapsulate, encapsulate, encode_payload, packet_commitment
from willchain.services.interchain.relayer import Relayer, deliver, relayer_decide
from willchain.services.simulation import Simulation

DEST = "dest-1"
CONTRACT = "0xcontract_address"


def make_sim(escrow=True, extra=None):
    genesis = Genesis(
        accounts=[
            GenesisAccount(alias="creator", balance=1_000_000_000),
            GenesisAccount(alias="heir", balance=10_000_000),
            *(GenesisAccount(alias=alias, balance=balance) for alias, balance in (extra or {}).items()),
        ],
    )
    topology = Topology(
        chains=[ChainSpec(chain_id=DEST, contract_address=CONTRACT, escrow={"creator": {"uwill": 5000}} if escrow else {})],
        channels=[ChannelSpec(channel_id="channel-0", counterparty_chain=DEST)],
        relayers=[RelayerSpec(id="relayer-a", channels=["channel-0"]), RelayerSpec(id="relayer-b", channels=["channel-0"])],
    )
    return Simulation.create(genesis, topology, seed=9)


def remote_will(sim):
    """A will with two interchain executions and one interchain claim in flight."""
    sim.submit("creator", {"type": "approve-contract", "chain_id": DEST, "address": CONTRACT})
    did = sim.submit(
        "creator",
        {
            "type": "create-will",
            "expiration": 10,
            "nonce": 1,
            "deposit": 1000,
            "components": [
                {
                    "ctype": "ibc-send",
                    "output": {"type": "ibc-send", "channel": "channel-0", "address": "bob", "amount": 123, "denom": "uwill"},
                },
                {
                    "ctype": "contract-call",
                    "output": {"type": "contract-call", "contract_address": CONTRACT, "payload": "run", "chain_id": DEST},
                },
                {
                    "ctype": "direct+contract-call",
                    "requirement": {"claim_type": "direct", "expected": {"kind": "beneficiary-address", "signer": "heir"}},
                    "output": {"type": "contract-call", "contract_address": CONTRACT, "payload": "release", "chain_id": DEST},
                },
            ],
        },
    ).data["did"]
    sim.advance(10)
    sim.submit(
        "heir",
        {
            "type": "interchain-claim",
            "did": did,
            "component": 2,
            "recipient": "@heir",
            "evidence": {"kind": "direct-sig", "signer": "heir"},
        },
    )
    return did


def outcome(sim, did):
    dest = sim.network.destinations[DEST].state
    will = sim.chain.will(did)
    return {
        "accounts": {a: acc.balances for a, acc in dest.accounts.items()},
        "escrow": dest.contract.escrow,
        "released": len(dest.contract.released),
        "executions": sorted(r.component_id for r in dest.contract.executions),
        "will": (will.status.value, [c.state.value for c in will.components]),
        "balances": {a: acc.balances for a, acc in sim.chain.state.accounts.items()},
        "burned": sim.chain.state.burned,
        "pending_claims": len(sim.chain.state.interchain_claims),
        "verdicts": Counter((r.phase.value, r.verdict) for r in sim.network.trace),
    }


class PacketFlowTest(unittest.TestCase):
    def setUp(self):
        self.sim = make_sim()
        self.did = remote_will(self.sim)
        self.heir = self.sim.address_of("heir")

    def test_full_flow_settles_every_packet(self):
        self.sim.relay(until_idle=True)
        dest = self.sim.network.destinations[DEST]
        self.assertEqual(dest.balance("bob", "uwill"), 123)
        self.assertEqual(dest.balance(self.heir, "uwill"), 5000)
        self.assertEqual(len(dest.state.contract.executions), 1)
        self.assertEqual(len(dest.state.contract.released), 1)
        self.assertEqual(self.sim.chain.will(self.did).status.value, "executed")
        self.assertEqual(self.sim.network.pending(), 0)
        self.assertTrue(self.sim.chain.conservation_holds())

    def test_each_phase_is_delivered_once_and_duplicates_are_rejected(self):
        self.sim.relay(until_idle=True)
        verdicts = Counter((r.phase.value, r.verdict) for r in self.sim.network.trace)
        self.assertEqual(verdicts[("init", "delivered")], 3)
        self.assertEqual(verdicts[("ack", "ok")], 3)
        self.assertEqual(verdicts[("confirm", "acknowledged")], 2)
        self.assertEqual(verdicts[("confirm", "eligible")], 1)
        # both relayers watch the channel, so every packet is attempted twice
        self.assertEqual(sum(n for (_, v), n in verdicts.items() if v == "replay-rejected"), 9)

    def test_delivery_order_does_not_change_the_outcome(self):
        payload = self.sim.serialize()
        reference = None
        for seed in range(100):
            sim = Simulation.load(payload)
            sim.network.run_until_idle(random.Random(seed))
            result = outcome(sim, self.did)
            if reference is None:
                reference = result
            self.assertEqual(result, reference, f"ordering seed {seed}")
        self.assertEqual(reference["released"], 1)

    def test_second_delivery_of_a_packet_is_rejected(self):
        chains = self.sim.network.chains()
        packet = next(iter(self.sim.chain.state.outbox.values()))
        proof = Proof(height=self.sim.chain.height, commitment=packet.commitment)
        deliver(packet, proof, chains[DEST], self.sim.chain)
        with self.assertRaises(ReplayRejectedError):
            deliver(packet, proof, chains[DEST], self.sim.chain)

    def test_packet_for_another_chain_is_refused(self):
        packet = next(iter(self.sim.chain.state.outbox.values()))
        proof = Proof(height=self.sim.chain.height, commitment=packet.commitment)
        with self.assertRaises(ChannelNotFoundError):
            deliver(packet, proof, self.sim.chain, self.sim.chain)

    def test_uncommitted_packet_is_not_delivered(self):
        dest = self.sim.network.destinations[DEST]
        path = next(iter(self.sim.chain.state.outbox.values())).path
        steal = IbcSend(channel="channel-0", address="mallory", amount=10**12, denom="uwill")
        data = encode_payload(
            ExecutePayload(
                did=self.did,
                component_id="forged",
                creator=self.sim.address_of("creator"),
                logic=encapsulate(steal).hex(),
            )
        )
        forged = Packet(
            path=path,
            sequence=777,
            phase=Phase.INIT,
            payload=data,
            commitment=packet_commitment(path, 777, bytes.fromhex(data)),
        )
        for commitment in ("deadbeef", forged.commitment):
            with self.subTest(commitment=commitment):
                proof = Proof(height=self.sim.chain.height, commitment=commitment)
                with self.assertRaises(ProofRejectedError):
                    deliver(forged, proof, dest, self.sim.chain)
        self.assertEqual(dest.balance("mallory", "uwill"), 0)
        self.assertEqual(dest.state.receipts, {})

    def test_committed_packet_needs_a_matching_proof(self):
        dest = self.sim.network.destinations[DEST]
        packet = next(iter(self.sim.chain.state.outbox.values()))
        for proof in (
            Proof(height=self.sim.chain.height, commitment="deadbeef"),
            Proof(height=self.sim.chain.height + 1, commitment=packet.commitment),
        ):
            with self.subTest(proof=proof):
                with self.assertRaises(ProofRejectedError):
                    deliver(packet, proof, dest, self.sim.chain)
        # the home chain does not commit packets for the destination's own outbox
        with self.assertRaises(ProofRejectedError):
            deliver(packet, Proof(height=0, commitment=packet.commitment), dest, dest)

    def test_any_single_byte_change_is_dropped(self):
        relayer = Relayer(self.sim.network.relayers[0].state)
        packet = next(iter(self.sim.chain.state.outbox.values()))
        proof = Proof(height=self.sim.chain.height, commitment=packet.commitment)
        raw = bytes.fromhex(packet.payload)
        for i in range(len(raw)):
            tampered = bytearray(raw)
            tampered[i] ^= 0x01
            forged = packet.model_copy(update={"payload": tampered.hex()})
            self.assertEqual(relayer_decide(relayer, proof, forged, self.sim.chain), Decision.DROP, f"byte {i}")
        commitment = bytes.fromhex(packet.commitment)
        for i in range(len(commitment)):
            tampered = bytearray(commitment)
            tampered[i] ^= 0x01
            bad = Proof(height=proof.height, commitment=tampered.hex())
            self.assertEqual(relayer_decide(relayer, bad, packet, self.sim.chain), Decision.DROP, f"commitment byte {i}")

    def test_relayer_drops_forged_and_unproven_packets(self):
        relayer = Relayer(self.sim.network.relayers[0].state)
        packet = next(iter(self.sim.chain.state.outbox.values()))
        good = Proof(height=self.sim.chain.height, commitment=packet.commitment)
        self.assertEqual(relayer_decide(relayer, good, packet, self.sim.chain), Decision.DELIVER)

        forged = packet.model_copy(update={"payload": packet.payload[:-2] + "00"})
        self.assertEqual(relayer_decide(relayer, good, forged, self.sim.chain), Decision.DROP)

        future = Proof(height=self.sim.chain.height + 1, commitment=packet.commitment)
        self.assertEqual(relayer_decide(relayer, future, packet, self.sim.chain), Decision.DROP)

        unknown = packet.model_copy(update={"sequence": 99})
        self.assertEqual(relayer_decide(relayer, good, unknown, self.sim.chain), Decision.DROP)

    def test_will_module_only_accepts_acks(self):
        packet = next(iter(self.sim.chain.state.outbox.values()))
        before = self.sim.chain.state_hash()
        with self.assertRaises(ValidationError):
            self.sim.chain.receive_packet(packet)
        self.assertEqual(self.sim.chain.state_hash(), before)


class EarlyAndIneligibleClaimTest(unittest.TestCase):
    def test_early_claim_is_penalised_and_escrow_stays(self):
        sim = make_sim()
        sim.submit("creator", {"type": "approve-contract", "chain_id": DEST, "address": CONTRACT})
        did = sim.submit(
            "creator",
            {
                "type": "create-will",
                "expiration": 50,
                "components": [
                    {
                        "ctype": "direct+contract-call",
                        "requirement": {"claim_type": "direct", "expected": {"kind": "beneficiary-address", "signer": "heir"}},
                        "output": {"type": "contract-call", "contract_address": CONTRACT, "payload": "release", "chain_id": DEST},
                    }
                ],
            },
        ).data["did"]
        claim = {
            "type": "interchain-claim",
            "did": did,
            "component": 0,
            "recipient": "@heir",
            "evidence": {"kind": "direct-sig", "signer": "heir"},
        }
        sim.submit("heir", claim)
        sim.relay(until_idle=True)
        dest = sim.network.destinations[DEST].state
        self.assertEqual(sim.chain.state.burned, sim.chain.state.params.penalty_amount)
        self.assertEqual(len(dest.contract.rejected), 1)
        self.assertEqual(dest.contract.escrow[sim.address_of("creator")], {"uwill": 5000})
        self.assertEqual(sim.chain.will(did).components[0].state.value, "inactive")

    def test_claim_against_a_creator_without_escrow_is_ineligible(self):
        sim = make_sim(escrow=False)
        did = remote_will(sim)
        sim.relay(until_idle=True)
        verdicts = [r.verdict for r in sim.network.trace if r.phase.value == "confirm"]
        self.assertIn("ineligible", verdicts)
        self.assertEqual(sim.chain.will(did).components[2].state.value, "inactive")
        self.assertEqual(sim.chain.state.burned, 0)


def release_component(signer, release=None):
    output = {"type": "contract-call", "contract_address": CONTRACT, "payload": "release", "chain_id": DEST}
    if release is not None:
        output["release"] = release
    return {
        "ctype": "direct+contract-call",
        "requirement": {"claim_type": "direct", "expected": {"kind": "beneficiary-address", "signer": signer}},
        "output": output,
    }


def claim_body(did, component, signer):
    return {
        "type": "interchain-claim",
        "did": did,
        "component": component,
        "recipient": f"@{signer}",
        "evidence": {"kind": "direct-sig", "signer": signer},
    }


class EscrowReleaseTest(unittest.TestCase):
    def claim_all(self, components, signers, expiration=10):
        sim = make_sim(extra={"heir2": 10_000_000})
        sim.submit("creator", {"type": "approve-contract", "chain_id": DEST, "address": CONTRACT})
        did = sim.submit(
            "creator", {"type": "create-will", "expiration": expiration, "components": components}
        ).data["did"]
        sim.advance(10)
        for index, signer in enumerate(signers):
            sim.submit(signer, claim_body(did, index, signer))
        sim.relay(until_idle=True)
        return sim, did

    def test_each_claim_releases_its_own_slice(self):
        sim, did = self.claim_all(
            [release_component("heir", {"uwill": 2500}), release_component("heir2", {"uwill": 2500})],
            ["heir", "heir2"],
        )
        dest = sim.network.destinations[DEST]
        self.assertEqual(dest.balance(sim.address_of("heir"), "uwill"), 2500)
        self.assertEqual(dest.balance(sim.address_of("heir2"), "uwill"), 2500)
        self.assertEqual(dest.state.contract.escrow.get(sim.address_of("creator"), {}), {})
        self.assertEqual(len(dest.state.contract.released), 2)
        self.assertEqual(sim.chain.will(did).status.value, "executed")

    def test_escrow_is_never_paid_out_twice(self):
        sim, did = self.claim_all([release_component("heir"), release_component("heir2")], ["heir", "heir2"])
        dest = sim.network.destinations[DEST]
        paid = dest.balance(sim.address_of("heir"), "uwill") + dest.balance(sim.address_of("heir2"), "uwill")
        self.assertEqual(paid, 5000)
        self.assertEqual(len(dest.state.contract.released), 1)
        verdicts = Counter(r.verdict for r in sim.network.trace if r.phase.value == "confirm")
        self.assertEqual(verdicts["eligible"], 1)
        self.assertEqual(verdicts["ineligible"], 1)
        states = sorted(c.state.value for c in sim.chain.will(did).components)
        self.assertEqual(states, ["executed", "inactive"])

    def test_release_larger_than_the_escrow_is_refused(self):
        sim, did = self.claim_all([release_component("heir", {"uwill": 6000})], ["heir"])
        dest = sim.network.destinations[DEST]
        self.assertEqual(dest.balance(sim.address_of("heir"), "uwill"), 0)
        self.assertEqual(dest.state.contract.escrow[sim.address_of("creator")], {"uwill": 5000})
        self.assertEqual(sim.chain.will(did).components[0].state.value, "inactive")

    def test_early_claim_returns_its_slice(self):
        sim, did = self.claim_all([release_component("heir", {"uwill": 2000})], ["heir"], expiration=50)
        dest = sim.network.destinations[DEST].state
        self.assertEqual(dest.contract.escrow[sim.address_of("creator")], {"uwill": 5000})
        self.assertEqual(dest.contract.pending_claims, {})
        self.assertEqual(len(dest.contract.rejected), 1)


class ClaimBondTest(unittest.TestCase):
    def setUp(self):
        self.sim = make_sim(escrow=False, extra={"pauper": 2_000})
        self.sim.submit("creator", {"type": "approve-contract", "chain_id": DEST, "address": CONTRACT})
        self.did = self.sim.submit(
            "creator",
            {
                "type": "create-will",
                "expiration": 50,
                "components": [release_component("heir"), release_component("pauper")],
            },
        ).data["did"]

    def test_claimant_who_cannot_cover_the_penalty_is_refused_up_front(self):
        outbox = len(self.sim.chain.state.outbox)
        with self.assertRaises(BalanceError):
            self.sim.submit("pauper", claim_body(self.did, 1, "pauper"))
        self.assertEqual(len(self.sim.chain.state.outbox), outbox)
        self.assertEqual(self.sim.chain.state.interchain_claims, {})
        self.assertEqual(self.sim.chain.state.burned, 0)

    def test_bond_is_held_until_the_verdict_and_refunded_when_not_early(self):
        heir = self.sim.address_of("heir")
        before = self.sim.chain.balance(heir)
        fee = self.sim.chain.state.params.tx_fee
        penalty = self.sim.chain.state.params.penalty_amount
        self.sim.submit("heir", claim_body(self.did, 0, "heir"))
        self.assertEqual(self.sim.chain.balance(CLAIM_BOND_ACCOUNT), penalty)
        self.assertEqual(self.sim.chain.balance(heir), before - fee - penalty)

        # no escrow on the destination, so the claim comes back ineligible
        self.sim.relay(until_idle=True)
        self.assertEqual(self.sim.chain.balance(CLAIM_BOND_ACCOUNT), 0)
        self.assertEqual(self.sim.chain.balance(heir), before - fee)
        self.assertEqual(self.sim.chain.state.burned, 0)
        self.assertTrue(self.sim.chain.conservation_holds())


class EncapsulationTest(unittest.TestCase):
    def test_interchain_outputs_cross_and_local_ones_do_not(self):
        send = IbcSend(channel="channel-0", address="bob", amount=1, denom="uwill")
        self.assertEqual(decapsulate(encapsulate(send)), send)
        with self.assertRaises(NotEncapsulableError):
            encapsulate(Emit(message="local"))

    def test_random_interchain_outputs_cross_unchanged(self):
        rng = random.Random(1000)
        for i in range(1000):
            if rng.random() < 0.5:
                logic = IbcSend(
                    channel=f"channel-{rng.randrange(8)}",
                    address=rng.randbytes(20).hex(),
                    amount=rng.randint(1, 10**18),
                    denom=rng.choice(["uwill", "uatom", "ibc/27394FB0"]),
                )
            else:
                logic = ContractCall(
                    contract_address=f"0x{rng.randbytes(20).hex()}",
                    payload=rng.randbytes(rng.randint(0, 64)).hex(),
                    chain_id=rng.choice([None, DEST, "dest-2"]),
                    release={"uwill": rng.randint(1, 10**9)} if rng.random() < 0.5 else {},
                )
            self.assertEqual(decapsulate(encapsulate(logic)), logic, f"output {i}")


if __name__ == "__main__":
    unittest.main()
