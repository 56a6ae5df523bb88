import pytest

from xchainsim.chain import Address
from xchainsim.deploy import ChainSpec, FamilySpec, World, WorldConfig
from xchainsim.errors import (BelowThreshold, ConfigError, Paused, StillQueued, Unauthorized,
                              UnknownSequence)
from xchainsim.messaging import Status
from xchainsim.ntt import QueuedTransfer

CHAINS = [ChainSpec("ethereum", 12), ChainSpec("arbitrum", 1), ChainSpec("base", 2)]


def ntt_world(mode="BurnMint", **kw):
    spec = FamilySpec("N", "ntt", mode, native="ethereum", **kw)
    world = World(WorldConfig("n", CHAINS, [spec]))
    dep = world.family("N")
    eth, arb = dep.chains[:2]
    return world, dep, eth, arb


def test_transfer_within_capacity_emits():
    world, dep, eth, arb = ntt_world(limit=1000, window=100)
    msg = dep.transfer(dep.user("alice", eth), arb, dep.user("bob", arb), 400)
    assert not isinstance(msg, QueuedTransfer)
    assert dep.managers[eth].outbound_limit.capacity == 600


def test_transfer_over_capacity_queues_without_revert():
    world, dep, eth, arb = ntt_world(limit=300, window=100)
    n_msgs = len(world.sim.messages.messages)
    q = dep.transfer(dep.user("alice", eth), arb, dep.user("bob", arb), 400)
    assert isinstance(q, QueuedTransfer) and q.amount == 400
    assert len(world.sim.messages.messages) == n_msgs


def test_paused_manager_refuses_transfers():
    world, dep, eth, arb = ntt_world()
    dep.pause(eth)
    with pytest.raises(Paused):
        dep.transfer(dep.user("alice", eth), arb, dep.user("bob", arb), 1)


def queued(limit=300, amount=400, window=100):
    world, dep, eth, arb = ntt_world(limit=limit, window=window)
    alice = dep.user("alice", eth)
    q = dep.transfer(alice, arb, dep.user("bob", arb), amount)
    return world, dep, eth, arb, alice, q


def test_complete_exactly_one_window_later():
    world, dep, eth, arb, alice, q = queued()
    mgr = dep.managers[eth]
    world.sim.advance_tick(99)
    with pytest.raises(StillQueued):
        mgr.complete_outbound_queued_transfer(alice, q.key)
    world.sim.advance_tick(1)
    msg = mgr.complete_outbound_queued_transfer(alice, q.key)
    assert msg.status in (Status.ATTESTED, Status.EMITTED)
    with pytest.raises(UnknownSequence, match="unknown sequence"):
        mgr.complete_outbound_queued_transfer(alice, q.key)
    world.settle()
    world.sim.finish()
    assert world.harness.report().passed


def test_cancel_refunds_exactly():
    world, dep, eth, arb, alice, q = queued()
    mgr = dep.managers[eth]
    start = 1_000_000
    assert dep.ledgers[eth].balance_of(alice) == start - 400
    assert mgr.cancel_outbound_queued_transfer(alice, q.key) == 400
    assert dep.ledgers[eth].balance_of(alice) == start


def test_third_party_cannot_cancel():
    world, dep, eth, arb, alice, q = queued()
    with pytest.raises(Unauthorized):
        dep.managers[eth].cancel_outbound_queued_transfer(dep.user("bob", eth), q.key)


def test_cancel_after_complete_fails():
    world, dep, eth, arb, alice, q = queued()
    mgr = dep.managers[eth]
    world.sim.advance_tick(100)
    mgr.complete_outbound_queued_transfer(alice, q.key)
    with pytest.raises(UnknownSequence):
        mgr.cancel_outbound_queued_transfer(alice, q.key)


def test_transceiver_threshold_gate():
    world, dep, eth, arb = ntt_world()
    mgr = dep.managers[arb]
    manual = Address.named(arb, "manual-xcvr")
    mgr.set_transceiver(dep.owner(arb), manual, auto=False)
    mgr.set_threshold(dep.owner(arb), 2)
    bob = dep.user("bob", arb)
    before = dep.ledgers[arb].balance_of(bob)
    msg = dep.transfer(dep.user("alice", eth), arb, bob, 50)
    world.settle()
    assert msg.status is Status.DELIVERED and not mgr.is_message_executed(msg.msg_id)
    with pytest.raises(BelowThreshold):
        mgr.execute_msg(msg)
    mgr.attestation_received(manual, msg)
    assert mgr.is_message_executed(msg.msg_id)
    assert dep.ledgers[arb].balance_of(bob) - before == 50


def test_threshold_and_transceiver_configuration():
    world, dep, eth, arb = ntt_world(transceivers=3)
    mgr = dep.managers[eth]
    owner = dep.owner(eth)
    mgr.set_threshold(owner, 2)
    with pytest.raises(ConfigError):
        mgr.set_threshold(owner, 4)
    mgr.set_threshold(owner, 3)
    with pytest.raises(ConfigError):
        mgr.remove_transceiver(owner, Address.named(eth, "xcvr0:N"))


def test_inbound_queue_completes_after_window():
    world, dep, eth, arb = ntt_world(window=100)
    inbound = dep.managers[arb]
    inbound.set_inbound_limit(dep.owner(arb), eth, 100)
    bob = dep.user("bob", arb)
    before = dep.ledgers[arb].balance_of(bob)
    dep.transfer(dep.user("alice", eth), arb, bob, 150)
    world.settle()
    assert len(inbound.inbound_queue) == 1
    (digest, entry), = inbound.inbound_queue.items()
    with pytest.raises(StillQueued):
        inbound.complete_inbound_queued_transfer(digest)
    world.sim.run_until(entry.queued_tick + 100)
    inbound.complete_inbound_queued_transfer(digest)
    assert dep.ledgers[arb].balance_of(bob) - before == 150
    world.sim.finish()
    assert world.harness.report().passed


def test_hub_locks_and_spoke_mints():
    world, dep, eth, arb = ntt_world("LockMint")
    hub = dep.managers[eth]
    dep.transfer(dep.user("alice", eth), arb, dep.user("bob", arb), 700)
    world.settle()
    assert hub.hub_locked == 700 and dep.ledgers[arb].total_supply == 700
    dep.transfer(dep.user("bob", arb), eth, dep.user("alice", eth), 700)
    world.settle()
    assert hub.hub_locked == 0 and dep.ledgers[arb].total_supply == 0


def test_only_one_hub():
    from xchainsim.ntt import Mode, NttManager
    world, dep, eth, arb = ntt_world()
    with pytest.raises(ConfigError):
        NttManager(world.sim, dep.ledgers[eth], Mode.BURN_MINT, dep.owner(eth), is_hub=True)


def test_guardian_quorum_is_not_issuer_configurable():
    from xchainsim.messaging import GuardianQuorum
    world, dep, eth, arb = ntt_world()
    with pytest.raises(ConfigError):
        world.sim.messages.configure_model(dep.channel(eth), GuardianQuorum(frozenset({"x"}), 1))
