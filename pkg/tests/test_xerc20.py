from fractions import Fraction

import pytest

from xchainsim.chain import Address
from xchainsim.deploy import BridgeSpec, ChainSpec, FamilySpec, World, WorldConfig
from xchainsim.errors import InsufficientBalance, RateLimited, Unauthorized
from xchainsim.messaging import Status
from xchainsim.xerc20 import CONNEXT_FAST_PATH_FEE, XErc20Token

CHAINS = [ChainSpec("ethereum", 12, is_ethereum=True), ChainSpec("arbitrum", 1)]


@pytest.fixture
def token(sim):
    c = sim.create_chain("c0", 1)
    led = sim.deploy_ledger(c, "X", 18, {Address.named(c, "alice"): 1000})
    issuer = Address.named(c, "issuer")
    tok = XErc20Token(sim, led, issuer, window=100)
    return tok, issuer, Address.named(c, "bridgeA"), Address.named(c, "alice")


def test_set_limits_visible_through_query(token):
    tok, issuer, bridge, _ = token
    tok.set_limits(issuer, bridge, 100, 100)
    assert tok.minting_max_limit_of(bridge) == 100
    assert tok.query_limits(bridge) == (100, 100, 100, 100)


def test_unknown_bridge_has_zero_limits(token):
    tok, _, bridge, _ = token
    assert tok.query_limits(bridge) == (0, 0, 0, 0)


def test_lowering_max_clamps_current(token, sim):
    tok, issuer, bridge, alice = token
    tok.set_limits(issuer, bridge, 100, 100)
    tok.mint(bridge, alice, 20)
    assert tok.minting_current_limit_of(bridge) == 80
    tok.set_limits(issuer, bridge, 50, 100)
    assert tok.minting_current_limit_of(bridge) == min(80, 50)


def test_non_issuer_cannot_set_limits(token):
    tok, _, bridge, alice = token
    with pytest.raises(Unauthorized):
        tok.set_limits(alice, bridge, 100, 100)


def test_mint_limit_exhaustion_and_replenishment(token, sim):
    tok, issuer, bridge, alice = token
    tok.set_limits(issuer, bridge, 100, 100)
    tok.mint(bridge, alice, 60)
    tok.mint(bridge, alice, 40)
    assert tok.minting_current_limit_of(bridge) == 0
    with pytest.raises(RateLimited):
        tok.mint(bridge, alice, 1)
    sim.advance_tick(50)
    assert tok.minting_current_limit_of(bridge) == 50
    tok.mint(bridge, alice, 50)


def test_unlisted_bridge_cannot_mint_or_burn(token):
    tok, _, _, alice = token
    mallory = Address.named(tok.chain, "mallory")
    with pytest.raises(Unauthorized):
        tok.mint(mallory, alice, 1)
    with pytest.raises(Unauthorized):
        tok.burn(mallory, alice, 1)


def test_direct_bridge_mint_is_recorded_as_unbacked(token, sim):
    tok, issuer, bridge, alice = token
    tok.set_limits(issuer, bridge, 100, 100)
    tok.mint(bridge, alice, 30)
    assert any(e.name == "xfer.unbacked" and e.fields["amount"] == 30 for e in sim.events)


def lock_world(**kw):
    spec = FamilySpec("X", "xerc20", "LockMint", native="ethereum", **kw)
    return World(WorldConfig("x", CHAINS, [spec]))


def test_lockbox_deposit_mints_one_to_one():
    world = lock_world()
    dep = world.family("X")
    eth = dep.native
    alice = dep.user("alice", eth)
    locked0, supply0 = dep.lockbox.locked, dep.ledgers[eth].total_supply
    dep.lockbox.deposit(alice, 500)
    assert dep.lockbox.locked == locked0 + 500
    assert dep.ledgers[eth].total_supply == supply0 + 500


def test_lockbox_round_trip_restores_state():
    world = lock_world()
    dep = world.family("X")
    alice = dep.user("alice", dep.native)
    before = (dep.lockbox.locked, dep.legacy.balance_of(alice), dep.ledgers[dep.native].balance_of(alice))
    dep.lockbox.deposit(alice, 500)
    dep.lockbox.withdraw(alice, 500)
    after = (dep.lockbox.locked, dep.legacy.balance_of(alice), dep.ledgers[dep.native].balance_of(alice))
    assert before == after


def test_withdraw_from_empty_lockbox_fails(sim):
    from xchainsim.xerc20 import Lockbox

    c = sim.create_chain("c0", 1)
    legacy = sim.deploy_ledger(c, "L", 18)
    x = sim.deploy_ledger(c, "X", 18, {Address.named(c, "alice"): 5})
    tok = XErc20Token(sim, x, Address.named(c, "issuer"))
    box = Lockbox(sim, legacy, tok)
    with pytest.raises(InsufficientBalance):
        box.withdraw(Address.named(c, "alice"), 1)


def test_lockbox_minted_equals_locked_through_transfers():
    world = lock_world()
    dep = world.family("X")
    eth, arb = dep.chains
    alice = dep.user("alice", eth)
    dep.lockbox.deposit(alice, 1000)
    dep.transfer(alice, arb, dep.user("bob", arb), 700)
    world.settle()
    remote = dep.ledgers[arb].total_supply
    assert dep.ledgers[eth].total_supply + remote == dep.lockbox.locked
    world.sim.finish()
    assert world.harness.report().passed


def test_bridge_transfer_burns_and_mints():
    spec = FamilySpec("X", "xerc20", limit=10_000, window=100)
    world = World(WorldConfig("x", CHAINS, [spec]))
    dep = world.family("X")
    eth, arb = dep.chains
    msg = dep.transfer(dep.user("alice", eth), arb, dep.user("bob", arb), 400)
    assert dep.ledgers[eth].balance_of(dep.user("alice", eth)) == 1_000_000 - 400
    world.settle()
    assert msg.status is Status.DELIVERED
    assert dep.ledgers[arb].balance_of(dep.user("bob", arb)) == 1_000_000 + 400


def test_paused_destination_rejects_and_strands():
    world = World(WorldConfig("x", CHAINS, [FamilySpec("X", "xerc20")]))
    dep = world.family("X")
    eth, arb = dep.chains
    dep.pause(arb)
    msg = dep.transfer(dep.user("alice", eth), arb, dep.user("bob", arb), 400)
    world.settle()
    assert msg.status is Status.REJECTED
    world.sim.finish()
    report = world.harness.report()
    assert report.passed and report.families["X"]["stranded"] == 400


def test_connext_fee_is_five_basis_points():
    assert CONNEXT_FAST_PATH_FEE == Fraction(5, 10_000)
    spec = FamilySpec("X", "xerc20", bridges=[BridgeSpec("connext", CONNEXT_FAST_PATH_FEE)])
    world = World(WorldConfig("x", CHAINS, [spec]))
    dep = world.family("X")
    eth, arb = dep.chains
    dep.transfer(dep.user("alice", eth), arb, dep.user("bob", arb), 1_000_000)
    fees = [e.fields for e in world.sim.events if e.name == "fee.charge"]
    assert fees == [{"tid": "t1", "standard": "xerc20", "component": "liquidity",
                     "amount": "500", "currency": "token"}]


def test_forged_bridge_message_with_compromised_bridge_is_bounded_by_limit():
    spec = FamilySpec("X", "xerc20", limit=1000, window=100)
    world = World(WorldConfig("x", CHAINS, [spec]))
    dep = world.family("X")
    eth, arb = dep.chains
    msg = dep.forge(eth, arb, dep.user("mallory", arb), 5000, [])
    world.settle()
    assert msg.status is Status.REJECTED
    assert dep.ledgers[arb].balance_of(dep.user("mallory", arb)) == 0
