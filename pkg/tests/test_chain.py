import pytest

from xchainsim.chain import Address, check_amount, UINT256_MAX
from xchainsim.errors import (AmountOverflow, ConfigError, InsufficientBalance, Unauthorized)
from xchainsim.sim import dump_events, load_events


def test_first_chain_gets_id_zero(sim):
    assert sim.create_chain("ethereum", 1).id == 0


def test_chain_ids_are_distinct(sim):
    a = sim.create_chain("optimism", 1)
    b = sim.create_chain("base", 1)
    assert a.id != b.id and a != b


def test_zero_block_interval_rejected(sim):
    with pytest.raises(ConfigError):
        sim.create_chain("ethereum", 0)


def test_duplicate_chain_label_rejected(sim):
    sim.create_chain("ethereum", 1)
    with pytest.raises(ConfigError):
        sim.create_chain("ethereum", 12)


def test_deploy_ledger_sums_initial_holders(sim):
    c = sim.create_chain("c0", 1)
    led = sim.deploy_ledger(c, "TKN", 18, {Address.named(c, "alice"): 1000})
    assert led.total_supply == 1000


def test_deploy_empty_ledger(sim):
    c = sim.create_chain("c0", 1)
    assert sim.deploy_ledger(c, "TKN", 18, {}).total_supply == 0


def test_redeploy_same_token_rejected(sim):
    c = sim.create_chain("c0", 1)
    sim.deploy_ledger(c, "TKN", 18)
    with pytest.raises(ConfigError):
        sim.deploy_ledger(c, "TKN", 18)


def test_holder_on_other_chain_rejected(two_chains):
    sim, a, b = two_chains
    with pytest.raises(ConfigError):
        sim.deploy_ledger(a, "TKN", 18, {Address.named(b, "alice"): 1})


@pytest.fixture
def ledger(sim):
    c = sim.create_chain("c0", 1)
    led = sim.deploy_ledger(c, "TKN", 18, {Address.named(c, "alice"): 1000})
    return led, Address.named(c, "alice"), Address.named(c, "bob"), Address.named(c, "bridge")


def test_local_transfer(ledger):
    led, alice, bob, _ = ledger
    led.transfer(alice, bob, 400)
    assert led.balance_of(alice) == 600 and led.balance_of(bob) == 400


def test_zero_transfer_is_a_noop(ledger, sim):
    led, alice, bob, _ = ledger
    n = len(sim.events)
    led.transfer(alice, bob, 0)
    assert len(sim.events) == n and led.balance_of(alice) == 1000


def test_transfer_more_than_balance_fails(ledger):
    led, alice, bob, _ = ledger
    with pytest.raises(InsufficientBalance):
        led.transfer(alice, bob, 1001)
    assert led.balance_of(alice) == 1000


def test_authorized_mint_and_burn(ledger):
    led, alice, bob, bridge = ledger
    led.authorize(bridge)
    led.mint(bridge, bob, 50)
    assert led.total_supply == 1050
    led.burn(bridge, bob, 50)
    assert led.balance_of(bob) == 0 and led.total_supply == 1000


def test_unauthorized_mint(ledger, sim):
    led, alice, bob, _ = ledger
    mallory = Address.named(led.chain, "mallory")
    with pytest.raises(Unauthorized, match="unauthorized"):
        led.mint(mallory, bob, 50)


def test_cross_chain_address_cannot_touch_ledger(two_chains):
    sim, a, b = two_chains
    led = sim.deploy_ledger(a, "TKN", 18, {Address.named(a, "alice"): 10})
    with pytest.raises(ConfigError):
        led.transfer(Address.named(a, "alice"), Address.named(b, "alice"), 1)


def test_amount_bounds():
    assert check_amount(UINT256_MAX) == UINT256_MAX
    with pytest.raises(AmountOverflow):
        check_amount(UINT256_MAX + 1)
    with pytest.raises(AmountOverflow):
        check_amount(-1)


def test_advance_on_empty_sim_logs_nothing(sim):
    assert sim.advance_tick(1) == 1
    assert sim.events == []


def test_scheduled_callbacks_run_in_order(sim):
    seen = []
    sim.schedule(2, lambda: seen.append("b"))
    sim.schedule(1, lambda: seen.append("a"))
    sim.schedule(2, lambda: seen.append("c"))
    sim.advance_tick(2)
    assert seen == ["a", "b", "c"]


def test_event_log_round_trip(ledger, sim):
    led, alice, bob, _ = ledger
    led.transfer(alice, bob, 5)
    text = dump_events(sim.events)
    assert dump_events(load_events(text)) == text


def test_address_value_is_chain_independent(two_chains):
    _, a, b = two_chains
    x = Address.named(a, "token")
    assert x.on(b).value == x.value and x.on(b) != x
