from hypothesis import HealthCheck, given, settings, strategies as st

from xchainsim.deploy import ChainSpec, FamilySpec, WorldConfig, all_standards_config
from xchainsim.errors import RateLimited
from xchainsim.harness import _quorum_from_description
from xchainsim.messaging import DvnSet, GuardianQuorum, describe_model, quorum_met
from xchainsim.oft import remove_dust
from xchainsim.ratelimit import RateLimit
from xchainsim.sim import Simulation, dump_events
from xchainsim.workload import run_campaign

from oracles import dust_oracle, dvn_oracle, oracle_capacity


@st.composite
def dust_cases(draw):
    local = draw(st.integers(6, 18))
    shared = draw(st.integers(1, local))
    amount = draw(st.integers(0, 10**30))
    return amount, local, shared


@given(dust_cases())
def test_dust_matches_string_truncation(case):
    amount, local, shared = case
    got = remove_dust(amount, local, shared)
    assert got == dust_oracle(amount, local, shared)
    assert got[1] + got[2] == amount and 0 <= got[2] < 10 ** (local - shared)


@given(st.integers(1, 10**6), st.integers(1, 500),
       st.lists(st.tuples(st.integers(0, 50), st.integers(0, 10**6)), max_size=30))
def test_rate_limit_matches_fraction_oracle(limit, window, steps):
    sim = Simulation(0, "rl")
    rl = RateLimit(sim, "r", limit, window)
    history = []
    for gap, amount in steps:
        if gap:
            sim.advance_tick(gap)
        expected = oracle_capacity(limit, window, history, sim.tick)
        assert rl.capacity == expected
        if amount <= expected:
            rl.consume(amount)
            history.append((sim.tick, amount))
        else:
            try:
                rl.consume(amount)
            except RateLimited:
                pass
            else:
                raise AssertionError("consume above capacity succeeded")


@st.composite
def dvn_sets(draw):
    names = [f"v{i}" for i in range(8)]
    nreq = draw(st.integers(0, 3))
    nopt = draw(st.integers(0, 5))
    req, opt = names[:nreq], names[nreq:nreq + nopt]
    lo = 0 if req else 1
    if lo > len(opt):
        opt = opt + ["v7"]
    m = draw(st.integers(lo, len(opt)))
    attested = draw(st.sets(st.sampled_from(names)))
    return req, opt, m, attested


@given(dvn_sets())
def test_dvn_rule_three_ways(case):
    req, opt, m, attested = case
    model = DvnSet(frozenset(req), frozenset(opt), m)
    expected = dvn_oracle(req, opt, m, attested)
    assert quorum_met(model, attested) == expected
    assert _quorum_from_description(describe_model(model), attested) == expected


@given(st.integers(1, 19).flatmap(lambda t: st.tuples(
    st.just(t), st.sets(st.integers(0, 18)))))
def test_guardian_quorum_counts_members(case):
    threshold, members = case
    model = GuardianQuorum(frozenset(f"g{i}" for i in range(19)), threshold)
    attested = {f"g{i}" for i in members} | {"outsider"}
    assert quorum_met(model, attested) == (len(members) >= threshold)


SMALL = WorldConfig("small", [ChainSpec("ethereum", 12, is_ethereum=True), ChainSpec("arbitrum", 1),
                              ChainSpec("optimism", 2, superchain=True),
                              ChainSpec("base", 2, superchain=True)],
                    [FamilySpec("XB", "xerc20", limit=50_000, window=20),
                     FamilySpec("OB", "oft", decimals={"ethereum": 18, "arbitrum": 8, "optimism": 6,
                                                       "base": 12}, balance=10**18),
                     FamilySpec("NL", "ntt", "LockMint", native="ethereum", limit=50_000, window=20),
                     FamilySpec("CU", "cct", "BurnUnlock", native="ethereum", liquidity=500_000),
                     FamilySpec("SB", "superchain")])


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 2**32), st.integers(50, 400))
def test_conservation_holds_on_random_campaigns(seed, ops):
    result = run_campaign(SMALL, seed, ops)
    assert result.report.passed, result.report.failures()


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2**32))
def test_full_topology_campaign_is_reproducible(seed):
    a = run_campaign(all_standards_config(), seed, 150)
    b = run_campaign(all_standards_config(), seed, 150)
    assert a.report.passed, a.report.failures()
    assert dump_events(a.world.sim.events) == dump_events(b.world.sim.events)
