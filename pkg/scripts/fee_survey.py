"""Fee charged per transfer, by standard, across transfer sizes.

    python scripts/fee_survey.py

Each row moves one amount once over a fresh two-chain deployment and reports
the exact fees recorded in the event log.
"""
from fractions import Fraction

from xchainsim.deploy import BridgeSpec, ChainSpec, FamilySpec, World, WorldConfig

CHAINS = [ChainSpec("ethereum", 12, is_ethereum=True), ChainSpec("optimism", 2, superchain=True),
          ChainSpec("base", 2, superchain=True)]

CASES = [
    ("xERC20 plain bridge", FamilySpec("F", "xerc20", decimals=6, balance=10**9, chains=["ethereum", "optimism"]), {}),
    ("xERC20 Connext fast path", FamilySpec("F", "xerc20", decimals=6, balance=10**9, chains=["ethereum", "optimism"],
                                            bridges=[BridgeSpec("connext", Fraction(5, 10_000))]), {}),
    ("OFT", FamilySpec("F", "oft", decimals=6, balance=10**9, chains=["ethereum", "optimism"]), {}),
    ("NTT", FamilySpec("F", "ntt", decimals=6, balance=10**9, chains=["ethereum", "optimism"]), {}),
    ("CCT BurnMint", FamilySpec("F", "cct", decimals=6, balance=10**9, chains=["ethereum", "optimism"]), {}),
    ("CCT BurnMint, LINK", FamilySpec("F", "cct", decimals=6, balance=10**9, chains=["ethereum", "optimism"]),
     {"pay_in_link": True}),
    ("CCT LockUnlock", FamilySpec("F", "cct", "LockUnlock", decimals=6, balance=10**9,
                                  chains=["ethereum", "optimism"], liquidity=10**9), {}),
    ("CCT LockUnlock, LINK", FamilySpec("F", "cct", "LockUnlock", decimals=6, balance=10**9,
                                        chains=["ethereum", "optimism"], liquidity=10**9), {"pay_in_link": True}),
    ("SuperchainERC20", FamilySpec("F", "superchain", decimals=6, balance=10**9), {}),
]
AMOUNTS = [1_000, 1_000_000, 100_000_000]


def fees_for(spec, extra, amount):
    world = World(WorldConfig("fees", CHAINS, [spec]))
    dep = world.family("F")
    src, dst = dep.chains[0], dep.chains[1]
    start = len(world.sim.events)
    dep.transfer(dep.user("alice", src), dst, dep.user("bob", dst), amount, **extra)
    world.settle(1)
    out = {}
    for ev in world.sim.events[start:]:
        if ev.name == "fee.charge":
            key = f"{ev.fields['component']} ({ev.fields['currency']})"
            out[key] = out.get(key, Fraction(0)) + Fraction(ev.fields["amount"])
    return ", ".join(f"{k}={v}" for k, v in sorted(out.items())) or "none"


def main():
    for label, spec, extra in CASES:
        print(label)
        for amount in AMOUNTS:
            print(f"  {amount:>12}: {fees_for(spec, extra, amount)}")


if __name__ == "__main__":
    main()
