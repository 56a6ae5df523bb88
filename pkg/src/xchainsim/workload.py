"""Randomized operation mixes for property campaigns.

Operations are drawn from a seeded ``random.Random``; everything else the
simulation does is deterministic, so (config, seed, n_ops) fixes the event
log byte for byte.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .cct import LOCK_RELEASE
from .deploy import FamilyDeployment, World, WorldConfig, all_standards_config
from .errors import SimulationError
from .harness import InvariantReport
from .messaging import DvnSet, GuardianQuorum, DonLane, Status

OP_WEIGHTS = {
    "transfer": 60,
    "advance": 15,
    "local": 5,
    "maintenance": 6,
    "pause": 4,
    "limit": 3,
    "adversary": 3,
    "reconfigure": 2,
}


@dataclass
class CampaignResult:
    world: World
    report: InvariantReport
    ops: Counter = field(default_factory=Counter)
    reverts: Counter = field(default_factory=Counter)


def below_quorum(model, rng: random.Random) -> list[str]:
    """A random verifier subset that cannot satisfy ``model`` on its own."""
    if isinstance(model, DvnSet):
        required = sorted(model.required)
        optional = sorted(model.optional)
        if required and rng.random() < 0.5:
            # every optional verifier but at least one required one missing
            keep = rng.sample(required, rng.randrange(len(required)))
            return keep + optional
        k = max(0, model.optional_threshold - 1)
        return required + rng.sample(optional, min(k, len(optional)))
    if isinstance(model, (GuardianQuorum, DonLane)):
        members = sorted(model.guardians if isinstance(model, GuardianQuorum) else model.committee)
        return rng.sample(members, rng.randrange(model.threshold))
    return []


class Workload:
    def __init__(self, world: World, seed: int):
        self.world = world
        self.sim = world.sim
        self.rng = random.Random(seed)
        self.names = sorted(world.families)
        self.users = list(world.config.users)
        self.ops: Counter = Counter()
        self.reverts: Counter = Counter()
        self._kinds = list(OP_WEIGHTS)
        self._weights = [OP_WEIGHTS[k] for k in self._kinds]
        # CCT messages headed for lock_release pools, not yet settled
        self._pending_release: list[tuple] = []

    def pick_family(self) -> FamilyDeployment:
        return self.world.families[self.rng.choice(self.names)]

    def pick_amount(self, balance: int) -> int:
        r = self.rng.random()
        if r < 0.05:
            return 0
        if r < 0.12:
            return balance + self.rng.randint(1, max(1, balance))
        divisor = self.rng.choice((1, 2, 10, 100, 1000))
        return self.rng.randint(0, max(0, balance // divisor))

    def step(self) -> None:
        kind = self.rng.choices(self._kinds, self._weights)[0]
        self.ops[kind] += 1
        try:
            getattr(self, f"op_{kind}")()
        except SimulationError as exc:
            self.reverts[type(exc).__name__] += 1

    def run(self, n_ops: int) -> None:
        for _ in range(n_ops):
            self.step()

    # -- operations ------------------------------------------------------------
    def _release_headroom(self, dep: FamilyDeployment, dst) -> int | None:
        pool = getattr(dep, "pools", {}).get(dst)
        if pool is None or pool.kind != LOCK_RELEASE:
            return None
        live = []
        reserved = 0
        for msg, fam, chain, amount in self._pending_release:
            if msg.status in (Status.DELIVERED, Status.REJECTED):
                continue
            live.append((msg, fam, chain, amount))
            if fam == dep.name and chain == dst:
                reserved += amount
        self._pending_release = live
        return pool.locked - reserved

    def op_transfer(self) -> None:
        dep = self.pick_family()
        src, dst = self.rng.sample(dep.chains, 2)
        sender = dep.user(self.rng.choice(self.users), src)
        recipient = dep.user(self.rng.choice(self.users), dst)
        amount = self.pick_amount(dep.ledgers[src].balance_of(sender))
        headroom = self._release_headroom(dep, dst)
        if headroom is not None:
            amount = min(amount, max(0, headroom))
        extra = {}
        if dep.standard == "xerc20":
            extra["bridge"] = self.rng.choice(dep.spec.bridges).name
        result = dep.transfer(sender, dst, recipient, amount, **extra)
        if headroom is not None:
            msg = result[0]
            self._pending_release.append((msg, dep.name, dst, amount))

    def op_advance(self) -> None:
        self.sim.advance_tick(self.rng.randint(1, 3))

    def op_local(self) -> None:
        dep = self.pick_family()
        chain = self.rng.choice(dep.chains)
        a, b = (dep.user(u, chain) for u in self.rng.sample(self.users, 2))
        ledger = dep.ledgers[chain]
        ledger.transfer(a, b, self.pick_amount(ledger.balance_of(a)))

    def op_maintenance(self) -> None:
        self.pick_family().maintenance(self.rng)

    def op_pause(self) -> None:
        dep = self.pick_family()
        chain = self.rng.choice(dep.chains)
        if dep.is_paused(chain):
            dep.unpause(chain)
        else:
            dep.pause(chain)
            # keep pauses short so held messages do resume within the run
            self.sim.schedule(self.sim.tick + self.rng.randint(1, 10),
                              lambda d=dep, c=chain: d.is_paused(c) and d.unpause(c))

    def op_limit(self) -> None:
        dep = self.pick_family()
        if dep.spec.limit is None:
            return
        chain = self.rng.choice(dep.chains)
        dep.set_limit(chain, self.rng.randint(dep.spec.limit // 4, dep.spec.limit * 2))

    def op_adversary(self) -> None:
        """Compromise a below-quorum verifier set and have it forge a mint."""
        candidates = [n for n in self.names if self.world.families[n].standard in ("oft", "ntt", "cct")]
        dep = self.world.families[self.rng.choice(candidates)]
        src, dst = self.rng.sample(dep.chains, 2)
        ch = self.sim.messages.channels[dep.channel(src)]
        forging = below_quorum(ch.model_for(src, dst), self.rng)
        for vid in forging:
            self.sim.messages.compromise_verifier(vid)
        recipient = dep.user(self.rng.choice(self.users), dst)
        try:
            dep.forge(src, dst, recipient, self.rng.randint(1, 10**6), forging)
        finally:
            for vid in forging:
                self.sim.messages.restore_verifier(vid)

    def op_reconfigure(self) -> None:
        """Issuer-side configuration churn that must not disturb conservation."""
        dep = self.pick_family()
        if dep.standard == "oft":
            owner = dep.owner(dep.native)
            app = dep.apps[dep.native]
            spec = dep.spec.dvn
            k = self.rng.randint(1, len(spec.optional))
            app.set_dvn_config(owner, DvnSet(frozenset(spec.required), frozenset(spec.optional), k))
        elif dep.standard == "cct":
            chain = self.rng.choice(dep.chains)
            dep.pools[chain].set_rate_limit_admin(dep.owner(chain), dep.user("carol", chain))
        else:
            self.op_limit()

    def drain(self) -> None:
        for name in self.names:
            dep = self.world.families[name]
            for chain in dep.chains:
                if dep.is_paused(chain):
                    dep.unpause(chain)
        self.world.settle(2)


def run_campaign(config: WorldConfig | None, seed: int, n_ops: int) -> CampaignResult:
    world = World(config or all_standards_config(), seed)
    wl = Workload(world, seed)
    wl.run(n_ops)
    wl.drain()
    world.sim.finish()
    return CampaignResult(world, world.harness.report(), wl.ops, wl.reverts)
