"""Deployment configs and builders: one uniform handle per token family.

A :class:`World` turns a :class:`WorldConfig` into a running simulation with
every family deployed, limits set, users funded and genesis taken. Each
family is wrapped in a :class:`FamilyDeployment` exposing the same small
surface (transfer, pause, forge, ...) whatever the standard underneath, so
workloads and scenarios do not need per-standard code paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .cct import BURN_MINT, LOCK_RELEASE, CcipNetwork, CctFeeConfig, TokenPool
from .chain import Address, ChainId, TokenLedger
from .errors import ConfigError
from .harness import Harness
from .messaging import (DEFAULT_LATENCY, BridgeWhitelist, CrossChainMessage, DvnSet,
                        GuardianQuorum)
from .ntt import DEFAULT_GUARDIAN_THRESHOLD, DEFAULT_GUARDIANS, WORMHOLE_CHANNEL, Mode, NttManager
from .oft import OftAdapter, OftFeeConfig, OftToken, SendParams
from .payloads import CctPayload, NttPayload, OftPayload, SuperchainPayload, XErc20Payload
from .sim import Simulation
from .superchain import BRIDGE_NAME, MESSENGER_NAME, SuperchainNetwork, SuperchainToken
from .xerc20 import Lockbox, XErc20Bridge, XErc20Token

STANDARDS = ("xerc20", "oft", "ntt", "cct", "superchain")
MODES = {
    "xerc20": ("BurnMint", "LockMint"),
    "oft": ("BurnMint", "LockMint"),
    "ntt": ("BurnMint", "LockMint"),
    "cct": ("BurnMint", "LockMint", "BurnUnlock", "LockUnlock"),
    "superchain": ("BurnMint",),
}


@dataclass
class ChainSpec:
    label: str
    block_interval: int = 1
    is_ethereum: bool = False
    superchain: bool = False


@dataclass
class BridgeSpec:
    name: str
    fee_rate: Fraction = Fraction(0)
    latency: int | None = None


@dataclass
class DvnSpec:
    required: list[str] = field(default_factory=lambda: ["dvn:req0"])
    optional: list[str] = field(default_factory=lambda: ["dvn:opt0", "dvn:opt1", "dvn:opt2"])
    threshold: int = 2

    def model(self) -> DvnSet:
        return DvnSet(frozenset(self.required), frozenset(self.optional), self.threshold)


@dataclass
class FamilySpec:
    name: str
    standard: str
    mode: str = "BurnMint"
    chains: list[str] = field(default_factory=list)   # empty: every eligible chain
    native: str | None = None                          # hub / lock chain; default first chain
    decimals: int | dict[str, int] = 18
    balance: int = 1_000_000                           # per user, on each funded chain
    limit: int | None = None                           # rate limit per window, None: unlimited
    window: int = 100
    latency: int | None = None
    liquidity: int = 0                                 # CCT lock_release pre-funding per pool
    shared_decimals: int = 6
    oft_fees: OftFeeConfig = field(default_factory=OftFeeConfig)
    dvn: DvnSpec = field(default_factory=DvnSpec)
    bridges: list[BridgeSpec] = field(default_factory=lambda: [BridgeSpec("bridge")])
    transceivers: int = 1
    cct_fees: CctFeeConfig = field(default_factory=CctFeeConfig)

    def decimals_on(self, chain: str) -> int:
        if isinstance(self.decimals, dict):
            return self.decimals.get(chain, max(self.decimals.values()))
        return self.decimals


@dataclass
class WorldConfig:
    name: str = "world"
    chains: list[ChainSpec] = field(default_factory=list)
    families: list[FamilySpec] = field(default_factory=list)
    users: list[str] = field(default_factory=lambda: ["alice", "bob", "carol"])
    latency: int = DEFAULT_LATENCY
    guardians: int = DEFAULT_GUARDIANS
    guardian_threshold: int = DEFAULT_GUARDIAN_THRESHOLD
    don_committee: int = 4
    don_threshold: int = 3
    auto_relay: bool = True


class FamilyDeployment:
    """Uniform handle over one deployed token family."""

    standard = ""

    def __init__(self, world: World, spec: FamilySpec):
        self.world = world
        self.sim = world.sim
        self.spec = spec
        self.name = spec.name
        self.chains: list[ChainId] = []
        self.ledgers: dict[ChainId, TokenLedger] = {}

    # helpers
    def owner(self, chain: ChainId) -> Address:
        return Address.named(chain, f"owner:{self.name}")

    def user(self, name: str, chain: ChainId) -> Address:
        return Address.named(chain, name)

    def ledger(self, chain: ChainId) -> TokenLedger:
        return self.ledgers[chain]

    @property
    def native(self) -> ChainId:
        return self.sim.chain(self.spec.native) if self.spec.native else self.chains[0]

    def deploy_ledger(self, chain: ChainId, token_id: str | None = None,
                      funded: bool = True) -> TokenLedger:
        holders = {}
        if funded and self.spec.balance:
            holders = {self.user(u, chain): self.spec.balance for u in self.world.config.users}
        ledger = self.sim.deploy_ledger(chain, token_id or self.name,
                                        self.spec.decimals_on(chain.label), holders, self.name)
        return ledger

    def funded_chains(self) -> list[ChainId]:
        return [self.native] if self.spec.mode in ("LockMint", "BurnUnlock") else list(self.chains)

    # uniform surface
    def build(self) -> None:
        raise NotImplementedError

    def transfer(self, sender: Address, dst: ChainId, recipient: Address, amount: int):
        raise NotImplementedError

    def receiver(self, chain: ChainId):
        """The contract that pauses deliveries on ``chain``."""
        raise NotImplementedError

    def pause(self, chain: ChainId) -> None:
        self.receiver(chain).pause(self.owner(chain))

    def unpause(self, chain: ChainId) -> None:
        self.receiver(chain).unpause(self.owner(chain))

    def is_paused(self, chain: ChainId) -> bool:
        return self.receiver(chain).paused

    def set_limit(self, chain: ChainId, limit: int) -> None:
        raise ConfigError(f"{self.standard} has no rate limits")

    def channel(self, src: ChainId) -> str:
        raise NotImplementedError

    def route_verifiers(self, src: ChainId, dst: ChainId) -> list[str]:
        from .messaging import verifier_ids

        ch = self.sim.messages.channels[self.channel(src)]
        return list(verifier_ids(ch.model_for(src, dst)))

    def forge(self, src: ChainId, dst: ChainId, recipient: Address, amount: int,
              verifiers: list[str]) -> CrossChainMessage:
        emitter, receiver, payload = self.forged_parts(src, dst, recipient, amount)
        return self.sim.messages.inject_forged_message(
            dst, receiver, payload, verifiers, channel=self.channel(src), src=src, emitter=emitter)

    def forged_parts(self, src, dst, recipient, amount) -> tuple[Address, Address, bytes]:
        raise NotImplementedError

    def maintenance(self, rng) -> None:
        """Standard-specific housekeeping a user or keeper might do."""


class XErc20Family(FamilyDeployment):
    standard = "xerc20"

    def build(self):
        spec = self.spec
        self.tokens: dict[ChainId, XErc20Token] = {}
        self.bridges: dict[str, dict[ChainId, XErc20Bridge]] = {}
        self.lockbox: Lockbox | None = None
        for b in spec.bridges:
            ch = f"xb:{b.name}"
            if ch not in self.sim.messages.channels:
                self.sim.messages.add_channel(ch, BridgeWhitelist(),
                                              b.latency or spec.latency or self.world.config.latency)
            self.bridges[b.name] = {}
        for chain in self.chains:
            lockbox_chain = spec.mode == "LockMint" and chain == self.native
            ledger = self.deploy_ledger(chain, funded=not lockbox_chain and spec.mode == "BurnMint")
            self.ledgers[chain] = ledger
            token = XErc20Token(self.sim, ledger, self.owner(chain), spec.window)
            self.tokens[chain] = token
            if lockbox_chain:
                legacy = self.deploy_ledger(chain, f"{self.name}.legacy")
                self.legacy = legacy
                self.lockbox = Lockbox(self.sim, legacy, token)
            for b in spec.bridges:
                bridge = self.world.xerc20_bridge(b, chain)
                bridge.attach(token)
                self.bridges[b.name][chain] = bridge
                limit = spec.limit if spec.limit is not None else 2**200
                token.set_limits(self.owner(chain), bridge.address, limit, limit)
        if self.lockbox is not None:
            # Half of every legacy balance migrates up front.
            for u in self.world.config.users:
                addr = self.user(u, self.native)
                self.lockbox.deposit(addr, self.legacy.balance_of(addr) // 2)

    def bridge_for(self, chain: ChainId, name: str | None = None) -> XErc20Bridge:
        return self.bridges[name or self.spec.bridges[0].name][chain]

    def transfer(self, sender, dst, recipient, amount, bridge: str | None = None):
        return self.bridge_for(sender.chain, bridge).send(sender, self.name, dst, recipient, amount)

    def receiver(self, chain):
        return self.tokens[chain]

    def set_limit(self, chain, limit):
        for b in self.spec.bridges:
            self.tokens[chain].set_limits(self.owner(chain), self.bridges[b.name][chain].address,
                                          limit, limit)

    def channel(self, src):
        return f"xb:{self.spec.bridges[0].name}"

    def forged_parts(self, src, dst, recipient, amount):
        b = self.bridge_for(src)
        payload = XErc20Payload(self.name, recipient.value, amount, 2**63).encode()
        return b.address, b.peer(dst), payload

    def maintenance(self, rng):
        if self.lockbox is None:
            return
        u = self.user(rng.choice(self.world.config.users), self.native)
        if rng.random() < 0.5:
            amount = rng.randint(0, self.legacy.balance_of(u))
            self.lockbox.deposit(u, amount)
        else:
            amount = rng.randint(0, self.ledgers[self.native].balance_of(u))
            self.lockbox.withdraw(u, amount)


class OftFamily(FamilyDeployment):
    standard = "oft"

    def build(self):
        spec = self.spec
        self.channel_name = f"lz:{self.name}"
        self.sim.messages.add_channel(self.channel_name, spec.dvn.model(),
                                      spec.latency or self.world.config.latency,
                                      issuer_configurable=True)
        self.apps: dict[ChainId, OftToken | OftAdapter] = {}
        for chain in self.chains:
            ledger = self.deploy_ledger(chain, funded=chain in self.funded_chains())
            self.ledgers[chain] = ledger
            cls = OftAdapter if spec.mode == "LockMint" and chain == self.native else OftToken
            self.apps[chain] = cls(self.sim, ledger, self.owner(chain), self.channel_name,
                                   spec.shared_decimals, spec.oft_fees)
        for a in self.chains:
            for b in self.chains:
                if a != b:
                    self.apps[a].set_peer(self.owner(a), b, self.apps[b].address)
                    if spec.limit is not None:
                        self.apps[a].set_rate_limit(self.owner(a), b, spec.limit, spec.window)

    def transfer(self, sender, dst, recipient, amount, min_amount: int = 0):
        return self.apps[sender.chain].send(sender, SendParams(dst, recipient, amount, min_amount))

    def receiver(self, chain):
        return self.apps[chain]

    def set_limit(self, chain, limit):
        for other in self.chains:
            if other != chain:
                self.apps[chain].set_rate_limit(self.owner(chain), other, limit, self.spec.window)

    def channel(self, src):
        return self.channel_name

    def forged_parts(self, src, dst, recipient, amount):
        app = self.apps[src]
        shared = amount // 10 ** (self.ledgers[dst].decimals - self.spec.shared_decimals)
        return app.address, self.apps[dst].address, OftPayload(recipient.value, shared, 2**63).encode()


class NttFamily(FamilyDeployment):
    standard = "ntt"

    def build(self):
        spec = self.spec
        self.managers: dict[ChainId, NttManager] = {}
        hub_mode = spec.mode == "LockMint"
        for chain in self.chains:
            ledger = self.deploy_ledger(chain, funded=chain in self.funded_chains())
            self.ledgers[chain] = ledger
            mode = Mode.HUB_SPOKE_LOCK if hub_mode else Mode.BURN_MINT
            mgr = NttManager(self.sim, ledger, mode, self.owner(chain),
                             is_hub=hub_mode and chain == self.native, window=spec.window)
            self.managers[chain] = mgr
            for i in range(spec.transceivers):
                mgr.set_transceiver(self.owner(chain), Address.named(chain, f"xcvr{i}:{self.name}"))
            mgr.set_threshold(self.owner(chain), spec.transceivers)
            if spec.limit is not None:
                mgr.set_outbound_limit(self.owner(chain), spec.limit)
        for a in self.chains:
            for b in self.chains:
                if a != b:
                    self.managers[a].set_peer(self.owner(a), b, self.managers[b].address)
                    if spec.limit is not None:
                        self.managers[a].set_inbound_limit(self.owner(a), b, spec.limit)
            if spec.latency is not None:
                for b in self.chains:
                    if a != b:
                        self.sim.messages.set_latency(WORMHOLE_CHANNEL, spec.latency, a, b)

    def transfer(self, sender, dst, recipient, amount):
        return self.managers[sender.chain].transfer(sender, dst, recipient, amount)

    def receiver(self, chain):
        return self.managers[chain]

    def set_limit(self, chain, limit):
        mgr = self.managers[chain]
        mgr.set_outbound_limit(self.owner(chain), limit)
        for other in self.chains:
            if other != chain:
                mgr.set_inbound_limit(self.owner(chain), other, limit)

    def channel(self, src):
        return WORMHOLE_CHANNEL

    def forged_parts(self, src, dst, recipient, amount):
        payload = NttPayload(self.name, amount, recipient.value, 2**63).encode()
        return self.managers[src].address, self.managers[dst].address, payload

    def maintenance(self, rng):
        """Complete a matured queued transfer or cancel one, if any exist."""
        for chain in self.chains:
            mgr = self.managers[chain]
            tick = self.sim.tick
            for seq in sorted(mgr.outbound_queue):
                entry = mgr.outbound_queue[seq]
                if rng.random() < 0.2 and entry.sender is not None:
                    mgr.cancel_outbound_queued_transfer(entry.sender, seq)
                    return
                if tick >= entry.queued_tick + mgr.window:
                    mgr.complete_outbound_queued_transfer(entry.sender, seq)
                    return
            for digest in sorted(mgr.inbound_queue):
                if tick >= mgr.inbound_queue[digest].queued_tick + mgr.window:
                    mgr.complete_inbound_queued_transfer(digest)
                    return


class CctFamily(FamilyDeployment):
    standard = "cct"

    def pool_kind(self, chain: ChainId) -> str:
        mode = self.spec.mode
        native = chain == self.native
        if mode == "BurnMint":
            return BURN_MINT
        if mode == "LockUnlock":
            return LOCK_RELEASE
        if mode == "LockMint":
            return LOCK_RELEASE if native else BURN_MINT
        return BURN_MINT if native else LOCK_RELEASE  # BurnUnlock

    def funded_chains(self):
        if self.spec.mode == "LockUnlock":
            return list(self.chains)
        return [self.native] if self.spec.mode != "BurnMint" else list(self.chains)

    def build(self):
        spec = self.spec
        net = self.world.ccip()
        self.pools: dict[ChainId, TokenPool] = {}
        funded = self.funded_chains()
        for chain in self.chains:
            kind = self.pool_kind(chain)
            needs_liquidity = kind == LOCK_RELEASE and spec.liquidity > 0
            ledger = self.deploy_ledger(chain, funded=chain in funded)
            self.ledgers[chain] = ledger
            pool = TokenPool(self.sim, ledger, kind, self.owner(chain), spec.window)
            self.pools[chain] = pool
            if needs_liquidity:
                ledger._mint(self.owner(chain), spec.liquidity)
                pool.provide_liquidity(self.owner(chain), spec.liquidity)
            registry = net.router(chain).registry
            registry.set_token_roles(self.name, self.owner(chain))
            registry.register_token(self.owner(chain), self.name, pool, self.owner(chain))
        for a in self.chains:
            for b in self.chains:
                if a == b:
                    continue
                if (a, b) not in net.lanes:
                    net.open_lane(a, b, self.world.config.don_committee,
                                  self.world.config.don_threshold, spec.cct_fees)
                    if spec.latency is not None:
                        self.sim.messages.set_latency(net.channel, spec.latency, a, b)
                self.pools[a].apply_chain_updates(self.owner(a), b, self.pools[b].address, self.name,
                                                  spec.limit, spec.limit)

    def transfer(self, sender, dst, recipient, amount, pay_in_link: bool = False):
        router = self.world.ccip().router(sender.chain)
        return router.ccip_send(sender, dst, recipient, self.name, amount, pay_in_link)

    def receiver(self, chain):
        return self.pools[chain]

    def set_limit(self, chain, limit):
        for other in self.chains:
            if other != chain:
                self.pools[chain].set_chain_rate_limiter_config(self.owner(chain), other, limit, limit)

    def channel(self, src):
        return self.world.ccip().channel

    def forged_parts(self, src, dst, recipient, amount):
        net = self.world.ccip()
        onramp = net.router(src).onramps[dst]
        mode = net.router(src).mode_for(self.pools[src], dst)
        payload = CctPayload(self.name, amount, recipient.value, self.pools[src].address.value,
                             mode).encode()
        return onramp.address, Address.named(dst, f"offramp:{src.label}"), payload


class SuperchainFamily(FamilyDeployment):
    standard = "superchain"

    def build(self):
        net = self.world.superchain()
        self.tokens: dict[ChainId, SuperchainToken] = {}
        for chain in self.chains:
            if not net.is_member(chain):
                raise ConfigError(f"{chain.label} is not a Superchain member")
            ledger = self.deploy_ledger(chain)
            self.ledgers[chain] = ledger
            self.tokens[chain] = net.deploy_token(ledger, self.owner(chain))

    def transfer(self, sender, dst, recipient, amount):
        net = self.world.superchain()
        token = self.tokens[sender.chain]
        return net.bridges[sender.chain].send_erc20(sender, token.address, dst, recipient, amount)

    def receiver(self, chain):
        return self.tokens[chain]

    def channel(self, src):
        return self.world.superchain().channel

    def forged_parts(self, src, dst, recipient, amount):
        payload = SuperchainPayload(self.tokens[src].address.value, recipient.value, amount,
                                    2**63).encode()
        return Address.named(src, BRIDGE_NAME), Address.named(dst, MESSENGER_NAME), payload


FAMILY_TYPES = {"xerc20": XErc20Family, "oft": OftFamily, "ntt": NttFamily, "cct": CctFamily,
                "superchain": SuperchainFamily}


class World:
    def __init__(self, config: WorldConfig, seed: int = 0, harness: bool = True):
        self.config = config
        self.seed = seed
        self.sim = Simulation(seed, config.name)
        self.harness = Harness(self.sim) if harness else None
        self._ccip: CcipNetwork | None = None
        self._superchain: SuperchainNetwork | None = None
        self._xbridges: dict[tuple[str, ChainId], XErc20Bridge] = {}
        for spec in config.chains:
            self.sim.create_chain(spec.label, spec.block_interval, is_ethereum=spec.is_ethereum,
                                  superchain=spec.superchain)
        self.chains = [self.sim.chain(c.label) for c in config.chains]
        guardians = frozenset(f"guardian:{i}" for i in range(config.guardians))
        self.sim.messages.add_channel(WORMHOLE_CHANNEL,
                                      GuardianQuorum(guardians, config.guardian_threshold),
                                      config.latency)
        self.families: dict[str, FamilyDeployment] = {}
        for spec in config.families:
            self.add_family(spec)
        self.sim.genesis()

    def ccip(self) -> CcipNetwork:
        if self._ccip is None:
            self._ccip = CcipNetwork(self.sim)
            if self.config.latency != DEFAULT_LATENCY:
                self.sim.messages.set_latency(self._ccip.channel, self.config.latency)
        return self._ccip

    def superchain(self) -> SuperchainNetwork:
        if self._superchain is None:
            members = [self.sim.chain(c.label) for c in self.config.chains if c.superchain]
            self._superchain = SuperchainNetwork(self.sim, members, self.config.auto_relay)
        return self._superchain

    def xerc20_bridge(self, spec: BridgeSpec, chain: ChainId) -> XErc20Bridge:
        key = (spec.name, chain)
        if key not in self._xbridges:
            self._xbridges[key] = XErc20Bridge(self.sim, spec.name, chain, f"xb:{spec.name}",
                                               spec.fee_rate)
        return self._xbridges[key]

    def add_family(self, spec: FamilySpec) -> FamilyDeployment:
        if spec.standard not in FAMILY_TYPES:
            raise ConfigError(f"unknown standard {spec.standard!r}")
        if spec.mode not in MODES[spec.standard]:
            if spec.standard == "superchain":
                raise ConfigError("Superchain tokens are burn-and-mint only; no lock-and-mint mode")
            raise ConfigError(f"{spec.standard} has no {spec.mode} mode")
        if spec.name in self.families:
            raise ConfigError(f"duplicate family {spec.name!r}")
        if isinstance(spec.decimals, dict) and spec.standard != "oft" \
                and len(set(spec.decimals.values())) > 1:
            raise ConfigError("only OFT families may use different decimals per chain")
        dep = FAMILY_TYPES[spec.standard](self, spec)
        if spec.chains:
            dep.chains = [self.sim.chain(c) for c in spec.chains]
        elif spec.standard == "superchain":
            dep.chains = [self.sim.chain(c.label) for c in self.config.chains if c.superchain]
        else:
            dep.chains = list(self.chains)
        if len(dep.chains) < 2:
            raise ConfigError(f"family {spec.name} needs at least two chains")
        if spec.native is not None and self.sim.chain(spec.native) not in dep.chains:
            raise ConfigError(f"native chain {spec.native} is not one of the family's chains")
        self.sim.register_family(spec.name, spec.standard, spec.mode)
        dep.build()
        self.families[spec.name] = dep
        return dep

    def user(self, name: str, chain: ChainId | str) -> Address:
        if isinstance(chain, str):
            chain = self.sim.chain(chain)
        return Address.named(chain, name)

    def family(self, name: str) -> FamilyDeployment:
        try:
            return self.families[name]
        except KeyError:
            raise ConfigError(f"unknown family {name!r}") from None

    def transfer(self, family: str, src: str, dst: str, sender: str, recipient: str,
                 amount: int, **kwargs) -> Any:
        dep = self.family(family)
        s, d = self.sim.chain(src), self.sim.chain(dst)
        return dep.transfer(self.user(sender, s), d, self.user(recipient, d), amount, **kwargs)

    def settle(self, extra: int = 0) -> None:
        """Advance until nothing deliverable is pending, then ``extra`` more ticks."""
        msgs = self.sim.messages
        latest = max((m.ready_tick for m in msgs._pending.values()), default=self.sim.tick)
        latest = max([latest] + [t for t, _, _ in msgs._ready])
        if latest > self.sim.tick:
            self.sim.run_until(latest)
        if extra:
            self.sim.advance_tick(extra)


def default_topology() -> list[ChainSpec]:
    """Five chains: Ethereum plus four L2s, three of them in the Superchain."""
    return [ChainSpec("ethereum", 12, is_ethereum=True), ChainSpec("arbitrum", 1),
            ChainSpec("optimism", 2, superchain=True), ChainSpec("base", 2, superchain=True),
            ChainSpec("zora", 2, superchain=True)]


def all_standards_config(name: str = "campaign-5chain", window: int = 100,
                         limit: int | None = 400_000) -> WorldConfig:
    """Every standard in every supply mode it offers, on the default topology."""
    fams = [
        FamilySpec("XB", "xerc20", "BurnMint", limit=limit, window=window,
                   bridges=[BridgeSpec("connext", Fraction(5, 10_000)), BridgeSpec("hyp")]),
        FamilySpec("XL", "xerc20", "LockMint", native="ethereum", limit=limit, window=window),
        FamilySpec("OB", "oft", "BurnMint", decimals={"ethereum": 18, "arbitrum": 8,
                                                      "optimism": 18, "base": 6, "zora": 18},
                   balance=10**20, limit=None if limit is None else 10**19, window=window),
        FamilySpec("OL", "oft", "LockMint", native="ethereum", decimals=12, balance=10**18,
                   window=window),
        FamilySpec("NB", "ntt", "BurnMint", limit=limit, window=window),
        FamilySpec("NL", "ntt", "LockMint", native="ethereum", limit=limit, window=window),
        FamilySpec("CB", "cct", "BurnMint", limit=limit, window=window),
        FamilySpec("CM", "cct", "LockMint", native="ethereum", limit=limit, window=window),
        FamilySpec("CU", "cct", "BurnUnlock", native="ethereum", window=window, liquidity=3_000_000),
        FamilySpec("CL", "cct", "LockUnlock", window=window, liquidity=2_000_000),
        FamilySpec("SB", "superchain", "BurnMint"),
    ]
    return WorldConfig(name, default_topology(), fams)


__all__ = ["BridgeSpec", "ChainSpec", "DvnSpec", "FamilySpec", "WorldConfig", "World",
           "FamilyDeployment", "STANDARDS", "MODES", "all_standards_config", "default_topology"]
