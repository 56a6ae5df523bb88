"""Cross-Chain Token machinery: router, on/off ramps, token pools, registry.

Every request enters through a chain's Router, which hands it to the OnRamp
of the (src, dst) lane. The OnRamp moves the tokens into the registered pool
and has it lock or burn them; the OffRamp on the destination has the
destination pool release or mint. Each lane is verified by its own DON
committee, fixed when the lane is opened.

Pools come in two kinds, ``burn_mint`` and ``lock_release``. The transfer
mode (BurnMint, LockMint, BurnUnlock, LockUnlock) follows from the kinds of
the source and destination pools.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable

from .chain import Address, ChainId, TokenLedger, check_amount
from .errors import (ConfigError, DeliveryRejected, InsufficientBalance, InvariantViolation,
                     Paused, RateLimited, SimulationError, Unauthorized, UnknownPeer)
from .messaging import CrossChainMessage, DonLane, Hold
from .payloads import CctPayload
from .ratelimit import DEFAULT_WINDOW, RateLimit

if TYPE_CHECKING:
    from .sim import Simulation

STANDARD = "cct"
CCIP_CHANNEL = "ccip"
DEFAULT_COMMITTEE = 4
DEFAULT_DON_THRESHOLD = 3
BURN_MINT = "burn_mint"
LOCK_RELEASE = "lock_release"

MODES = ("BurnMint", "LockMint", "BurnUnlock", "LockUnlock")


def transfer_mode(src_kind: str, dst_kind: str) -> str:
    lock = src_kind == LOCK_RELEASE
    unlock = dst_kind == LOCK_RELEASE
    return {(False, False): "BurnMint", (True, False): "LockMint",
            (False, True): "BurnUnlock", (True, True): "LockUnlock"}[(lock, unlock)]


@dataclass(frozen=True)
class CctFeeConfig:
    pct_non_link: Fraction = Fraction(5, 10_000)
    pct_link: Fraction = Fraction(63, 100_000)
    fixed_fee_default: Fraction = Fraction(1)
    fixed_fee_ethereum_lane: Fraction = Fraction(5)
    link_discount: Fraction = Fraction(1, 10)

    def __post_init__(self):
        if self.fixed_fee_ethereum_lane < self.fixed_fee_default:
            raise ConfigError("Ethereum-lane fixed fee must not be below the default fixed fee")
        if not 0 <= self.link_discount < 1:
            raise ConfigError("LINK discount must be in [0, 1)")


def compute_fee(cfg: CctFeeConfig, mode: str, amount: int, pay_in_link: bool,
                ethereum_lane: bool) -> Fraction:
    """Percentage fee for LockUnlock, fixed per lane class otherwise."""
    if mode not in MODES:
        raise ConfigError(f"unknown CCT mode {mode!r}")
    if mode == "LockUnlock":
        return amount * (cfg.pct_link if pay_in_link else cfg.pct_non_link)
    fixed = cfg.fixed_fee_ethereum_lane if ethereum_lane else cfg.fixed_fee_default
    return fixed * (1 - cfg.link_discount) if pay_in_link else Fraction(fixed)


@dataclass
class Lane:
    src: ChainId
    dst: ChainId
    don: DonLane
    fee_config: CctFeeConfig
    ethereum: bool = False


class TokenAdminRegistry:
    """One pool per token per chain; only the recorded admin may repoint it."""

    def __init__(self, sim: Simulation, chain: ChainId):
        self.sim = sim
        self.chain = chain
        self.address = Address.named(chain, "ccip:registry")
        self.token_roles: dict[str, tuple[Address, Address | None]] = {}
        self.entries: dict[str, tuple[TokenPool, Address]] = {}
        sim.register_contract(self.address, self)

    def set_token_roles(self, token_id: str, owner: Address, ccip_admin: Address | None = None) -> None:
        """Record the token contract's owner() and getCCIPAdmin() answers."""
        self.token_roles[token_id] = (owner, ccip_admin)

    def register_token(self, caller: Address, token_id: str, pool: TokenPool, admin: Address) -> None:
        if token_id in self.entries:
            raise ConfigError(f"{token_id} already registered on {self.chain.label}")
        owner, ccip_admin = self.token_roles.get(token_id, (None, None))
        if caller not in (owner, ccip_admin) or caller is None:
            raise Unauthorized(f"unauthorized: {caller} is neither token owner nor CCIP admin")
        if pool.ledger.token_id != token_id or pool.chain != self.chain:
            raise ConfigError("pool does not manage this token on this chain")
        self.entries[token_id] = (pool, admin)
        self.sim.log("cct", "register", chain=self.chain.label, token=token_id,
                     pool=str(pool.address), admin=str(admin))

    def set_pool(self, caller: Address, token_id: str, pool: TokenPool) -> None:
        entry = self.entries.get(token_id)
        if entry is None:
            raise ConfigError(f"{token_id} is not registered")
        if caller != entry[1]:
            raise Unauthorized(f"unauthorized: {caller} is not the token admin")
        self.entries[token_id] = (pool, entry[1])
        self.sim.log("cct", "set_pool", chain=self.chain.label, token=token_id, pool=str(pool.address))

    def pool(self, token_id: str) -> TokenPool | None:
        entry = self.entries.get(token_id)
        return entry[0] if entry else None


@dataclass
class RemoteChain:
    pools: set[Address]
    token_id: str
    outbound: RateLimit | None = None
    inbound: RateLimit | None = None


class TokenPool:
    """Manages a single token on one chain."""

    def __init__(self, sim: Simulation, ledger: TokenLedger, kind: str, owner: Address,
                 window: int = DEFAULT_WINDOW):
        if kind not in (BURN_MINT, LOCK_RELEASE):
            raise ConfigError(f"unknown pool kind {kind!r}")
        self.sim = sim
        self.ledger = ledger
        self.kind = kind
        self.owner = owner
        self.window = window
        self.rate_limit_admin: Address | None = None
        self.remote: dict[ChainId, RemoteChain] = {}
        self.allowlist_enabled = False
        self.allowlist: set[Address] = set()
        self.paused = False
        self.locked = 0
        self.address = Address.named(ledger.chain, f"pool:{ledger.token_id}")
        sim.register_contract(self.address, self)
        if kind == BURN_MINT:
            ledger.authorize(self.address)
        elif ledger.family is not None:
            sim.add_custodian(ledger.family, ledger, self.address)

    @property
    def chain(self) -> ChainId:
        return self.ledger.chain

    def _only_owner(self, caller: Address) -> None:
        if caller != self.owner:
            raise Unauthorized(f"unauthorized: {caller} is not the pool owner")

    # -- administration ------------------------------------------------------
    def apply_chain_updates(self, caller: Address, chain: ChainId, remote_pool: Address,
                            remote_token: str, outbound_limit: int | None = None,
                            inbound_limit: int | None = None) -> None:
        self._only_owner(caller)
        if chain == self.chain or remote_pool.chain != chain:
            raise ConfigError("remote pool must live on the remote chain")
        if chain in self.remote:
            raise ConfigError(f"{chain.label} already supported")
        self.remote[chain] = RemoteChain({remote_pool}, remote_token)
        self.sim.log("cct", "chain_update", pool=str(self.address), chain=chain.label,
                     remote_pool=str(remote_pool), remote_token=remote_token)
        if outbound_limit is not None or inbound_limit is not None:
            self._set_limits(chain, outbound_limit, inbound_limit)

    def remove_chain(self, caller: Address, chain: ChainId) -> None:
        self._only_owner(caller)
        if self.remote.pop(chain, None) is None:
            raise ConfigError(f"{chain.label} is not supported")
        self.sim.log("cct", "chain_remove", pool=str(self.address), chain=chain.label)

    def is_supported_chain(self, chain: ChainId) -> bool:
        return chain in self.remote

    def add_remote_pool(self, caller: Address, chain: ChainId, pool: Address) -> None:
        self._only_owner(caller)
        self._remote(chain).pools.add(pool)
        self.sim.log("cct", "remote_pool_add", pool=str(self.address), remote=str(pool))

    def remove_remote_pool(self, caller: Address, chain: ChainId, pool: Address) -> None:
        self._only_owner(caller)
        self._remote(chain).pools.discard(pool)
        self.sim.log("cct", "remote_pool_remove", pool=str(self.address), remote=str(pool))

    def is_remote_pool(self, chain: ChainId, pool_value: bytes) -> bool:
        rc = self.remote.get(chain)
        return rc is not None and Address(chain, pool_value) in rc.pools

    def _remote(self, chain: ChainId) -> RemoteChain:
        rc = self.remote.get(chain)
        if rc is None:
            raise ConfigError(f"chain {chain.label} is not supported by {self.address}")
        return rc

    def set_rate_limit_admin(self, caller: Address, admin: Address | None) -> None:
        self._only_owner(caller)
        self.rate_limit_admin = admin
        self.sim.log("cct", "rate_limit_admin", pool=str(self.address),
                     admin=str(admin) if admin else None)

    def set_chain_rate_limiter_config(self, caller: Address, chain: ChainId,
                                      outbound_limit: int | None, inbound_limit: int | None) -> None:
        if caller != self.owner and caller != self.rate_limit_admin:
            raise Unauthorized(f"unauthorized: {caller} may not set rate limits")
        self._set_limits(chain, outbound_limit, inbound_limit)

    def _set_limits(self, chain: ChainId, outbound: int | None, inbound: int | None) -> None:
        rc = self._remote(chain)
        base = f"cct:{self.ledger.key}"
        if outbound is not None:
            if rc.outbound is None:
                rc.outbound = RateLimit(self.sim, f"{base}:out:{chain.label}", outbound, self.window)
            else:
                rc.outbound.set_limit(outbound)
        if inbound is not None:
            if rc.inbound is None:
                rc.inbound = RateLimit(self.sim, f"{base}:in:{chain.label}", inbound, self.window)
            else:
                rc.inbound.set_limit(inbound)

    def apply_allowlist_updates(self, caller: Address, removes: Iterable[Address] = (),
                                adds: Iterable[Address] = (), enabled: bool | None = None) -> None:
        self._only_owner(caller)
        for a in removes:
            self.allowlist.discard(a)
        for a in adds:
            self.allowlist.add(a)
        if enabled is not None:
            self.allowlist_enabled = enabled
        self.sim.log("cct", "allowlist", pool=str(self.address), enabled=self.allowlist_enabled,
                     members=sorted(str(a) for a in self.allowlist))

    def pause(self, caller: Address) -> None:
        self._only_owner(caller)
        self.paused = True
        self.sim.log("cct", "pause", pool=str(self.address))

    def unpause(self, caller: Address) -> None:
        self._only_owner(caller)
        self.paused = False
        self.sim.log("cct", "unpause", pool=str(self.address))
        self.sim.messages.release_held(self.address)

    def provide_liquidity(self, caller: Address, amount: int) -> None:
        """Pre-fund a lock_release pool. Only allowed before genesis."""
        self._only_owner(caller)
        if self.kind != LOCK_RELEASE:
            raise ConfigError("only lock_release pools hold liquidity")
        if self.sim.genesis_done:
            raise ConfigError("pool liquidity must be provisioned before genesis")
        self.ledger.transfer(caller, self.address, amount)
        self.locked += amount

    # -- ramp entrypoints ------------------------------------------------------
    def _check_onramp(self, caller: Address) -> None:
        ramp = self.sim.contracts.get(caller)
        if not isinstance(ramp, OnRamp) or ramp.chain != self.chain:
            raise Unauthorized(f"unauthorized: lockOrBurn caller {caller} is not an OnRamp")

    def _check_offramp(self, caller: Address) -> None:
        ramp = self.sim.contracts.get(caller)
        if not isinstance(ramp, OffRamp) or ramp.chain != self.chain:
            raise Unauthorized(f"unauthorized: releaseOrMint caller {caller} is not an OffRamp")

    def check_outbound(self, sender: Address, dst: ChainId, amount: int) -> None:
        if self.paused:
            raise Paused(f"{self.address} is paused")
        rc = self.remote.get(dst)
        if rc is None:
            raise UnknownPeer(f"{self.address} does not support {dst.label}")
        if self.allowlist_enabled and sender not in self.allowlist:
            raise Unauthorized(f"unauthorized: {sender} is not on the pool allowlist")
        if rc.outbound is not None and not rc.outbound.can_consume(amount):
            raise RateLimited(f"rate limited: {rc.outbound.name} capacity "
                              f"{rc.outbound.capacity} < {amount}")

    def lock_or_burn(self, caller: Address, sender: Address, dst: ChainId, amount: int) -> None:
        """Tokens have already been moved into the pool by the OnRamp."""
        self._check_onramp(caller)
        self.check_outbound(sender, dst, amount)
        rc = self.remote[dst]
        if rc.outbound is not None:
            rc.outbound.consume(amount)
        if self.kind == BURN_MINT:
            self.ledger.burn(self.address, self.address, amount)
        else:
            self.locked += amount
        self.sim.log("cct", "lock_or_burn", pool=str(self.address), dst=dst.label, amount=amount)

    def release_or_mint(self, caller: Address, src: ChainId, recipient: Address, amount: int) -> None:
        self._check_offramp(caller)
        if self.paused:
            raise Hold(self.address)
        rc = self._remote(src)
        if rc.inbound is not None:
            rc.inbound.consume(amount)
        if self.kind == BURN_MINT:
            self.ledger.mint(self.address, recipient, amount)
        else:
            if amount > self.locked:
                raise InvariantViolation(f"pool release {amount} exceeds locked {self.locked}")
            self.ledger.transfer(self.address, recipient, amount)
            self.locked -= amount
        self.sim.log("cct", "release_or_mint", pool=str(self.address), src=src.label, amount=amount)


class OnRamp:
    def __init__(self, sim: Simulation, router: Router, lane: Lane):
        self.sim = sim
        self.router = router
        self.lane = lane
        self.address = Address.named(lane.src, f"onramp:{lane.dst.label}")
        sim.register_contract(self.address, self)

    @property
    def chain(self) -> ChainId:
        return self.lane.src


class OffRamp:
    def __init__(self, sim: Simulation, router: Router, lane: Lane):
        self.sim = sim
        self.router = router
        self.lane = lane
        self.address = Address.named(lane.dst, f"offramp:{lane.src.label}")
        sim.register_contract(self.address, self)

    @property
    def chain(self) -> ChainId:
        return self.lane.dst

    def on_message(self, msg: CrossChainMessage) -> None:
        self.execute(msg)

    def execute(self, msg: CrossChainMessage) -> None:
        expected = Address.named(self.lane.src, f"onramp:{self.lane.dst.label}")
        if msg.src != self.lane.src or msg.emitter != expected:
            raise DeliveryRejected(f"{msg.emitter} is not the OnRamp of lane "
                                   f"{self.lane.src.label}->{self.lane.dst.label}")
        body = CctPayload.decode(msg.payload)
        pool = self.router.registry.pool(body.token_id)
        if pool is None:
            raise DeliveryRejected(f"{body.token_id} has no registered pool on {self.chain.label}")
        if not pool.is_remote_pool(msg.src, body.src_pool):
            raise DeliveryRejected("source pool is not a registered remote pool")
        recipient = Address(self.chain, body.recipient)
        try:
            pool.release_or_mint(self.address, msg.src, recipient, body.amount)
        except (Hold, InvariantViolation):
            raise
        except SimulationError as exc:
            raise DeliveryRejected(f"releaseOrMint reverted: {exc}") from exc
        self.sim.book.credit(msg.msg_id, pool.ledger.family, body.amount, pool.ledger.decimals)


class Router:
    """Generic entry point for every cross-chain request on one chain."""

    def __init__(self, sim: Simulation, chain: ChainId, registry: TokenAdminRegistry,
                 channel: str = CCIP_CHANNEL):
        self.sim = sim
        self.chain = chain
        self.registry = registry
        self.channel = channel
        self.onramps: dict[ChainId, OnRamp] = {}
        self.offramps: dict[ChainId, OffRamp] = {}
        self.address = Address.named(chain, "ccip:router")
        sim.register_contract(self.address, self)

    def get_fee(self, dst: ChainId, token_id: str, amount: int, pay_in_link: bool = False) -> Fraction:
        onramp = self.onramps.get(dst)
        if onramp is None:
            raise UnknownPeer(f"no lane {self.chain.label}->{dst.label}")
        pool = self.registry.pool(token_id)
        if pool is None:
            raise ConfigError(f"{token_id} is not registered on {self.chain.label}")
        mode = self.mode_for(pool, dst)
        return compute_fee(onramp.lane.fee_config, mode, amount, pay_in_link, onramp.lane.ethereum)

    def mode_for(self, pool: TokenPool, dst: ChainId) -> str:
        rc = pool.remote.get(dst)
        remote = None
        if rc is not None:
            for addr in sorted(rc.pools, key=lambda a: a.value):
                remote = self.sim.contracts.get(addr)
                if remote is not None:
                    break
        dst_kind = remote.kind if isinstance(remote, TokenPool) else BURN_MINT
        return transfer_mode(pool.kind, dst_kind)

    def ccip_send(self, sender: Address, dst: ChainId, recipient: Address, token_id: str,
                  amount: int, pay_in_link: bool = False) -> tuple[CrossChainMessage, Fraction]:
        pool = self.registry.pool(token_id)
        family = pool.ledger.family if pool is not None else None
        with self.sim.book.request(STANDARD, family, self.chain, dst, sender, recipient, amount,
                                   pay_in_link=pay_in_link) as tid:
            check_amount(amount)
            onramp = self.onramps.get(dst)
            if onramp is None:
                raise UnknownPeer(f"no lane {self.chain.label}->{dst.label}")
            if pool is None:
                raise ConfigError(f"{token_id} is not registered on {self.chain.label}")
            if recipient.chain != dst:
                raise ConfigError(f"recipient {recipient} is not on {dst.label}")
            pool.check_outbound(sender, dst, amount)
            if pool.ledger.balance_of(sender) < amount:
                raise InsufficientBalance(f"{sender} holds {pool.ledger.balance_of(sender)} < {amount}")
            mode = self.mode_for(pool, dst)
            fee = compute_fee(onramp.lane.fee_config, mode, amount, pay_in_link, onramp.lane.ethereum)
            pool.ledger.transfer(sender, pool.address, amount)
            pool.lock_or_burn(onramp.address, sender, dst, amount)
            payload = CctPayload(token_id, amount, recipient.value, pool.address.value, mode).encode()
            receiver = Address.named(dst, f"offramp:{self.chain.label}")
            msg = self.sim.messages.emit_message(self.channel, onramp.address, dst, receiver, payload)
            self.sim.book.debit(msg.msg_id, family, amount, pool.ledger.decimals, tid)
            self.sim.book.fee(tid, STANDARD, "protocol", fee, "LINK" if pay_in_link else "native")
        return msg, fee


@dataclass
class CcipNetwork:
    """Routers, registries and lanes of one simulation."""

    sim: Simulation
    fee_config: CctFeeConfig = field(default_factory=CctFeeConfig)
    channel: str = CCIP_CHANNEL
    routers: dict[ChainId, Router] = field(default_factory=dict)
    lanes: dict[tuple[ChainId, ChainId], Lane] = field(default_factory=dict)

    def __post_init__(self):
        if self.channel not in self.sim.messages.channels:
            committee = frozenset(f"don:default:{i}" for i in range(DEFAULT_COMMITTEE))
            self.sim.messages.add_channel(self.channel, DonLane(committee, DEFAULT_DON_THRESHOLD))

    def router(self, chain: ChainId) -> Router:
        r = self.routers.get(chain)
        if r is None:
            r = Router(self.sim, chain, TokenAdminRegistry(self.sim, chain), self.channel)
            self.routers[chain] = r
        return r

    def open_lane(self, src: ChainId, dst: ChainId, committee_size: int = DEFAULT_COMMITTEE,
                  threshold: int = DEFAULT_DON_THRESHOLD,
                  fee_config: CctFeeConfig | None = None) -> Lane:
        if (src, dst) in self.lanes:
            raise ConfigError(f"lane {src.label}->{dst.label} already open")
        committee = frozenset(f"don:{src.label}-{dst.label}:{i}" for i in range(committee_size))
        don = DonLane(committee, threshold)
        meta = self.sim.chain_meta
        eth = bool(meta.get(src.label, {}).get("is_ethereum") or meta.get(dst.label, {}).get("is_ethereum"))
        lane = Lane(src, dst, don, fee_config or self.fee_config, eth)
        self.sim.messages.set_route_model(self.channel, src, dst, don)
        src_router, dst_router = self.router(src), self.router(dst)
        src_router.onramps[dst] = OnRamp(self.sim, src_router, lane)
        dst_router.offramps[src] = OffRamp(self.sim, dst_router, lane)
        self.lanes[(src, dst)] = lane
        return lane
