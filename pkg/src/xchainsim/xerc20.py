"""xERC20 (ERC-7281): issuer-whitelisted bridges with per-bridge mint/burn limits.

Exceeding a bridge's current limit reverts. Legacy tokens migrate through a
lockbox on their native chain, which locks them 1:1 against fresh xERC20.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from .chain import Address, ChainId, TokenLedger, check_amount
from .errors import (ConfigError, DeliveryRejected, InsufficientBalance, Paused,
                     SimulationError, Unauthorized, UnknownPeer)
from .messaging import CrossChainMessage
from .payloads import XErc20Payload
from .ratelimit import DEFAULT_WINDOW, RateLimit

if TYPE_CHECKING:
    from .sim import Simulation

STANDARD = "xerc20"
CONNEXT_FAST_PATH_FEE = Fraction(5, 10_000)


@dataclass
class BridgeLimits:
    mint: RateLimit
    burn: RateLimit


class XErc20Token:
    def __init__(self, sim: Simulation, ledger: TokenLedger, issuer: Address,
                 window: int = DEFAULT_WINDOW):
        if issuer.chain != ledger.chain:
            raise ConfigError("issuer must live on the token's chain")
        self.sim = sim
        self.ledger = ledger
        self.issuer = issuer
        self.window = window
        self.address = Address.named(ledger.chain, f"xerc20:{ledger.token_id}")
        self.bridge_limits: dict[Address, BridgeLimits] = {}
        self.lockbox: Lockbox | None = None
        self.paused = False
        sim.register_contract(self.address, self)
        ledger.authorize(self.address)

    @property
    def chain(self) -> ChainId:
        return self.ledger.chain

    def _only_issuer(self, caller: Address) -> None:
        if caller != self.issuer:
            raise Unauthorized(f"unauthorized: {caller} is not the issuer")

    def set_limits(self, caller: Address, bridge: Address, mint_limit: int, burn_limit: int) -> None:
        self._only_issuer(caller)
        check_amount(mint_limit)
        check_amount(burn_limit)
        limits = self.bridge_limits.get(bridge)
        if limits is None:
            base = f"xerc20:{self.ledger.key}:{bridge.name}"
            self.bridge_limits[bridge] = BridgeLimits(
                RateLimit(self.sim, base + ":mint", mint_limit, self.window),
                RateLimit(self.sim, base + ":burn", burn_limit, self.window))
        else:
            limits.mint.set_limit(mint_limit)
            limits.burn.set_limit(burn_limit)
        self.sim.log("xerc20", "set_limits", token=self.ledger.key, bridge=str(bridge),
                     mint_limit=mint_limit, burn_limit=burn_limit)

    def set_lockbox(self, caller: Address, lockbox: Lockbox) -> None:
        self._only_issuer(caller)
        self.lockbox = lockbox
        self.sim.log("xerc20", "lockbox_set", token=self.ledger.key, lockbox=str(lockbox.address))

    def pause(self, caller: Address) -> None:
        self._only_issuer(caller)
        self.paused = True
        self.sim.log("xerc20", "pause", token=self.ledger.key)

    def unpause(self, caller: Address) -> None:
        self._only_issuer(caller)
        self.paused = False
        self.sim.log("xerc20", "unpause", token=self.ledger.key)

    def _is_lockbox(self, caller: Address) -> bool:
        return self.lockbox is not None and caller == self.lockbox.address

    def mint(self, caller: Address, to: Address, amount: int, msg_id: str | None = None) -> None:
        """Bridge (or lockbox) mint. Bridge mints consume the bridge's mint limit."""
        check_amount(amount)
        if to.chain != self.chain:
            raise ConfigError(f"{to} is not on {self.chain.label}")
        if self._is_lockbox(caller):
            self.ledger.mint(self.address, to, amount)
            return
        limits = self.bridge_limits.get(caller)
        if limits is None:
            raise Unauthorized(f"unauthorized: {caller} is not a whitelisted bridge")
        limits.mint.consume(amount)
        self.ledger.mint(self.address, to, amount)
        if msg_id is None and amount:
            self.sim.book.unbacked(self.ledger.family, amount, self.ledger.decimals, caller)

    def burn(self, caller: Address, frm: Address, amount: int) -> None:
        check_amount(amount)
        if self._is_lockbox(caller):
            self.ledger.burn(self.address, frm, amount)
            return
        limits = self.bridge_limits.get(caller)
        if limits is None:
            raise Unauthorized(f"unauthorized: {caller} is not a whitelisted bridge")
        if self.ledger.balance_of(frm) < amount:
            raise InsufficientBalance(f"{frm} holds {self.ledger.balance_of(frm)} < {amount}")
        limits.burn.consume(amount)
        self.ledger.burn(self.address, frm, amount)

    def query_limits(self, bridge: Address) -> tuple[int, int, int, int]:
        limits = self.bridge_limits.get(bridge)
        if limits is None:
            return (0, 0, 0, 0)
        return (limits.mint.limit, limits.mint.capacity, limits.burn.limit, limits.burn.capacity)

    def minting_max_limit_of(self, bridge: Address) -> int:
        return self.query_limits(bridge)[0]

    def minting_current_limit_of(self, bridge: Address) -> int:
        return self.query_limits(bridge)[1]

    def burning_max_limit_of(self, bridge: Address) -> int:
        return self.query_limits(bridge)[2]

    def burning_current_limit_of(self, bridge: Address) -> int:
        return self.query_limits(bridge)[3]


class Lockbox:
    """Locks a legacy token on its native chain against freshly minted xERC20."""

    def __init__(self, sim: Simulation, legacy: TokenLedger, xerc20: XErc20Token):
        if legacy.chain != xerc20.chain:
            raise ConfigError("lockbox must sit on the legacy token's native chain")
        self.sim = sim
        self.legacy = legacy
        self.xerc20 = xerc20
        self.locked = 0
        self.address = Address.named(legacy.chain, f"lockbox:{xerc20.ledger.token_id}")
        sim.register_contract(self.address, self)
        if legacy.family is not None:
            sim.add_custodian(legacy.family, legacy, self.address)
        xerc20.set_lockbox(xerc20.issuer, self)

    def deposit(self, user: Address, amount: int) -> None:
        check_amount(amount)
        if self.legacy.balance_of(user) < amount:
            raise InsufficientBalance(f"{user} holds {self.legacy.balance_of(user)} legacy < {amount}")
        self.legacy.transfer(user, self.address, amount)
        self.locked += amount
        self.xerc20.mint(self.address, user, amount)
        self.sim.log("xerc20", "deposit", lockbox=str(self.address), user=str(user), amount=amount)

    def withdraw(self, user: Address, amount: int) -> None:
        check_amount(amount)
        if self.xerc20.ledger.balance_of(user) < amount:
            raise InsufficientBalance(f"{user} holds too little xERC20")
        if self.locked < amount:
            raise InsufficientBalance(f"lockbox holds {self.locked} < {amount}")
        self.xerc20.burn(self.address, user, amount)
        self.legacy.transfer(self.address, user, amount)
        self.locked -= amount
        self.sim.log("xerc20", "withdraw", lockbox=str(self.address), user=str(user), amount=amount)


class XErc20Bridge:
    """A whitelisted bridge endpoint on one chain.

    The bridge is transport-agnostic: it may run over any message-layer
    channel. Peers are the same-named bridge on other chains.
    """

    def __init__(self, sim: Simulation, name: str, chain: ChainId, channel: str,
                 fee_rate: Fraction = Fraction(0)):
        self.sim = sim
        self.name = name
        self.chain = chain
        self.channel = channel
        self.fee_rate = Fraction(fee_rate)
        self.address = Address.named(chain, f"xbridge:{name}")
        self.tokens: dict[str, XErc20Token] = {}
        sim.register_contract(self.address, self)

    def attach(self, token: XErc20Token) -> None:
        if token.chain != self.chain:
            raise ConfigError("token and bridge must share a chain")
        self.tokens[token.ledger.token_id] = token

    def peer(self, chain: ChainId) -> Address:
        return Address.named(chain, f"xbridge:{self.name}")

    def quote_fee(self, amount: int) -> Fraction:
        return amount * self.fee_rate

    def send(self, sender: Address, token_id: str, dst: ChainId, recipient: Address,
             amount: int) -> CrossChainMessage:
        token = self.tokens.get(token_id)
        if token is None:
            raise ConfigError(f"bridge {self.name} does not serve {token_id}")
        family = token.ledger.family
        with self.sim.book.request(STANDARD, family, self.chain, dst, sender, recipient, amount,
                                   bridge=self.name) as tid:
            check_amount(amount)
            peer = self.peer(dst)
            if self.sim.contracts.get(peer) is None:
                raise UnknownPeer(f"bridge {self.name} has no endpoint on {dst.label}")
            if recipient.chain != dst:
                raise ConfigError(f"recipient {recipient} is not on {dst.label}")
            if token.paused:
                raise Paused(f"{token.ledger.key} is paused")
            token.burn(self.address, sender, amount)
            nonce = self.sim.messages.next_nonce(self.address)
            payload = XErc20Payload(token_id, recipient.value, amount, nonce).encode()
            msg = self.sim.messages.emit_message(self.channel, self.address, dst, peer, payload)
            self.sim.book.debit(msg.msg_id, family, amount, token.ledger.decimals, tid)
            self.sim.book.fee(tid, STANDARD, "liquidity", self.quote_fee(amount), "token")
        return msg

    def on_message(self, msg: CrossChainMessage) -> None:
        if msg.emitter != self.peer(msg.src):
            raise DeliveryRejected(f"emitter {msg.emitter} is not bridge {self.name}")
        body = XErc20Payload.decode(msg.payload)
        token = self.tokens.get(body.token_id)
        if token is None:
            raise DeliveryRejected(f"bridge {self.name} does not serve {body.token_id} here")
        if token.paused:
            raise DeliveryRejected(f"{token.ledger.key} is paused")
        recipient = Address(self.chain, body.recipient)
        try:
            token.mint(self.address, recipient, body.amount, msg_id=msg.msg_id)
        except SimulationError as exc:
            raise DeliveryRejected(f"mint reverted: {exc}") from exc
        self.sim.book.credit(msg.msg_id, token.ledger.family, body.amount, token.ledger.decimals)
