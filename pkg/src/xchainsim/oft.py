"""Omnichain Fungible Token: the token is its own messaging endpoint.

Amounts cross the wire in shared decimals. ``send`` strips the dust that
cannot be represented there, leaves it with the sender, and debits only the
clean amount: burned by an OFT, locked by an OFTAdapter on the native chain.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Callable

from .chain import Address, ChainId, TokenLedger, check_amount
from .errors import (AmountOverflow, ConfigError, DeliveryRejected, InsufficientBalance,
                     InvariantViolation, Paused, SlippageExceeded, Unauthorized, UnknownPeer)
from .messaging import CrossChainMessage, DvnSet
from .payloads import U64_MAX, OftPayload
from .ratelimit import DEFAULT_WINDOW, RateLimit

if TYPE_CHECKING:
    from .sim import Simulation

STANDARD = "oft"
DEFAULT_SHARED_DECIMALS = 6


def remove_dust(amount_local: int, local_decimals: int, shared_decimals: int) -> tuple[int, int, int]:
    """Split a local amount into (amount_shared, amount_local_clean, dust)."""
    if shared_decimals > local_decimals:
        raise ConfigError("shared decimals exceed local decimals")
    rate = 10 ** (local_decimals - shared_decimals)
    shared = amount_local // rate
    clean = shared * rate
    return shared, clean, amount_local - clean


@dataclass
class OftFeeConfig:
    """Endpoint messaging price: a base fee plus a per-payload-byte fee."""

    base_fee: int = 1
    per_byte: int = 1
    dst_gas: int = 0
    fee_switch: bool = False
    protocol_fee: int = 0


@dataclass
class SendParams:
    dst: ChainId
    recipient: Address
    amount_local: int
    min_amount_local: int = 0
    extra: bytes = b""


@dataclass
class FeeQuote:
    messaging: int
    relayer: int
    protocol: int
    components: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.components = {"messaging": self.messaging, "relayer_gas": self.relayer,
                           "protocol": self.protocol}

    @property
    def total(self) -> int:
        return self.messaging + self.relayer + self.protocol


class OftCore:
    """Shared send/receive logic; subclasses decide how to debit and credit."""

    kind = "oft"

    def __init__(self, sim: Simulation, ledger: TokenLedger, owner: Address, channel: str,
                 shared_decimals: int = DEFAULT_SHARED_DECIMALS,
                 fees: OftFeeConfig | None = None):
        if shared_decimals > ledger.decimals:
            raise ConfigError("shared decimals exceed local decimals")
        self.sim = sim
        self.ledger = ledger
        self.owner = owner
        self.channel = channel
        self.shared_decimals = shared_decimals
        self.fees = fees or OftFeeConfig()
        self.peers: dict[ChainId, Address] = {}
        self.paused = False
        self.msg_inspector: Callable[[OftPayload], bool] | None = None
        self.rate_limits: dict[ChainId, RateLimit] = {}
        self.address = Address.named(ledger.chain, f"{self.kind}:{ledger.token_id}")
        sim.register_contract(self.address, self)

    @property
    def chain(self) -> ChainId:
        return self.ledger.chain

    @property
    def local_decimals(self) -> int:
        return self.ledger.decimals

    @property
    def family(self) -> str:
        return self.ledger.family

    def _only_owner(self, caller: Address) -> None:
        if caller != self.owner:
            raise Unauthorized(f"unauthorized: {caller} is not the OFT owner")

    # -- owner configuration -----------------------------------------------
    def set_peer(self, caller: Address, chain: ChainId, peer: Address) -> None:
        self._only_owner(caller)
        if peer.chain != chain:
            raise ConfigError(f"peer {peer} is not on {chain.label}")
        remote = self.sim.contracts.get(peer)
        if remote is not None and getattr(remote, "local_decimals", None) is not None:
            if self.shared_decimals > remote.local_decimals:
                raise ConfigError("shared decimals exceed the peer's local decimals")
        self.peers[chain] = peer
        self.sim.log("oft", "set_peer", oft=str(self.address), chain=chain.label, peer=str(peer))

    def is_peer(self, chain: ChainId, peer: Address) -> bool:
        return self.peers.get(chain) == peer

    def set_dvn_config(self, caller: Address, model: DvnSet) -> None:
        """Issuer chooses its own DVNs: quorum participants are token-configurable."""
        self._only_owner(caller)
        if not isinstance(model, DvnSet):
            raise ConfigError("OFT verification is a DVN set")
        self.sim.messages.configure_model(self.channel, model)

    def set_msg_inspector(self, caller: Address, inspector: Callable[[OftPayload], bool] | None) -> None:
        self._only_owner(caller)
        self.msg_inspector = inspector

    def set_rate_limit(self, caller: Address, dst: ChainId, limit: int,
                       window: int = DEFAULT_WINDOW) -> None:
        self._only_owner(caller)
        rl = self.rate_limits.get(dst)
        if rl is None or rl.window != window:
            self.rate_limits[dst] = RateLimit(self.sim, f"oft:{self.ledger.key}:out:{dst.label}",
                                              limit, window)
        else:
            rl.set_limit(limit)

    def pause(self, caller: Address) -> None:
        self._only_owner(caller)
        self.paused = True
        self.sim.log("oft", "pause", oft=str(self.address))

    def unpause(self, caller: Address) -> None:
        self._only_owner(caller)
        self.paused = False
        self.sim.log("oft", "unpause", oft=str(self.address))

    # -- quoting -----------------------------------------------------------
    def quote_send(self, params: SendParams) -> FeeQuote:
        if params.dst not in self.peers:
            raise UnknownPeer(f"no peer registered for {params.dst.label}")
        size = OftPayload.HEADER + len(params.extra)
        cfg = self.fees
        return FeeQuote(messaging=cfg.base_fee + cfg.per_byte * size, relayer=cfg.dst_gas,
                        protocol=cfg.protocol_fee if cfg.fee_switch else 0)

    def quote_oft(self, params: SendParams) -> tuple[int, int]:
        """(amount debited, amount the recipient will receive) in local units."""
        _, clean, _ = remove_dust(params.amount_local, self.local_decimals, self.shared_decimals)
        return clean, clean

    # -- transfer flow -----------------------------------------------------
    def _debit(self, sender: Address, amount: int) -> None:
        raise NotImplementedError

    def _credit(self, recipient: Address, amount: int) -> None:
        raise NotImplementedError

    def send(self, sender: Address, params: SendParams) -> CrossChainMessage:
        with self.sim.book.request(STANDARD, self.family, self.chain, params.dst, sender,
                                   params.recipient, params.amount_local) as tid:
            check_amount(params.amount_local)
            if self.paused:
                raise Paused(f"{self.address} is paused")
            peer = self.peers.get(params.dst)
            if peer is None:
                raise UnknownPeer(f"no peer registered for {params.dst.label}")
            if params.recipient.chain != params.dst:
                raise ConfigError(f"recipient {params.recipient} is not on {params.dst.label}")
            shared, clean, _dust = remove_dust(params.amount_local, self.local_decimals,
                                               self.shared_decimals)
            if clean < params.min_amount_local:
                raise SlippageExceeded(f"slippage: {clean} < minimum {params.min_amount_local}")
            if shared > U64_MAX:
                raise AmountOverflow("amount does not fit the shared-decimal u64 field")
            if self.ledger.balance_of(sender) < clean:
                raise InsufficientBalance(f"{sender} holds {self.ledger.balance_of(sender)} < {clean}")
            quote = self.quote_send(params)
            rl = self.rate_limits.get(params.dst)
            if rl is not None:
                rl.consume(clean)
            self._debit(sender, clean)
            nonce = self.sim.messages.next_nonce(self.address)
            payload = OftPayload(params.recipient.value, shared, nonce, params.extra).encode()
            msg = self.sim.messages.emit_message(self.channel, self.address, params.dst, peer, payload)
            self.sim.book.debit(msg.msg_id, self.family, shared, self.shared_decimals, tid)
            for component, value in quote.components.items():
                self.sim.book.fee(tid, STANDARD, component, Fraction(value), "native")
        return msg

    def on_message(self, msg: CrossChainMessage) -> None:
        self.lz_receive(msg)

    def lz_receive(self, msg: CrossChainMessage) -> None:
        if self.paused:
            raise DeliveryRejected(f"{self.address} is paused")
        if not self.is_peer(msg.src, msg.emitter):
            raise DeliveryRejected(f"peer mismatch: {msg.emitter} is not the peer on {msg.src.label}")
        body = OftPayload.decode(msg.payload)
        if self.msg_inspector is not None and not self.msg_inspector(body):
            raise DeliveryRejected("message inspector refused payload")
        amount = body.amount_shared * 10 ** (self.local_decimals - self.shared_decimals)
        self._credit(Address(self.chain, body.recipient), amount)
        self.sim.book.credit(msg.msg_id, self.family, amount, self.local_decimals)


class OftToken(OftCore):
    """Burns on debit, mints on credit."""

    kind = "oft"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.ledger.authorize(self.address)

    def _debit(self, sender: Address, amount: int) -> None:
        self.ledger.burn(self.address, sender, amount)

    def _credit(self, recipient: Address, amount: int) -> None:
        self.ledger.mint(self.address, recipient, amount)


class OftAdapter(OftCore):
    """Wraps an existing token on its native chain: locks on debit, releases on credit."""

    kind = "oftadapter"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        fam = self.sim.families.get(self.family)
        if fam is not None:
            if any(isinstance(self.sim.contracts.get(a), OftAdapter) for _, a in fam.custodians):
                raise ConfigError(f"{self.family} already has an adapter on another chain")
            self.sim.add_custodian(self.family, self.ledger, self.address)
        self.locked = 0

    def _debit(self, sender: Address, amount: int) -> None:
        self.ledger.transfer(sender, self.address, amount)
        self.locked += amount

    def _credit(self, recipient: Address, amount: int) -> None:
        if amount > self.locked:
            raise InvariantViolation(f"adapter release {amount} exceeds locked {self.locked}")
        self.ledger.transfer(self.address, recipient, amount)
        self.locked -= amount
