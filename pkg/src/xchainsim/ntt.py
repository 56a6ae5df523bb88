"""Native Token Transfers: one manager per (chain, token).

Two gates guard execution on the destination: the guardian quorum of the
message layer, and a threshold of registered transceivers re-attesting the
delivered message. Transfers beyond a rate limit are queued rather than
reverted; queued entries mature one full window after they were queued.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .chain import Address, ChainId, TokenLedger, check_amount
from .errors import (BelowThreshold, ConfigError, DeliveryRejected, InsufficientBalance,
                     InvariantViolation, Paused, StillQueued, Unauthorized,
                     UnknownPeer, UnknownSequence)
from .messaging import CrossChainMessage, Status
from .payloads import NttPayload
from .ratelimit import DEFAULT_WINDOW, RateLimit

if TYPE_CHECKING:
    from .sim import Simulation

STANDARD = "ntt"
WORMHOLE_CHANNEL = "wormhole"
DEFAULT_GUARDIANS = 19
DEFAULT_GUARDIAN_THRESHOLD = 13


class Mode(str, Enum):
    BURN_MINT = "BurnMint"
    HUB_SPOKE_LOCK = "HubSpokeLock"


@dataclass
class QueuedTransfer:
    key: int | str
    amount: int
    sender: Address | None
    recipient: Address
    peer_chain: ChainId
    queued_tick: int
    tid: str | None = None
    msg_id: str | None = None


def payload_digest(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


class Transceiver:
    def __init__(self, address: Address, auto: bool = True):
        self.address = address
        self.auto = auto


class NttManager:
    def __init__(self, sim: Simulation, ledger: TokenLedger, mode: Mode, owner: Address, *,
                 is_hub: bool = False, window: int = DEFAULT_WINDOW,
                 channel: str = WORMHOLE_CHANNEL):
        mode = Mode(mode)
        if is_hub and mode is not Mode.HUB_SPOKE_LOCK:
            raise ConfigError("only hub-and-spoke deployments have a hub")
        for other in sim.contracts.values():
            if isinstance(other, NttManager) and other.ledger is ledger:
                raise ConfigError(f"{ledger.key} already has an NTT manager")
        self.sim = sim
        self.ledger = ledger
        self.mode = mode
        self.owner = owner
        self.is_hub = is_hub
        self.window = window
        self.channel = channel
        self.address = Address.named(ledger.chain, f"ntt:{ledger.token_id}")
        self.escrow = Address.named(ledger.chain, f"ntt-escrow:{ledger.token_id}")
        self.peers: dict[ChainId, Address] = {}
        self.transceivers: dict[Address, Transceiver] = {}
        self.threshold = 0
        self.outbound_limit: RateLimit | None = None
        self.inbound_limits: dict[ChainId, RateLimit] = {}
        self.outbound_queue: dict[int, QueuedTransfer] = {}
        self.inbound_queue: dict[str, QueuedTransfer] = {}
        self.sequence = 0
        self.paused = False
        self.hub_locked = 0
        self.auto_execute = True
        self._vaas: dict[str, CrossChainMessage] = {}
        self._attestations: dict[str, set[Address]] = {}
        self._executed: set[str] = set()
        sim.register_contract(self.address, self)
        if is_hub:
            sim.add_custodian(ledger.family, ledger, self.address)
        else:
            ledger.authorize(self.address)
        sim.add_escrow(ledger.family, ledger, self.escrow)

    @property
    def chain(self) -> ChainId:
        return self.ledger.chain

    @property
    def family(self) -> str:
        return self.ledger.family

    def _only_owner(self, caller: Address) -> None:
        if caller != self.owner:
            raise Unauthorized(f"unauthorized: {caller} is not the manager owner")

    # -- configuration -----------------------------------------------------
    def set_peer(self, caller: Address, chain: ChainId, peer: Address) -> None:
        self._only_owner(caller)
        if chain == self.chain or peer.chain != chain:
            raise ConfigError("peer must be a manager on another chain")
        self.peers[chain] = peer
        self.sim.log("ntt", "set_peer", manager=str(self.address), chain=chain.label, peer=str(peer))

    def get_peer(self, chain: ChainId) -> Address | None:
        return self.peers.get(chain)

    def set_transceiver(self, caller: Address, transceiver: Address, auto: bool = True) -> None:
        self._only_owner(caller)
        if transceiver.chain != self.chain:
            raise ConfigError("transceiver must live on the manager's chain")
        if transceiver in self.transceivers:
            raise ConfigError(f"transceiver {transceiver} already registered")
        self.transceivers[transceiver] = Transceiver(transceiver, auto)
        if self.threshold == 0:
            self.threshold = 1
        self.sim.log("ntt", "set_transceiver", manager=str(self.address), transceiver=str(transceiver))

    def remove_transceiver(self, caller: Address, transceiver: Address) -> None:
        self._only_owner(caller)
        if transceiver not in self.transceivers:
            raise ConfigError(f"transceiver {transceiver} not registered")
        if len(self.transceivers) - 1 < self.threshold:
            raise ConfigError("removing the transceiver would drop the count below the threshold")
        del self.transceivers[transceiver]
        self.sim.log("ntt", "remove_transceiver", manager=str(self.address),
                     transceiver=str(transceiver))

    def set_threshold(self, caller: Address, threshold: int) -> None:
        self._only_owner(caller)
        if not 1 <= threshold <= len(self.transceivers):
            raise ConfigError(f"threshold {threshold} exceeds {len(self.transceivers)} transceivers")
        self.threshold = threshold
        self.sim.log("ntt", "set_threshold", manager=str(self.address), threshold=threshold)

    def set_outbound_limit(self, caller: Address, limit: int) -> None:
        self._only_owner(caller)
        if self.outbound_limit is None:
            self.outbound_limit = RateLimit(self.sim, f"ntt:{self.ledger.key}:out", limit, self.window)
        else:
            self.outbound_limit.set_limit(limit)

    def set_inbound_limit(self, caller: Address, chain: ChainId, limit: int) -> None:
        self._only_owner(caller)
        rl = self.inbound_limits.get(chain)
        if rl is None:
            self.inbound_limits[chain] = RateLimit(
                self.sim, f"ntt:{self.ledger.key}:in:{chain.label}", limit, self.window)
        else:
            rl.set_limit(limit)

    def pause(self, caller: Address) -> None:
        self._only_owner(caller)
        self.paused = True
        self.sim.log("ntt", "pause", manager=str(self.address))

    def unpause(self, caller: Address) -> None:
        self._only_owner(caller)
        self.paused = False
        self.sim.log("ntt", "unpause", manager=str(self.address))

    def configure(self, caller: Address, action: str, *args) -> None:
        """Dispatch an owner action by name (set_peer, set_threshold, ...)."""
        allowed = {"set_peer", "set_transceiver", "remove_transceiver", "set_threshold",
                   "set_inbound_limit", "set_outbound_limit", "pause", "unpause"}
        if action not in allowed:
            raise ConfigError(f"unknown manager action {action!r}")
        getattr(self, action)(caller, *args)

    # -- outbound ----------------------------------------------------------
    def _lock_or_burn(self, holder: Address, amount: int) -> None:
        if self.is_hub:
            self.ledger.transfer(holder, self.address, amount)
            self.hub_locked += amount
        else:
            self.ledger.burn(self.address, holder, amount)

    def _emit(self, dst: ChainId, recipient: Address, amount: int, sequence: int,
              tid: str | None) -> CrossChainMessage:
        payload = NttPayload(self.ledger.token_id, amount, recipient.value, sequence).encode()
        msg = self.sim.messages.emit_message(self.channel, self.address, dst, self.peers[dst], payload)
        self.sim.book.debit(msg.msg_id, self.family, amount, self.ledger.decimals, tid)
        return msg

    def transfer(self, sender: Address, dst: ChainId, recipient: Address,
                 amount: int) -> CrossChainMessage | QueuedTransfer:
        with self.sim.book.request(STANDARD, self.family, self.chain, dst, sender, recipient,
                                   amount) as tid:
            check_amount(amount)
            if self.paused:
                raise Paused(f"{self.address} is paused")
            if dst not in self.peers:
                raise UnknownPeer(f"no peer manager on {dst.label}")
            if recipient.chain != dst:
                raise ConfigError(f"recipient {recipient} is not on {dst.label}")
            if self.ledger.balance_of(sender) < amount:
                raise InsufficientBalance(f"{sender} holds {self.ledger.balance_of(sender)} < {amount}")
            seq = self.sequence
            self.sequence += 1
            if self.outbound_limit is None or self.outbound_limit.can_consume(amount):
                if self.outbound_limit is not None:
                    self.outbound_limit.consume(amount)
                self._lock_or_burn(sender, amount)
                result = self._emit(dst, recipient, amount, seq, tid)
            else:
                self.ledger.transfer(sender, self.escrow, amount)
                result = QueuedTransfer(seq, amount, sender, recipient, dst, self.sim.tick, tid)
                self.outbound_queue[seq] = result
                self.sim.book.queued_out(tid, seq, amount)
        return result

    def complete_outbound_queued_transfer(self, caller: Address, sequence: int) -> CrossChainMessage:
        entry = self.outbound_queue.get(sequence)
        if entry is None:
            raise UnknownSequence(f"unknown sequence {sequence}")
        if self.paused:
            raise Paused(f"{self.address} is paused")
        if self.sim.tick < entry.queued_tick + self.window:
            raise StillQueued(f"still queued until tick {entry.queued_tick + self.window}")
        del self.outbound_queue[sequence]
        self._lock_or_burn(self.escrow, entry.amount)
        self.sim.log("ntt", "complete_outbound", manager=str(self.address), sequence=sequence,
                     caller=str(caller))
        return self._emit(entry.peer_chain, entry.recipient, entry.amount, sequence, entry.tid)

    def cancel_outbound_queued_transfer(self, caller: Address, sequence: int) -> int:
        entry = self.outbound_queue.get(sequence)
        if entry is None:
            raise UnknownSequence(f"unknown sequence {sequence}")
        if caller != entry.sender:
            raise Unauthorized(f"unauthorized: only {entry.sender} may cancel")
        if self.paused:
            raise Paused(f"{self.address} is paused")
        del self.outbound_queue[sequence]
        self.ledger.transfer(self.escrow, entry.sender, entry.amount)
        self.sim.book.cancelled(entry.tid, sequence)
        return entry.amount

    # -- inbound -----------------------------------------------------------
    def on_message(self, msg: CrossChainMessage) -> None:
        """Guardian-attested message arrives; transceivers then re-attest it."""
        if self.paused:
            raise DeliveryRejected(f"{self.address} is paused")
        if self.peers.get(msg.src) != msg.emitter:
            raise DeliveryRejected(f"{msg.emitter} is not the peer manager on {msg.src.label}")
        body = NttPayload.decode(msg.payload)
        if body.token_id != self.ledger.token_id:
            raise DeliveryRejected(f"token {body.token_id} does not match {self.ledger.token_id}")
        self._vaas[msg.msg_id] = msg
        self._attestations[msg.msg_id] = set()
        for addr in sorted(self.transceivers, key=lambda a: a.value):
            if self.transceivers[addr].auto:
                self.attestation_received(addr, msg)

    def attestation_received(self, transceiver: Address, msg: CrossChainMessage) -> None:
        if transceiver not in self.transceivers:
            raise Unauthorized(f"unauthorized: {transceiver} is not a registered transceiver")
        if msg.msg_id not in self._vaas:
            raise BelowThreshold(f"{msg.msg_id} has no guardian-attested delivery here")
        seen = self._attestations[msg.msg_id]
        if transceiver in seen:
            raise ConfigError(f"duplicate attestation from {transceiver}")
        seen.add(transceiver)
        self.sim.log("ntt", "attestation", manager=str(self.address), msg=msg.msg_id,
                     transceiver=str(transceiver))
        if self.auto_execute and len(seen) >= self.threshold and msg.msg_id not in self._executed:
            self.execute_msg(msg)

    def is_message_approved(self, msg_id: str) -> bool:
        return (msg_id in self._vaas
                and len(self._attestations[msg_id] & set(self.transceivers)) >= self.threshold)

    def is_message_executed(self, msg_id: str) -> bool:
        return msg_id in self._executed

    def execute_msg(self, msg: CrossChainMessage) -> QueuedTransfer | None:
        if msg.msg_id in self._executed:
            raise ConfigError(f"{msg.msg_id} already executed")
        if msg.msg_id not in self._vaas or msg.status not in (Status.DELIVERED, Status.ATTESTED):
            raise BelowThreshold(f"{msg.msg_id} lacks a guardian-quorum delivery")
        if not self.is_message_approved(msg.msg_id):
            raise BelowThreshold(f"{msg.msg_id} below transceiver threshold {self.threshold}")
        if self.paused:
            raise Paused(f"{self.address} is paused")
        body = NttPayload.decode(msg.payload)
        recipient = Address(self.chain, body.recipient)
        self._executed.add(msg.msg_id)
        rl = self.inbound_limits.get(msg.src)
        if rl is None or rl.can_consume(body.amount):
            if rl is not None:
                rl.consume(body.amount)
            self._release_or_mint(recipient, body.amount, msg.msg_id)
            return None
        digest = payload_digest(msg.payload)
        entry = QueuedTransfer(digest, body.amount, None, recipient, msg.src, self.sim.tick,
                               msg_id=msg.msg_id)
        self.inbound_queue[digest] = entry
        self.sim.book.queue_inbound(msg.msg_id)
        self.sim.log("ntt", "queue_inbound", manager=str(self.address), digest=digest,
                     amount=body.amount)
        return entry

    def complete_inbound_queued_transfer(self, digest: str) -> None:
        entry = self.inbound_queue.get(digest)
        if entry is None:
            raise UnknownSequence(f"unknown inbound digest {digest}")
        if self.paused:
            raise Paused(f"{self.address} is paused")
        if self.sim.tick < entry.queued_tick + self.window:
            raise StillQueued(f"still queued until tick {entry.queued_tick + self.window}")
        del self.inbound_queue[digest]
        self._release_or_mint(entry.recipient, entry.amount, entry.msg_id)

    def _release_or_mint(self, recipient: Address, amount: int, msg_id: str) -> None:
        if self.is_hub:
            if amount > self.hub_locked:
                raise InvariantViolation(f"hub release {amount} exceeds locked {self.hub_locked}")
            self.ledger.transfer(self.address, recipient, amount)
            self.hub_locked -= amount
        else:
            self.ledger.mint(self.address, recipient, amount)
        self.sim.book.credit(msg_id, self.family, amount, self.ledger.decimals)
        self.sim.log("ntt", "redeemed", manager=str(self.address), msg=msg_id, amount=amount)

    def quote_delivery_price(self) -> int:
        return 0
