"""SuperchainERC20 (ERC-7802) over the L2-to-L2 messenger.

There is no peer registry: a token is the same token on every member chain
because it sits at the same address value everywhere. The bridge burns on
the source, the messenger carries the message for exactly one destination
block, and relaying mints at that same address on the destination.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

from .chain import Address, ChainId, TokenLedger, check_amount
from .errors import (AlreadyRelayed, ConfigError, DeliveryRejected, InsufficientBalance, Paused,
                     Unauthorized)
from .messaging import CrossChainMessage, Hold, SuperchainMessenger
from .payloads import SuperchainPayload

if TYPE_CHECKING:
    from .sim import Simulation

STANDARD = "superchain"
SUPERCHAIN_CHANNEL = "superchain"
BRIDGE_NAME = "superchain:bridge"
MESSENGER_NAME = "l2tol2:messenger"


def deterministic_address(chain: ChainId, token_id: str, salt: str = "") -> Address:
    """The address a CREATE2-style deployment gives a token on ``chain``.

    The value depends only on the token id and salt, never on the chain.
    """
    return Address.named(chain, f"sc:{token_id}{':' + salt if salt else ''}")


class SuperchainNetwork:
    """Membership set plus the per-chain predeploys (bridge and messenger)."""

    def __init__(self, sim: Simulation, members: Iterable[ChainId], auto_relay: bool = True,
                 channel: str = SUPERCHAIN_CHANNEL):
        self.sim = sim
        self.members = sorted(set(members), key=lambda c: c.id)
        self.auto_relay = auto_relay
        self.channel = channel
        if channel not in sim.messages.channels:
            sim.messages.add_channel(channel, SuperchainMessenger())
        self.bridges: dict[ChainId, SuperchainTokenBridge] = {}
        self.messengers: dict[ChainId, L2ToL2Messenger] = {}
        for chain in self.members:
            self.messengers[chain] = L2ToL2Messenger(sim, self, chain)
            self.bridges[chain] = SuperchainTokenBridge(sim, self, chain)
        sim.log("superchain", "network", members=[c.label for c in self.members],
                auto_relay=auto_relay)

    def is_member(self, chain: ChainId) -> bool:
        return chain in self.messengers

    def migrate_legacy(self, *_args, **_kwargs):
        raise ConfigError("the Superchain has no standard adapter workflow for legacy tokens")

    def deploy_token(self, ledger: TokenLedger, owner: Address, salt: str = "",
                     address: Address | None = None) -> SuperchainToken:
        addr = address or deterministic_address(ledger.chain, ledger.token_id, salt)
        return SuperchainToken(self.sim, self, ledger, owner, addr)


class SuperchainToken:
    def __init__(self, sim: Simulation, network: SuperchainNetwork, ledger: TokenLedger,
                 owner: Address, address: Address):
        if not network.is_member(ledger.chain):
            raise ConfigError(f"{ledger.chain.label} is not a Superchain member")
        if address.chain != ledger.chain:
            raise ConfigError("token address must be on the ledger's chain")
        self.sim = sim
        self.network = network
        self.ledger = ledger
        self.owner = owner
        self.address = address
        self.bridge = Address.named(ledger.chain, BRIDGE_NAME)
        self.paused = False
        sim.register_contract(address, self)
        ledger.authorize(address)

    @property
    def chain(self) -> ChainId:
        return self.ledger.chain

    def crosschain_mint(self, caller: Address, to: Address, amount: int) -> None:
        if caller != self.bridge:
            raise Unauthorized(f"unauthorized: {caller} is not the token bridge")
        self.ledger.mint(self.address, to, amount)
        self.sim.log("superchain", "crosschain_mint", token=str(self.address), to=str(to),
                     amount=amount)

    def crosschain_burn(self, caller: Address, frm: Address, amount: int) -> None:
        if caller != self.bridge:
            raise Unauthorized(f"unauthorized: {caller} is not the token bridge")
        self.ledger.burn(self.address, frm, amount)
        self.sim.log("superchain", "crosschain_burn", token=str(self.address), frm=str(frm),
                     amount=amount)

    def pause(self, caller: Address) -> None:
        if caller != self.owner:
            raise Unauthorized(f"unauthorized: {caller} is not the token owner")
        self.paused = True
        self.sim.log("superchain", "pause", token=str(self.address))

    def unpause(self, caller: Address) -> None:
        if caller != self.owner:
            raise Unauthorized(f"unauthorized: {caller} is not the token owner")
        self.paused = False
        self.sim.log("superchain", "unpause", token=str(self.address))
        self.sim.messages.release_held(self.address)


class L2ToL2Messenger:
    """Carries bridge messages; each message is relayed at most once."""

    def __init__(self, sim: Simulation, network: SuperchainNetwork, chain: ChainId):
        self.sim = sim
        self.network = network
        self.chain = chain
        self.nonce = 0
        self.relayed: set[str] = set()
        self.inbox: dict[str, CrossChainMessage] = {}
        self.address = Address.named(chain, MESSENGER_NAME)
        sim.register_contract(self.address, self)

    def send_message(self, sender: Address, dst: ChainId, payload: bytes) -> CrossChainMessage:
        self.nonce += 1
        return self.sim.messages.emit_message(self.network.channel, sender, dst,
                                              Address.named(dst, MESSENGER_NAME), payload)

    def on_message(self, msg: CrossChainMessage) -> None:
        if self.network.auto_relay:
            self.network.bridges[self.chain].relay_erc20(msg)
        else:
            self.inbox[msg.msg_id] = msg
            self.sim.log("superchain", "inbox", msg=msg.msg_id)


class SuperchainTokenBridge:
    """Stateless with respect to tokens: no registry, no peers."""

    def __init__(self, sim: Simulation, network: SuperchainNetwork, chain: ChainId):
        self.sim = sim
        self.network = network
        self.chain = chain
        self.address = Address.named(chain, BRIDGE_NAME)
        sim.register_contract(self.address, self)

    def send_erc20(self, sender: Address, token_address: Address, dst: ChainId,
                   recipient: Address, amount: int) -> CrossChainMessage:
        token = self.sim.contracts.get(token_address)
        family = token.ledger.family if isinstance(token, SuperchainToken) else None
        with self.sim.book.request(STANDARD, family, self.chain, dst, sender, recipient,
                                   amount) as tid:
            check_amount(amount)
            if not self.network.is_member(dst) or dst == self.chain:
                raise ConfigError(f"{dst.label} is not another Superchain member")
            if not isinstance(token, SuperchainToken) or token.chain != self.chain:
                raise ConfigError(f"no SuperchainERC20 at {token_address}")
            if recipient.chain != dst:
                raise ConfigError(f"recipient {recipient} is not on {dst.label}")
            if token.paused:
                raise Paused(f"{token.address} is paused")
            if token.ledger.balance_of(sender) < amount:
                raise InsufficientBalance(f"{sender} holds {token.ledger.balance_of(sender)} < {amount}")
            token.crosschain_burn(self.address, sender, amount)
            payload = SuperchainPayload(token_address.value, recipient.value, amount,
                                        self.network.messengers[self.chain].nonce).encode()
            msg = self.network.messengers[self.chain].send_message(self.address, dst, payload)
            self.sim.book.debit(msg.msg_id, family, amount, token.ledger.decimals, tid)
            self.sim.log("superchain", "send_erc20", msg=msg.msg_id, token=str(token_address),
                         dst=dst.label, amount=amount)
        return msg

    def relay_erc20(self, msg: CrossChainMessage) -> None:
        messenger = self.network.messengers[self.chain]
        if msg.msg_id in messenger.relayed:
            raise AlreadyRelayed(f"{msg.msg_id} already relayed")
        if msg.dst != self.chain:
            raise ConfigError(f"{msg.msg_id} is not addressed to {self.chain.label}")
        manual = msg.msg_id in messenger.inbox
        try:
            if msg.emitter != Address.named(msg.src, BRIDGE_NAME):
                raise DeliveryRejected(f"{msg.emitter} is not the Superchain token bridge")
            body = SuperchainPayload.decode(msg.payload)
            token = self.sim.contracts.get(Address(self.chain, body.token))
            if not isinstance(token, SuperchainToken):
                raise DeliveryRejected("no token at the same address on the destination")
            if token.paused:
                if manual:
                    raise Paused(f"{token.address} is paused")
                raise Hold(token.address)
            token.crosschain_mint(self.address, Address(self.chain, body.recipient), body.amount)
        except DeliveryRejected as exc:
            if not manual:
                raise
            messenger.inbox.pop(msg.msg_id)
            self.sim.log("superchain", "relay_fail", msg=msg.msg_id, reason=str(exc))
            self.sim.book.strand(msg.msg_id)
            raise
        messenger.relayed.add(msg.msg_id)
        messenger.inbox.pop(msg.msg_id, None)
        self.sim.book.credit(msg.msg_id, token.ledger.family, body.amount, token.ledger.decimals)
        self.sim.log("superchain", "relay", msg=msg.msg_id, amount=body.amount)
