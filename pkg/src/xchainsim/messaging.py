"""Cross-chain message transport with pluggable verification.

A message is emitted by a contract on its source chain, collects attestations
from the verifiers of its channel's model, and once the quorum verdict holds
and the route latency has elapsed it is handed to the receiving contract's
``on_message``. Receivers signal refusal with :class:`DeliveryRejected` and a
paused-but-persistent receiver with :class:`Hold`.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Collection, Union

from .chain import Address, ChainId
from .errors import ConfigError, DeliveryRejected, SimulationError

if TYPE_CHECKING:
    from .sim import Simulation

DEFAULT_LATENCY = 3


class Status(str, Enum):
    EMITTED = "Emitted"
    ATTESTED = "Attested"
    DELIVERED = "Delivered"
    REJECTED = "Rejected"
    HELD_PAUSED = "HeldPaused"


@dataclass(frozen=True)
class BridgeWhitelist:
    """Verification delegated to whichever whitelisted bridge delivers."""

    trusted_bridges: frozenset = frozenset()
    kind = "bridge_whitelist"


@dataclass(frozen=True)
class DvnSet:
    required: frozenset
    optional: frozenset
    optional_threshold: int
    kind = "dvn_set"

    def __post_init__(self):
        if self.required & self.optional:
            raise ConfigError("a DVN cannot be both required and optional")
        if not 0 <= self.optional_threshold <= len(self.optional):
            raise ConfigError(
                f"optional threshold {self.optional_threshold} exceeds {len(self.optional)} optional DVNs")
        if not self.required and self.optional_threshold == 0:
            raise ConfigError("DVN set would accept messages with no attestation")


@dataclass(frozen=True)
class GuardianQuorum:
    guardians: frozenset
    threshold: int
    kind = "guardian_quorum"

    def __post_init__(self):
        if not 1 <= self.threshold <= len(self.guardians):
            raise ConfigError(f"threshold {self.threshold} not in 1..{len(self.guardians)}")


@dataclass(frozen=True)
class DonLane:
    committee: frozenset
    threshold: int
    issuer_configurable = False
    kind = "don_lane"

    def __post_init__(self):
        if not 1 <= self.threshold <= len(self.committee):
            raise ConfigError(f"threshold {self.threshold} not in 1..{len(self.committee)}")


@dataclass(frozen=True)
class SuperchainMessenger:
    latency_blocks: int = 1
    kind = "superchain"

    def __post_init__(self):
        if self.latency_blocks != 1:
            raise ConfigError("Superchain messaging latency is fixed at one block")


VerificationModel = Union[BridgeWhitelist, DvnSet, GuardianQuorum, DonLane, SuperchainMessenger]


def verifier_ids(model: VerificationModel) -> tuple[str, ...]:
    if isinstance(model, DvnSet):
        return tuple(sorted(model.required | model.optional))
    if isinstance(model, GuardianQuorum):
        return tuple(sorted(model.guardians))
    if isinstance(model, DonLane):
        return tuple(sorted(model.committee))
    return ()


def quorum_met(model: VerificationModel, attesters: Collection[str]) -> bool:
    """Quorum verdict for a set of verifier ids that attested."""
    att = set(attesters)
    if isinstance(model, DvnSet):
        return model.required <= att and len(model.optional & att) >= model.optional_threshold
    if isinstance(model, GuardianQuorum):
        return len(model.guardians & att) >= model.threshold
    if isinstance(model, DonLane):
        return len(model.committee & att) >= model.threshold
    return True


def describe_model(model: VerificationModel) -> dict[str, Any]:
    if isinstance(model, DvnSet):
        return {"kind": model.kind, "required": sorted(model.required),
                "optional": sorted(model.optional), "threshold": model.optional_threshold}
    if isinstance(model, GuardianQuorum):
        return {"kind": model.kind, "participants": sorted(model.guardians),
                "threshold": model.threshold}
    if isinstance(model, DonLane):
        return {"kind": model.kind, "participants": sorted(model.committee),
                "threshold": model.threshold}
    return {"kind": model.kind}


class Hold(Exception):
    """Raised by a receiver that is paused but keeps the message for later."""

    def __init__(self, watch: Address):
        super().__init__(f"held until {watch} unpauses")
        self.watch = watch


@dataclass
class Verifier:
    id: str
    compromised: bool = False
    withholding: bool = False


@dataclass
class Attestation:
    verifier: str
    msg_id: str
    honest: bool
    observed_tick: int


@dataclass
class CrossChainMessage:
    msg_id: str
    channel: str
    src: ChainId
    dst: ChainId
    emitter: Address
    receiver: Address
    payload: bytes
    nonce: int | None
    emitted_tick: int
    model: VerificationModel
    latency: int
    order: int
    forged: bool = False
    status: Status = Status.EMITTED
    attestations: dict[str, Attestation] = field(default_factory=dict)
    verdict: bool = False
    delivered_tick: int | None = None
    held_on: Address | None = None
    reason: str | None = None

    @property
    def ready_tick(self) -> int:
        return self.emitted_tick + self.latency


class Channel:
    """A transport used by one standard (or one bridge), with per-route overrides."""

    def __init__(self, name: str, model: VerificationModel, latency: int = DEFAULT_LATENCY,
                 issuer_configurable: bool = False):
        self.name = name
        self.model = model
        self.latency = latency
        self.issuer_configurable = issuer_configurable
        self.route_models: dict[tuple[ChainId, ChainId], VerificationModel] = {}
        self.route_latency: dict[tuple[ChainId, ChainId], int] = {}

    def model_for(self, src: ChainId, dst: ChainId) -> VerificationModel:
        return self.route_models.get((src, dst), self.model)

    def latency_for(self, src: ChainId, dst: ChainId) -> int:
        model = self.model_for(src, dst)
        if isinstance(model, SuperchainMessenger):
            return model.latency_blocks * dst.block_interval
        return self.route_latency.get((src, dst), self.latency)


class MessageLayer:
    def __init__(self, sim: Simulation):
        self.sim = sim
        self.verifiers: dict[str, Verifier] = {}
        self.channels: dict[str, Channel] = {}
        self.messages: dict[str, CrossChainMessage] = {}
        self._nonces: dict[Address, int] = {}
        self._pending: dict[str, CrossChainMessage] = {}
        self._ready: list[tuple[int, int, str]] = []
        self._held: dict[Address, list[str]] = {}
        self._order = 0
        self._forged = 0
        self._verifiers_dirty = False

    # -- configuration ---------------------------------------------------
    def add_verifiers(self, ids: Collection[str]) -> None:
        for vid in ids:
            if vid not in self.verifiers:
                self.verifiers[vid] = Verifier(vid)

    def add_channel(self, name: str, model: VerificationModel, latency: int = DEFAULT_LATENCY,
                    issuer_configurable: bool = False) -> Channel:
        if name in self.channels:
            raise ConfigError(f"duplicate channel {name!r}")
        if latency < 1:
            raise ConfigError("latency must be >= 1 tick")
        self.add_verifiers(verifier_ids(model))
        ch = Channel(name, model, latency, issuer_configurable)
        self.channels[name] = ch
        self.sim.log("msg", "channel", channel=name, model=describe_model(model), latency=latency)
        return ch

    def set_route_model(self, channel: str, src: ChainId, dst: ChainId,
                        model: VerificationModel) -> None:
        """Infrastructure-level route setup (e.g. opening a CCIP lane)."""
        ch = self.channels[channel]
        current = ch.route_models.get((src, dst))
        if isinstance(current, DonLane):
            raise ConfigError("issuer has no configurability power over a DON lane")
        self.add_verifiers(verifier_ids(model))
        ch.route_models[(src, dst)] = model
        self.sim.log("msg", "route", channel=channel, src=src.label, dst=dst.label,
                     model=describe_model(model))

    def configure_model(self, channel: str, model: VerificationModel) -> None:
        """Token-issuer reconfiguration of a channel's verifier set."""
        ch = self.channels[channel]
        if any(isinstance(m, DonLane) for m in [ch.model, *ch.route_models.values()]):
            raise ConfigError("issuer has no configurability power over a DON lane")
        if not ch.issuer_configurable:
            raise ConfigError(f"verifier set of {channel!r} is not configurable by token issuers")
        self.add_verifiers(verifier_ids(model))
        ch.model = model
        self.sim.log("msg", "configure", channel=channel, model=describe_model(model))

    def set_latency(self, channel: str, ticks: int, src: ChainId | None = None,
                    dst: ChainId | None = None) -> None:
        ch = self.channels[channel]
        models = [ch.model_for(src, dst)] if src is not None and dst is not None else [ch.model]
        if any(isinstance(m, SuperchainMessenger) for m in models):
            raise ConfigError("Superchain latency is fixed at one block")
        if ticks < 1:
            raise ConfigError("latency must be >= 1 tick")
        if src is not None and dst is not None:
            ch.route_latency[(src, dst)] = ticks
        else:
            ch.latency = ticks
        self.sim.log("msg", "latency", channel=channel, ticks=ticks,
                     src=src.label if src else None, dst=dst.label if dst else None)

    def compromise_verifier(self, vid: str, at_tick: int | None = None,
                            withholding: bool = False) -> None:
        if vid not in self.verifiers:
            raise ConfigError(f"unknown verifier {vid!r}")

        def apply():
            v = self.verifiers[vid]
            v.compromised = True
            v.withholding = withholding
            self._verifiers_dirty = True
            self.sim.log("adversary", "compromise", verifier=vid, withholding=withholding)

        if at_tick is None or at_tick == self.sim.tick:
            apply()
        else:
            self.sim.schedule(at_tick, apply)

    def restore_verifier(self, vid: str) -> None:
        v = self.verifiers[vid]
        v.compromised = False
        v.withholding = False
        self._verifiers_dirty = True
        self.sim.log("adversary", "restore", verifier=vid)

    # -- lifecycle -------------------------------------------------------
    def next_nonce(self, emitter: Address) -> int:
        return self._nonces.get(emitter, 0)

    def emit_message(self, channel: str, emitter: Address, dst: ChainId, receiver: Address,
                     payload: bytes) -> CrossChainMessage:
        src = emitter.chain
        if self.sim.contracts.get(emitter) is None:
            raise ConfigError(f"emitter {emitter} is not a registered contract")
        if dst.label not in self.sim.chains or self.sim.chains[dst.label] != dst:
            raise ConfigError(f"unknown destination chain {dst}")
        if src == dst:
            raise ConfigError("source and destination chain must differ")
        if receiver.chain != dst:
            raise ConfigError(f"receiver {receiver} is not on {dst.label}")
        ch = self.channels[channel]
        nonce = self._nonces.get(emitter, 0)
        self._nonces[emitter] = nonce + 1
        self._order += 1
        msg = CrossChainMessage(
            msg_id=f"m{self._order}", channel=channel, src=src, dst=dst, emitter=emitter,
            receiver=receiver, payload=bytes(payload), nonce=nonce, emitted_tick=self.sim.tick,
            model=ch.model_for(src, dst), latency=ch.latency_for(src, dst), order=self._order)
        self.messages[msg.msg_id] = msg
        self.sim.log("msg", "emit", msg=msg.msg_id, channel=channel, src=src.label,
                     dst=dst.label, emitter=str(emitter), receiver=str(receiver), nonce=nonce,
                     payload=msg.payload.hex(), model=describe_model(msg.model),
                     latency=msg.latency)
        self.collect_attestations(msg)
        return msg

    def inject_forged_message(self, dst: ChainId, intended_receiver: Address, payload: bytes,
                              forging_verifiers: Collection[str], *, channel: str,
                              src: ChainId, emitter: Address) -> CrossChainMessage:
        """Adversary fabricates a message carrying only forged attestations."""
        forging = sorted(set(forging_verifiers))
        for vid in forging:
            v = self.verifiers.get(vid)
            if v is None or not v.compromised:
                raise ConfigError(f"verifier {vid!r} is not compromised")
        ch = self.channels[channel]
        self._order += 1
        self._forged += 1
        msg = CrossChainMessage(
            msg_id=f"f{self._forged}", channel=channel, src=src, dst=dst, emitter=emitter,
            receiver=intended_receiver, payload=bytes(payload), nonce=None,
            emitted_tick=self.sim.tick, model=ch.model_for(src, dst),
            latency=ch.latency_for(src, dst), order=self._order, forged=True)
        self.messages[msg.msg_id] = msg
        self.sim.book.forge(msg.msg_id)
        self.sim.log("msg", "forge", msg=msg.msg_id, channel=channel, src=src.label,
                     dst=dst.label, emitter=str(emitter), receiver=str(intended_receiver),
                     payload=msg.payload.hex(), model=describe_model(msg.model),
                     latency=msg.latency, verifiers=forging)
        allowed = set(verifier_ids(msg.model))
        for vid in forging:
            if vid in allowed:
                self._attest(msg, vid, honest=False)
        self._evaluate(msg)
        return msg

    def _attest(self, msg: CrossChainMessage, vid: str, honest: bool) -> None:
        msg.attestations[vid] = Attestation(vid, msg.msg_id, honest, self.sim.tick)
        self.sim.log("msg", "attest", msg=msg.msg_id, verifier=vid, honest=honest)

    def _evaluate(self, msg: CrossChainMessage) -> bool:
        if quorum_met(msg.model, msg.attestations):
            msg.verdict = True
            msg.status = Status.ATTESTED
            self._pending.pop(msg.msg_id, None)
            self.sim.log("msg", "verdict", msg=msg.msg_id, quorum=True)
            heapq.heappush(self._ready, (max(msg.ready_tick, self.sim.tick), msg.order, msg.msg_id))
            return True
        self._pending[msg.msg_id] = msg
        return False

    def collect_attestations(self, msg: CrossChainMessage) -> bool:
        """Ask every willing verifier of the model to attest; returns the verdict."""
        if msg.status is not Status.EMITTED:
            return msg.verdict
        if not msg.forged:
            for vid in verifier_ids(msg.model):
                if vid in msg.attestations:
                    continue
                v = self.verifiers[vid]
                if v.compromised and v.withholding:
                    continue
                self._attest(msg, vid, honest=True)
        return self._evaluate(msg)

    def try_deliver(self, msg: CrossChainMessage) -> Status:
        if not msg.verdict:
            raise SimulationError(f"{msg.msg_id} has no quorum")
        if self.sim.tick < msg.ready_tick:
            raise SimulationError(f"{msg.msg_id} not deliverable before tick {msg.ready_tick}")
        if msg.status not in (Status.ATTESTED, Status.HELD_PAUSED):
            raise SimulationError(f"{msg.msg_id} already {msg.status.value}")
        handler = self.sim.contracts.get(msg.receiver)
        if handler is None or not hasattr(handler, "on_message"):
            self.reject(msg, "no receiving contract")
            return msg.status
        try:
            handler.on_message(msg)
        except Hold as hold:
            msg.status = Status.HELD_PAUSED
            msg.held_on = hold.watch
            self._held.setdefault(hold.watch, []).append(msg.msg_id)
            self.sim.log("msg", "hold", msg=msg.msg_id, watch=str(hold.watch))
        except DeliveryRejected as exc:
            self.reject(msg, str(exc))
        except SimulationError as exc:
            self.reject(msg, f"{type(exc).__name__}: {exc}")
        else:
            msg.status = Status.DELIVERED
            msg.delivered_tick = self.sim.tick
            self.sim.log("msg", "deliver", msg=msg.msg_id)
        return msg.status

    def reject(self, msg: CrossChainMessage, reason: str) -> None:
        msg.status = Status.REJECTED
        msg.reason = reason
        self.sim.log("msg", "reject", msg=msg.msg_id, reason=reason)
        self.sim.book.strand(msg.msg_id)

    def release_held(self, watch: Address) -> int:
        """Re-queue messages held on ``watch`` for delivery on the next tick."""
        ids = self._held.pop(watch, [])
        for mid in ids:
            msg = self.messages[mid]
            heapq.heappush(self._ready, (self.sim.tick + 1, msg.order, mid))
        if ids:
            self.sim.log("msg", "release", watch=str(watch), count=len(ids))
        return len(ids)

    def on_tick(self, now: int) -> None:
        if self._verifiers_dirty and self._pending:
            for mid in sorted(self._pending, key=lambda m: self._pending[m].order):
                self.collect_attestations(self._pending[mid])
        self._verifiers_dirty = False
        while self._ready and self._ready[0][0] <= now:
            _, _, mid = heapq.heappop(self._ready)
            msg = self.messages[mid]
            if msg.status in (Status.ATTESTED, Status.HELD_PAUSED):
                self.try_deliver(msg)

    # -- queries ---------------------------------------------------------
    def held(self) -> list[CrossChainMessage]:
        return [m for m in self.messages.values() if m.status is Status.HELD_PAUSED]

    def stalled(self) -> list[CrossChainMessage]:
        return [m for m in self.messages.values() if m.status is Status.EMITTED]
