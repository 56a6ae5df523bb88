"""Deterministic event loop, event log, and value bookkeeping."""
from __future__ import annotations

import heapq
import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator

from .chain import Address, ChainId, TokenLedger
from .errors import ConfigError, SimulationError


@dataclass
class Event:
    tick: int
    seq: int
    module: str
    op: str
    fields: dict[str, Any]

    def to_line(self) -> str:
        body = json.dumps(self.fields, sort_keys=True, separators=(",", ":"))
        return (f'{{"tick":{self.tick},"seq":{self.seq},"module":{json.dumps(self.module)},'
                f'"op":{json.dumps(self.op)},"fields":{body}}}')

    @classmethod
    def from_line(cls, line: str) -> Event:
        raw = json.loads(line)
        return cls(raw["tick"], raw["seq"], raw["module"], raw["op"], raw["fields"])

    @property
    def name(self) -> str:
        return f"{self.module}.{self.op}"


def dump_events(events: Iterable[Event]) -> str:
    return "".join(e.to_line() + "\n" for e in events)


def load_events(text: str) -> list[Event]:
    out = []
    for n, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        try:
            out.append(Event.from_line(line))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"malformed event log line {n + 1}: {exc}") from exc
    return out


@dataclass
class Family:
    """All ledgers of one logical token across chains, plus its custodians."""

    name: str
    standard: str
    mode: str
    ledgers: list[TokenLedger] = field(default_factory=list)
    custodians: list[tuple[TokenLedger, Address]] = field(default_factory=list)
    escrows: list[tuple[TokenLedger, Address]] = field(default_factory=list)
    decimals: int | None = None  # fixed at genesis
    baseline: int | None = None
    genesis_supply: int | None = None


@dataclass
class ValueRecord:
    msg_id: str
    family: str
    amount: int
    decimals: int
    state: str
    tid: str | None


class TransferBook:
    """Module-side record of value in flight, queued, or stranded."""

    def __init__(self, sim: Simulation):
        self.sim = sim
        self.records: dict[str, ValueRecord] = {}
        self.forged: set[str] = set()
        # (family, state) -> {decimals: amount}
        self.totals: dict[tuple[str, str], dict[int, int]] = {}
        self._tid = 0

    def _add(self, family: str, state: str, decimals: int, amount: int) -> None:
        bucket = self.totals.setdefault((family, state), {})
        bucket[decimals] = bucket.get(decimals, 0) + amount

    def total(self, family: str, state: str, decimals: int) -> int:
        bucket = self.totals.get((family, state), {})
        return sum(v * 10 ** (decimals - d) for d, v in bucket.items())

    @contextmanager
    def request(self, standard: str, family: str, src: ChainId, dst: ChainId,
                sender: Address, recipient: Address, amount: int, **extra) -> Iterator[str]:
        self._tid += 1
        tid = f"t{self._tid}"
        self.sim.log("xfer", "request", tid=tid, standard=standard, family=family,
                     src=src.label, dst=dst.label, sender=str(sender),
                     recipient=str(recipient), amount=amount, **extra)
        try:
            yield tid
        except SimulationError as exc:
            self.sim.log("xfer", "fail", tid=tid, error=type(exc).__name__, reason=str(exc))
            raise

    def debit(self, msg_id: str, family: str, amount: int, decimals: int, tid: str | None) -> None:
        self.records[msg_id] = ValueRecord(msg_id, family, amount, decimals, "in_flight", tid)
        self._add(family, "in_flight", decimals, amount)
        self.sim.log("xfer", "debit", msg=msg_id, family=family, amount=amount,
                     decimals=decimals, tid=tid)

    def forge(self, msg_id: str) -> None:
        self.forged.add(msg_id)

    def queue_inbound(self, msg_id: str) -> None:
        rec = self.records.get(msg_id)
        if rec is not None and rec.state == "in_flight":
            self._add(rec.family, "in_flight", rec.decimals, -rec.amount)
            self._add(rec.family, "queued", rec.decimals, rec.amount)
            rec.state = "queued"
        self.sim.log("xfer", "queue_in", msg=msg_id)

    def credit(self, msg_id: str, family: str, amount: int, decimals: int) -> None:
        """The destination has minted or released ``amount`` for this message."""
        rec = self.records.get(msg_id)
        if rec is not None and msg_id not in self.forged and rec.state in ("in_flight", "queued"):
            self._add(rec.family, rec.state, rec.decimals, -rec.amount)
            rec.state = "credited"
        else:
            self._add(family, "illegitimate", decimals, amount)
        self.sim.log("xfer", "credit", msg=msg_id, family=family, amount=amount, decimals=decimals)

    def strand(self, msg_id: str) -> None:
        rec = self.records.get(msg_id)
        if rec is None or rec.state not in ("in_flight", "queued"):
            return
        self._add(rec.family, rec.state, rec.decimals, -rec.amount)
        self._add(rec.family, "stranded", rec.decimals, rec.amount)
        rec.state = "stranded"
        self.sim.log("xfer", "strand", msg=msg_id)

    def unbacked(self, family: str, amount: int, decimals: int, minter: Address) -> None:
        """A mint with no burn or lock behind it (e.g. a rogue bridge)."""
        self._add(family, "illegitimate", decimals, amount)
        self.sim.log("xfer", "unbacked", family=family, amount=amount, decimals=decimals,
                     minter=str(minter))

    def queued_out(self, tid: str | None, sequence: int, amount: int) -> None:
        self.sim.log("xfer", "queue_out", tid=tid, sequence=sequence, amount=amount)

    def cancelled(self, tid: str | None, sequence: int) -> None:
        self.sim.log("xfer", "cancel", tid=tid, sequence=sequence)

    def fee(self, tid: str, standard: str, component: str, amount: Fraction, currency: str) -> None:
        if amount:
            self.sim.log("fee", "charge", tid=tid, standard=standard, component=component,
                         amount=str(Fraction(amount)), currency=currency)


class Simulation:
    """Single-threaded deterministic simulation instance.

    Ordering of everything is derived from (tick, insertion sequence).
    """

    def __init__(self, seed: int = 0, name: str = "sim"):
        from .messaging import MessageLayer

        self.seed = seed
        self.name = name
        self.tick = 0
        self.events: list[Event] = []
        self.listeners: list[Callable[[Event], None]] = []
        self.boundary_hooks: list[Callable[[Simulation], None]] = []
        self.chains: dict[str, ChainId] = {}
        self.chain_meta: dict[str, dict[str, Any]] = {}
        self.ledgers: dict[tuple[ChainId, str], TokenLedger] = {}
        self.contracts: dict[Address, Any] = {}
        self.families: dict[str, Family] = {}
        self.genesis_done = False
        self._scheduled: list[tuple[int, int, Callable[[], None]]] = []
        self._sched_seq = 0
        self.book = TransferBook(self)
        self.messages = MessageLayer(self)

    # -- logging -----------------------------------------------------------
    def log(self, module: str, op: str, **fields) -> Event:
        ev = Event(self.tick, len(self.events), module, op, fields)
        self.events.append(ev)
        for fn in self.listeners:
            fn(ev)
        return ev

    # -- chains and ledgers ------------------------------------------------
    def create_chain(self, label: str, block_interval: int = 1, **meta) -> ChainId:
        if block_interval < 1:
            raise ConfigError("block_interval must be >= 1")
        if label in self.chains:
            raise ConfigError(f"duplicate chain label {label!r}")
        chain = ChainId(len(self.chains), label, block_interval)
        self.chains[label] = chain
        self.chain_meta[label] = dict(meta)
        self.log("chain", "create", id=chain.id, label=label, block_interval=block_interval)
        return chain

    def chain(self, label: str) -> ChainId:
        try:
            return self.chains[label]
        except KeyError:
            raise ConfigError(f"unknown chain {label!r}") from None

    def deploy_ledger(self, chain: ChainId, token_id: str, decimals: int,
                      initial_holders: dict[Address, int] | None = None,
                      family: str | None = None) -> TokenLedger:
        if (chain, token_id) in self.ledgers:
            raise ConfigError(f"token {token_id} already deployed on {chain.label}")
        holders = initial_holders or {}
        for addr in holders:
            if addr.chain != chain:
                raise ConfigError(f"holder {addr} is not on {chain.label}")
        fam = None
        if family is not None:
            fam = self.families[family]
            if fam.decimals is not None and decimals > fam.decimals:
                raise ConfigError("cannot raise family decimals after genesis")
        ledger = TokenLedger(self, token_id, chain, decimals, family)
        self.ledgers[(chain, token_id)] = ledger
        self.log("chain", "deploy", ledger=ledger.key, token=token_id, chain=chain.label,
                 decimals=decimals, family=family)
        if fam is not None:
            fam.ledgers.append(ledger)
        for addr in sorted(holders, key=lambda a: a.value):
            ledger._mint(addr, holders[addr])
        return ledger

    def ledger(self, chain: ChainId, token_id: str) -> TokenLedger:
        return self.ledgers[(chain, token_id)]

    def register_contract(self, address: Address, obj: Any) -> None:
        if address in self.contracts:
            raise ConfigError(f"address {address} already in use")
        self.contracts[address] = obj

    # -- families ----------------------------------------------------------
    def register_family(self, name: str, standard: str, mode: str) -> Family:
        if name in self.families:
            raise ConfigError(f"duplicate token family {name!r}")
        fam = Family(name, standard, mode)
        self.families[name] = fam
        self.log("harness", "family", family=name, standard=standard, mode=mode)
        return fam

    def add_custodian(self, family: str, ledger: TokenLedger, account: Address) -> None:
        """Balances held by ``account`` are locked backing, not circulating supply."""
        if ledger.balance_of(account):
            raise ConfigError("custodian must be registered before it holds funds")
        self.families[family].custodians.append((ledger, account))
        self.log("harness", "custodian", family=family, ledger=ledger.key, account=str(account))

    def add_escrow(self, family: str, ledger: TokenLedger, account: Address) -> None:
        self.families[family].escrows.append((ledger, account))
        self.log("harness", "escrow", family=family, ledger=ledger.key, account=str(account))

    def genesis(self) -> None:
        """Freeze each family's decimal base and baseline circulating supply."""
        from .harness import module_snapshot

        for name in sorted(self.families):
            fam = self.families[name]
            if fam.decimals is not None:
                continue
            fam.decimals = max((l.decimals for l in fam.ledgers), default=0)
            snap = module_snapshot(self, name)
            fam.baseline = snap.accounted
            fam.genesis_supply = snap.total_supply
            self.log("harness", "genesis", family=name)
        self.genesis_done = True

    # -- time --------------------------------------------------------------
    def schedule(self, at_tick: int, fn: Callable[[], None]) -> None:
        if at_tick <= self.tick:
            raise ConfigError(f"tick {at_tick} is not in the future (now {self.tick})")
        self._sched_seq += 1
        heapq.heappush(self._scheduled, (at_tick, self._sched_seq, fn))

    def boundary(self) -> None:
        for hook in self.boundary_hooks:
            hook(self)

    def advance_tick(self, n: int = 1) -> int:
        if n < 1:
            raise ValueError("advance by at least one tick")
        for _ in range(n):
            self.boundary()
            self.tick += 1
            while self._scheduled and self._scheduled[0][0] <= self.tick:
                _, _, fn = heapq.heappop(self._scheduled)
                fn()
            self.messages.on_tick(self.tick)
        return self.tick

    def run_until(self, tick: int) -> None:
        if tick > self.tick:
            self.advance_tick(tick - self.tick)

    def finish(self) -> None:
        """Close the final tick so boundary checks see it."""
        self.boundary()
