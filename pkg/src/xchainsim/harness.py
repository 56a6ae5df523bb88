"""Supply-conservation oracle, log auditors and invariant reports.

The oracle rebuilds every balance, supply and in-flight record from the
event log alone. For each token family, with all amounts scaled to the
family's base decimals, it asserts at every tick boundary::

    circulating + in_flight + queued + stranded == baseline + illegitimate

where circulating is total supply minus balances held by custodians (lock
boxes, adapters, hub managers, lock/release pools). A broken identity is an
accounting failure; a positive illegitimate term (a mint that settled no
debit, e.g. from a forged message) fails as an illegitimate mint.

While a simulation runs, the :class:`Harness` also compares the oracle's view
with the modules' own state and logs any disagreement, so that a report can
later be rebuilt from the log without the simulation.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any, Iterable

from .sim import Event

if TYPE_CHECKING:
    from .sim import Simulation

STATES = ("in_flight", "queued", "stranded", "illegitimate")
VERDICTS = ("conservation", "mode_rules", "oracle_agreement", "ledger_consistency",
            "quorum_safety", "exactly_once", "message_lifecycle", "nonce_monotonic",
            "rate_limit_bound")


@dataclass
class SupplySnapshot:
    family: str
    standard: str
    mode: str
    decimals: int
    baseline: int | None
    genesis_supply: int | None
    supply: dict[str, int]              # ledger key -> native units
    custody: dict[str, int]             # "ledger|account" -> base units
    in_flight: int = 0
    queued: int = 0
    stranded: int = 0
    illegitimate: int = 0
    scales: dict[str, int] = field(default_factory=dict)  # ledger key -> 10**(D - d)

    def __post_init__(self):
        for name in ("in_flight", "queued", "stranded", "illegitimate"):
            if getattr(self, name) < 0:
                raise ValueError(f"negative {name} in snapshot of {self.family}")

    @property
    def total_supply(self) -> int:
        return sum(v * self.scales.get(k, 1) for k, v in self.supply.items())

    @property
    def locked(self) -> int:
        return sum(self.custody.values())

    @property
    def circulating(self) -> int:
        return self.total_supply - self.locked

    @property
    def accounted(self) -> int:
        """Left side of the identity minus the illegitimate term."""
        return self.circulating + self.in_flight + self.queued + self.stranded - self.illegitimate

    def comparable(self) -> dict[str, Any]:
        return {"family": self.family, "standard": self.standard, "mode": self.mode,
                "decimals": self.decimals, "baseline": self.baseline,
                "genesis_supply": self.genesis_supply, "supply": self.supply,
                "custody": self.custody, "in_flight": self.in_flight, "queued": self.queued,
                "stranded": self.stranded, "illegitimate": self.illegitimate}


def module_snapshot(sim: Simulation, family: str) -> SupplySnapshot:
    """Snapshot read from module state (ledgers, custodians, transfer book)."""
    fam = sim.families[family]
    base = fam.decimals if fam.decimals is not None else max((l.decimals for l in fam.ledgers), default=0)
    scales = {l.key: 10 ** (base - l.decimals) for l in fam.ledgers}
    custody = {}
    for ledger, account in fam.custodians:
        custody[f"{ledger.key}|{account}"] = ledger.balance_of(account) * scales[ledger.key]
    book = sim.book
    return SupplySnapshot(
        family, fam.standard, fam.mode, base, fam.baseline, fam.genesis_supply,
        {l.key: l.total_supply for l in fam.ledgers}, custody,
        book.total(family, "in_flight", base), book.total(family, "queued", base),
        book.total(family, "stranded", base), book.total(family, "illegitimate", base), scales)


def check_conservation(standard: str, mode: str, snap: SupplySnapshot) -> tuple[str, str | None]:
    """Verdict for one snapshot: ("pass", None) or ("fail", kind)."""
    if snap.baseline is None:
        return "pass", None
    if snap.accounted != snap.baseline:
        return "fail", "accounting"
    if standard == "superchain" and snap.custody:
        return "fail", "mode"
    if mode == "BurnMint" and snap.locked:
        return "fail", "mode"
    if mode == "LockUnlock" and snap.total_supply != snap.genesis_supply:
        return "fail", "mode"
    if snap.illegitimate > 0:
        return "fail", "illegitimate mint"
    return "pass", None


# -- independent quorum rule used by the auditor --------------------------------
def _quorum_from_description(model: dict[str, Any], attesters: set[str]) -> bool:
    kind = model.get("kind")
    if kind == "dvn_set":
        required = set(model["required"])
        optional = set(model["optional"])
        return required.issubset(attesters) and len(optional & attesters) >= model["threshold"]
    if kind in ("guardian_quorum", "don_lane"):
        return len(set(model["participants"]) & attesters) >= model["threshold"]
    return True


@dataclass
class _OLedger:
    key: str
    decimals: int
    family: str | None
    supply: int = 0
    balances: dict[str, int] = field(default_factory=dict)


@dataclass
class _OFamily:
    name: str
    standard: str
    mode: str
    ledgers: list[str] = field(default_factory=list)
    custodians: set[str] = field(default_factory=set)   # "ledger|account"
    decimals: int | None = None
    baseline: int | None = None
    genesis_supply: int | None = None
    totals: dict[str, int] = field(default_factory=lambda: dict.fromkeys(STATES, 0))
    delta: int = 0
    streak_start: int | None = None
    first_illegitimate: int | None = None


@dataclass
class _OMessage:
    model: dict[str, Any]
    forged: bool
    attesters: set[str] = field(default_factory=set)
    status: str = "Emitted"
    delivers: int = 0
    credits: int = 0


@dataclass
class _Limiter:
    limit: int
    window: int
    prefix: int = 0
    min_term: int | None = None


class Oracle:
    """Incremental replay of an event log. Never reads module state."""

    def __init__(self):
        self.ledgers: dict[str, _OLedger] = {}
        self.families: dict[str, _OFamily] = {}
        self.records: dict[str, list] = {}      # msg -> [family, amount, decimals, state]
        self.forged: set[str] = set()
        self.messages: dict[str, _OMessage] = {}
        self.nonces: dict[str, int] = {}
        self.limiters: dict[str, _Limiter] = {}
        self.failures: dict[str, dict[str, Any]] = {}
        self.failure_counts: dict[str, int] = {}
        self.seed: int | None = None
        self.name: str | None = None
        self.index = -1
        self.tick = 0
        self.checked_tick = -1
        self.dirty = False
        self.fees: dict[str, dict[str, str]] = {}
        self._reported: set[tuple] = set()
        self._handlers = {
            "chain.deploy": self._deploy, "chain.mint": self._mint, "chain.burn": self._burn,
            "chain.transfer": self._transfer, "harness.start": self._start,
            "harness.family": self._family, "harness.custodian": self._custodian,
            "harness.genesis": self._genesis, "harness.mismatch": self._mismatch,
            "xfer.debit": self._debit, "xfer.queue_in": self._queue_in,
            "xfer.credit": self._credit, "xfer.strand": self._strand,
            "xfer.unbacked": self._unbacked, "msg.emit": self._emit, "msg.forge": self._forge,
            "msg.attest": self._attest, "msg.verdict": self._verdict, "msg.deliver": self._deliver,
            "msg.hold": self._hold, "msg.reject": self._reject, "rl.config": self._rl_config,
            "rl.consume": self._rl_consume,
        }

    # -- failure bookkeeping ---------------------------------------------------
    def fail(self, verdict: str, index: int, detail: str, dedup: tuple | None = None) -> None:
        if dedup is not None:
            if dedup in self._reported:
                return
            self._reported.add(dedup)
        self.failure_counts[verdict] = self.failure_counts.get(verdict, 0) + 1
        if verdict not in self.failures:
            self.failures[verdict] = {"event_index": index, "tick": self.tick, "detail": detail}

    # -- feeding -----------------------------------------------------------------
    def feed(self, ev: Event) -> None:
        if ev.tick > self.tick:
            self.check_boundary()
            self.tick = ev.tick
        self.index = ev.seq
        handler = self._handlers.get(f"{ev.module}.{ev.op}")
        if handler is not None:
            handler(ev.fields)
            self.dirty = True

    def feed_all(self, events: Iterable[Event]) -> Oracle:
        for ev in events:
            self.feed(ev)
        self.check_boundary()
        return self

    # -- ledgers ---------------------------------------------------------------
    def _scale(self, led: _OLedger) -> tuple[_OFamily, int] | None:
        fam = self.families.get(led.family) if led.family else None
        if fam is None or fam.decimals is None:
            return None
        return fam, 10 ** (fam.decimals - led.decimals)

    def _shift(self, fam: _OFamily, amount: int) -> None:
        if amount == 0:
            return
        was = fam.delta
        fam.delta += amount
        self.dirty = True
        if was == 0:
            fam.streak_start = self.index
        elif fam.delta == 0:
            fam.streak_start = None

    def _deploy(self, f):
        self.ledgers[f["ledger"]] = _OLedger(f["ledger"], f["decimals"], f.get("family"))
        fam = self.families.get(f.get("family"))
        if fam is not None:
            fam.ledgers.append(f["ledger"])
            if fam.decimals is not None and f["decimals"] > fam.decimals:
                self.fail("ledger_consistency", self.index,
                          f"{f['ledger']} raises {fam.name} decimals after genesis")

    def _custodial(self, led: _OLedger, account: str) -> bool:
        fam = self.families.get(led.family) if led.family else None
        return fam is not None and f"{led.key}|{account}" in fam.custodians

    def _mint(self, f):
        led = self.ledgers[f["ledger"]]
        a = f["amount"]
        led.supply += a
        led.balances[f["to"]] = led.balances.get(f["to"], 0) + a
        sc = self._scale(led)
        if sc:
            fam, k = sc
            if fam.mode == "LockUnlock":
                self.fail("mode_rules", self.index, f"supply created in LockUnlock family {fam.name}")
            if not self._custodial(led, f["to"]):
                self._shift(fam, a * k)

    def _burn(self, f):
        led = self.ledgers[f["ledger"]]
        a = f["amount"]
        have = led.balances.get(f["frm"], 0)
        if have < a:
            self.fail("ledger_consistency", self.index, f"burn of {a} from {f['frm']} holding {have}")
        led.supply -= a
        led.balances[f["frm"]] = have - a
        sc = self._scale(led)
        if sc:
            fam, k = sc
            if fam.mode == "LockUnlock":
                self.fail("mode_rules", self.index, f"supply destroyed in LockUnlock family {fam.name}")
            if not self._custodial(led, f["frm"]):
                self._shift(fam, -a * k)

    def _transfer(self, f):
        led = self.ledgers[f["ledger"]]
        a = f["amount"]
        frm, to = f["frm"], f["to"]
        have = led.balances.get(frm, 0)
        if have < a:
            self.fail("ledger_consistency", self.index, f"transfer of {a} from {frm} holding {have}")
        led.balances[frm] = have - a
        led.balances[to] = led.balances.get(to, 0) + a
        sc = self._scale(led)
        if sc:
            fam, k = sc
            c_from, c_to = self._custodial(led, frm), self._custodial(led, to)
            if c_from and not c_to:
                self._shift(fam, a * k)
            elif c_to and not c_from:
                self._shift(fam, -a * k)

    # -- families ----------------------------------------------------------------
    def _start(self, f):
        self.seed = f.get("seed")
        self.name = f.get("name")

    def _family(self, f):
        self.families[f["family"]] = _OFamily(f["family"], f["standard"], f["mode"])

    def _custodian(self, f):
        fam = self.families[f["family"]]
        led = self.ledgers[f["ledger"]]
        if led.balances.get(f["account"], 0):
            self.fail("ledger_consistency", self.index, f"custodian {f['account']} registered with funds")
        fam.custodians.add(f"{f['ledger']}|{f['account']}")

    def _genesis(self, f):
        fam = self.families[f["family"]]
        fam.decimals = max((self.ledgers[k].decimals for k in fam.ledgers), default=0)
        snap = self.snapshot(fam.name)
        fam.baseline = snap.accounted
        fam.genesis_supply = snap.total_supply

    def _mismatch(self, f):
        self.fail("oracle_agreement", self.index,
                  f"module state of {f['family']} disagrees: {', '.join(f['fields'])}")

    # -- transfer records --------------------------------------------------------
    def _fam_scale(self, family: str | None, decimals: int) -> tuple[_OFamily, int] | None:
        fam = self.families.get(family) if family else None
        if fam is None or fam.decimals is None:
            return None
        return fam, 10 ** (fam.decimals - decimals)

    def _debit(self, f):
        self.records[f["msg"]] = [f["family"], f["amount"], f["decimals"], "in_flight"]
        sc = self._fam_scale(f["family"], f["decimals"])
        if sc:
            fam, k = sc
            fam.totals["in_flight"] += f["amount"] * k
            self._shift(fam, f["amount"] * k)

    def _move(self, msg: str, to_state: str | None) -> list | None:
        rec = self.records.get(msg)
        if rec is None or rec[3] not in ("in_flight", "queued"):
            return None
        sc = self._fam_scale(rec[0], rec[2])
        if sc:
            fam, k = sc
            fam.totals[rec[3]] -= rec[1] * k
            if to_state is None:
                self._shift(fam, -rec[1] * k)
            else:
                fam.totals[to_state] += rec[1] * k
        rec[3] = to_state or "credited"
        return rec

    def _queue_in(self, f):
        rec = self.records.get(f["msg"])
        if rec is not None and rec[3] == "in_flight":
            self._move(f["msg"], "queued")

    def _credit(self, f):
        msg = f["msg"]
        om = self.messages.get(msg)
        if om is not None:
            om.credits += 1
            if om.credits > 1:
                self.fail("exactly_once", self.index, f"{msg} credited twice")
        if msg in self.forged or self._move(msg, None) is None:
            self._illegitimate(f["family"], f["amount"], f["decimals"])

    def _illegitimate(self, family, amount, decimals):
        sc = self._fam_scale(family, decimals)
        if sc:
            fam, k = sc
            fam.totals["illegitimate"] += amount * k
            self._shift(fam, -amount * k)
            if fam.first_illegitimate is None and amount:
                fam.first_illegitimate = self.index

    def _strand(self, f):
        self._move(f["msg"], "stranded")

    def _unbacked(self, f):
        self._illegitimate(f["family"], f["amount"], f["decimals"])

    # -- messages ------------------------------------------------------------------
    def _emit(self, f):
        self.messages[f["msg"]] = _OMessage(f["model"], False)
        emitter, nonce = f["emitter"], f["nonce"]
        expected = self.nonces.get(emitter, 0)
        if nonce != expected:
            self.fail("nonce_monotonic", self.index, f"{emitter} nonce {nonce}, expected {expected}")
        self.nonces[emitter] = max(expected, nonce + 1)

    def _forge(self, f):
        self.messages[f["msg"]] = _OMessage(f["model"], True)
        self.forged.add(f["msg"])

    def _attest(self, f):
        om = self.messages.get(f["msg"])
        if om is None:
            self.fail("message_lifecycle", self.index, f"attestation for unknown {f['msg']}")
            return
        if f["verifier"] in om.attesters:
            self.fail("message_lifecycle", self.index, f"duplicate attestation on {f['msg']}")
        om.attesters.add(f["verifier"])

    def _require(self, f, allowed: tuple[str, ...], new: str) -> _OMessage | None:
        om = self.messages.get(f["msg"])
        if om is None:
            self.fail("message_lifecycle", self.index, f"{new} for unknown {f['msg']}")
            return None
        if om.status not in allowed:
            self.fail("message_lifecycle", self.index, f"{f['msg']}: {om.status} -> {new}")
        om.status = new
        return om

    def _verdict(self, f):
        om = self._require(f, ("Emitted",), "Attested")
        if om is not None and not _quorum_from_description(om.model, om.attesters):
            self.fail("quorum_safety", self.index, f"{f['msg']} attested without quorum")

    def _deliver(self, f):
        om = self._require(f, ("Attested", "HeldPaused"), "Delivered")
        if om is None:
            return
        om.delivers += 1
        if om.delivers > 1:
            self.fail("exactly_once", self.index, f"{f['msg']} delivered twice")
        if not _quorum_from_description(om.model, om.attesters):
            self.fail("quorum_safety", self.index, f"{f['msg']} delivered without quorum")

    def _hold(self, f):
        self._require(f, ("Attested", "HeldPaused"), "HeldPaused")

    def _reject(self, f):
        self._require(f, ("Attested", "HeldPaused"), "Rejected")

    # -- rate limits -----------------------------------------------------------------
    def _rl_config(self, f):
        self.limiters[f["limiter"]] = _Limiter(f["limit"], f["window"])

    def _rl_consume(self, f):
        lim = self.limiters.get(f["limiter"])
        if lim is None:
            self.fail("rate_limit_bound", self.index, f"consume on unknown limiter {f['limiter']}")
            return
        # Any run of consumptions i..j within one configuration must satisfy
        #   W * sum(a_i..a_j) <= L*W + L*(t_j - t_i).
        # With P the running prefix sum that is
        #   (W*P_j - L*t_j) - min_i (W*P_{i-1} - L*t_i) <= L*W.
        w, lim_l, t = lim.window, lim.limit, self.tick
        candidate = w * lim.prefix - lim_l * t
        if lim.min_term is None or candidate < lim.min_term:
            lim.min_term = candidate
        lim.prefix += f["amount"]
        if w * lim.prefix - lim_l * t - lim.min_term > lim_l * w:
            self.fail("rate_limit_bound", self.index,
                      f"{f['limiter']} exceeded linear replenishment bound at tick {t}",
                      dedup=("rl", f["limiter"]))

    # -- boundary checks -------------------------------------------------------------
    def check_boundary(self) -> None:
        if self.checked_tick == self.tick and not self.dirty:
            return
        self.checked_tick = self.tick
        for name in sorted(self.families):
            fam = self.families[name]
            if fam.baseline is None:
                continue
            if fam.delta != 0:
                self.fail("conservation", fam.streak_start,
                          f"accounting: {name} identity off by {fam.delta}",
                          dedup=("acct", name, fam.streak_start))
            elif fam.first_illegitimate is not None:
                self.fail("conservation", fam.first_illegitimate,
                          f"illegitimate mint: {name} holds {fam.totals['illegitimate']} "
                          "base units minted without backing", dedup=("illegit", name))
            if fam.standard == "superchain" and fam.custodians:
                self.fail("mode_rules", self.index, f"{name} has custodians", dedup=("sc", name))
        self.dirty = False

    def snapshot(self, family: str) -> SupplySnapshot:
        fam = self.families[family]
        base = fam.decimals if fam.decimals is not None else max(
            (self.ledgers[k].decimals for k in fam.ledgers), default=0)
        scales = {k: 10 ** (base - self.ledgers[k].decimals) for k in fam.ledgers}
        custody = {}
        for key in sorted(fam.custodians):
            led_key, account = key.split("|", 1)
            custody[key] = self.ledgers[led_key].balances.get(account, 0) * scales[led_key]
        if fam.decimals is None:
            totals = dict.fromkeys(STATES, 0)
            for fam_name, amount, dec, state in self.records.values():
                if fam_name == family and state in totals:
                    totals[state] += amount * 10 ** (base - dec)
        else:
            totals = fam.totals
        return SupplySnapshot(family, fam.standard, fam.mode, base, fam.baseline,
                              fam.genesis_supply, {k: self.ledgers[k].supply for k in fam.ledgers},
                              custody, totals["in_flight"], totals["queued"], totals["stranded"],
                              totals["illegitimate"], scales)

    def snapshots(self) -> dict[str, SupplySnapshot]:
        return {name: self.snapshot(name) for name in sorted(self.families)}

    # -- report ------------------------------------------------------------------------
    def report(self, name: str | None = None) -> InvariantReport:
        self.check_boundary()
        verdicts = {}
        for v in VERDICTS:
            if v in self.failures:
                verdicts[v] = {"status": "fail", "seed": self.seed, "count": self.failure_counts[v],
                               **self.failures[v]}
            else:
                verdicts[v] = {"status": "pass"}
        families = {}
        for fname, snap in self.snapshots().items():
            status, kind = check_conservation(snap.standard, snap.mode, snap)
            families[fname] = {
                "standard": snap.standard, "mode": snap.mode, "decimals": snap.decimals,
                "baseline": snap.baseline, "circulating": snap.circulating,
                "locked": snap.locked, "in_flight": snap.in_flight, "queued": snap.queued,
                "stranded": snap.stranded, "illegitimate": snap.illegitimate,
                "verdict": status if kind is None else f"{status}: {kind}",
            }
        census = dict.fromkeys(("Emitted", "Attested", "Delivered", "Rejected", "HeldPaused"), 0)
        forged_delivered = 0
        forged_blocked = 0
        for om in self.messages.values():
            if om.forged:
                forged_delivered += om.status == "Delivered"
                forged_blocked += om.status == "Emitted"
            else:
                census[om.status] += 1
        census["stalled"] = census.pop("Emitted")
        census["forged"] = len(self.forged)
        census["forged_delivered"] = forged_delivered
        census["forged_blocked"] = forged_blocked
        return InvariantReport(name=name or self.name or "run",
                               seeds=[self.seed] if self.seed is not None else [],
                               events=self.index + 1, ticks=self.tick, verdicts=verdicts,
                               families=families, census=census)


def oracle_replay(events: Iterable[Event]) -> list[tuple[int, dict[str, SupplySnapshot]]]:
    """Snapshots of every family at each tick boundary, from events alone."""
    oracle = Oracle()
    out: list[tuple[int, dict[str, SupplySnapshot]]] = []
    current = None
    for ev in events:
        if current is not None and ev.tick > current:
            out.append((current, oracle.snapshots()))
        current = ev.tick
        oracle.feed(ev)
    out.append((current if current is not None else 0, oracle.snapshots()))
    return out


def build_report(events: Iterable[Event], name: str | None = None) -> InvariantReport:
    return Oracle().feed_all(events).report(name)


@dataclass
class InvariantReport:
    name: str
    seeds: list[int]
    events: int
    ticks: int
    verdicts: dict[str, dict[str, Any]]
    families: dict[str, dict[str, Any]]
    census: dict[str, int]

    @property
    def passed(self) -> bool:
        return all(v["status"] == "pass" for v in self.verdicts.values())

    def failures(self) -> dict[str, dict[str, Any]]:
        return {k: v for k, v in self.verdicts.items() if v["status"] != "pass"}

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> InvariantReport:
        return cls(**d)

    def merge(self, other: InvariantReport) -> InvariantReport:
        """Combine two reports; associative and independent of order."""
        verdicts = {}
        for key in sorted(set(self.verdicts) | set(other.verdicts)):
            a = self.verdicts.get(key, {"status": "pass"})
            b = other.verdicts.get(key, {"status": "pass"})
            fails = [v for v in (a, b) if v["status"] != "pass"]
            if not fails:
                verdicts[key] = {"status": "pass"}
                continue
            first = min(fails, key=lambda v: (v.get("seed") if v.get("seed") is not None else -1,
                                             v["event_index"] if v.get("event_index") is not None else -1,
                                             v.get("detail", "")))
            verdicts[key] = {**first, "count": sum(v.get("count", 1) for v in fails)}
        families: dict[str, dict[str, Any]] = {}
        for src in (self.families, other.families):
            for fname, row in src.items():
                acc = families.get(fname)
                if acc is None:
                    families[fname] = dict(row)
                    continue
                for k in ("circulating", "locked", "in_flight", "queued", "stranded",
                          "illegitimate", "baseline"):
                    if acc.get(k) is not None and row.get(k) is not None:
                        acc[k] += row[k]
                if row["verdict"] != "pass":
                    acc["verdict"] = min(acc["verdict"], row["verdict"]) if acc["verdict"] != "pass" \
                        else row["verdict"]
        census = {k: self.census.get(k, 0) + other.census.get(k, 0)
                  for k in sorted(set(self.census) | set(other.census))}
        name = "+".join(sorted(set(self.name.split("+")) | set(other.name.split("+"))))
        return InvariantReport(name, sorted(self.seeds + other.seeds), self.events + other.events,
                               max(self.ticks, other.ticks), verdicts, families, census)


class Harness:
    """Attaches an incremental oracle to a live simulation."""

    def __init__(self, sim: Simulation, compare_every_boundary: bool = True):
        self.sim = sim
        self.oracle = Oracle()
        self.compare_every_boundary = compare_every_boundary
        for ev in sim.events:
            self.oracle.feed(ev)
        sim.listeners.append(self.oracle.feed)
        sim.boundary_hooks.append(self._boundary)
        sim.log("harness", "start", seed=sim.seed, name=sim.name)
        self._mismatched: set[str] = set()

    def _boundary(self, sim: Simulation) -> None:
        dirty = self.oracle.dirty
        self.oracle.check_boundary()
        if dirty and self.compare_every_boundary:
            self.compare()

    def compare(self) -> None:
        for name in sorted(self.sim.families):
            fam = self.sim.families[name]
            if fam.baseline is None or name in self._mismatched:
                continue
            mine = module_snapshot(self.sim, name).comparable()
            theirs = self.oracle.snapshot(name).comparable()
            if mine != theirs:
                diff = sorted(k for k in mine if mine[k] != theirs[k])
                self._mismatched.add(name)
                self.sim.log("harness", "mismatch", family=name, fields=diff)

    def report(self) -> InvariantReport:
        self.compare()
        return self.oracle.report(self.sim.name)


def run_property_campaign(config, seed: int, n_ops: int) -> InvariantReport:
    """Randomized campaign of ``n_ops`` operations over a deployment config."""
    from .workload import run_campaign

    return run_campaign(config, seed, n_ops).report
