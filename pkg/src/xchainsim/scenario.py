"""Scenario files: YAML in, deterministic run out.

A scenario names a topology, the token families to deploy, and a list of
steps. Each step's outcome is written to the event log, and the run report
is computed from that log alone, which is what lets ``replay`` rebuild the
report byte for byte.

Example::

    name: smoke
    seed: 7
    chains:
      - {label: ethereum, block_interval: 12, is_ethereum: true}
      - {label: optimism, block_interval: 2, superchain: true}
      - {label: base, block_interval: 2, superchain: true}
    families:
      - {name: SB, standard: superchain}
    steps:
      - {op: transfer, family: SB, src: optimism, dst: base, from: alice, to: bob, amount: 100}
      - {op: settle}
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import yaml

from .cct import CctFeeConfig
from .deploy import (MODES, BridgeSpec, ChainSpec, DvnSpec, FamilySpec, World, WorldConfig,
                     all_standards_config)
from .errors import ConfigError, SimulationError
from .harness import InvariantReport, Oracle
from .messaging import DvnSet
from .oft import OftFeeConfig
from .sim import Event


# -- schema -------------------------------------------------------------------
class SchemaError(ConfigError):
    """A scenario file does not match the schema; the message names the field."""


def _kind(value: Any) -> str:
    return type(value).__name__


def _check(value: Any, expected, path: str):
    if expected is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise SchemaError(f"{path}: expected an integer, got {_kind(value)}")
    if expected is bool and not isinstance(value, bool):
        raise SchemaError(f"{path}: expected true/false, got {_kind(value)}")
    if expected is str and not isinstance(value, str):
        raise SchemaError(f"{path}: expected a string, got {_kind(value)}")
    if expected is list and not isinstance(value, list):
        raise SchemaError(f"{path}: expected a list, got {_kind(value)}")
    if expected is dict and not isinstance(value, dict):
        raise SchemaError(f"{path}: expected a mapping, got {_kind(value)}")
    return value


def _fraction(value: Any, path: str) -> Fraction:
    try:
        if isinstance(value, bool):
            raise ValueError
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"{path}: expected a ratio like 5/10000, got {value!r}") from None


def _mapping(raw: Any, path: str, allowed: dict[str, Callable[[Any, str], Any]],
             required: tuple[str, ...] = ()) -> dict[str, Any]:
    _check(raw, dict, path)
    for key in raw:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}: unknown field (allowed: {', '.join(sorted(allowed))})")
    for key in required:
        if key not in raw:
            raise SchemaError(f"{path}.{key}: required field missing")
    return {k: allowed[k](v, f"{path}.{k}") for k, v in raw.items()}


def _t(expected):
    return lambda v, p: _check(v, expected, p)


def _str_list(v, p):
    _check(v, list, p)
    for i, item in enumerate(v):
        _check(item, str, f"{p}[{i}]")
    return list(v)


def _decimals(v, p):
    if isinstance(v, dict):
        return {k: _check(x, int, f"{p}.{k}") for k, x in v.items()}
    return _check(v, int, p)


def _opt_int(v, p):
    return None if v is None else _check(v, int, p)


def _chain(raw, path) -> ChainSpec:
    d = _mapping(raw, path, {"label": _t(str), "block_interval": _t(int),
                             "is_ethereum": _t(bool), "superchain": _t(bool)}, ("label",))
    return ChainSpec(**d)


def _bridge(raw, path) -> BridgeSpec:
    d = _mapping(raw, path, {"name": _t(str), "fee_rate": _fraction, "latency": _opt_int},
                 ("name",))
    return BridgeSpec(**d)


def _family(raw, path) -> FamilySpec:
    d = _mapping(raw, path, {
        "name": _t(str), "standard": _t(str), "mode": _t(str), "chains": _str_list,
        "native": _t(str), "decimals": _decimals, "balance": _t(int), "limit": _opt_int,
        "window": _t(int), "latency": _opt_int, "liquidity": _t(int),
        "shared_decimals": _t(int), "transceivers": _t(int),
        "oft_fees": lambda v, p: OftFeeConfig(**_mapping(v, p, {
            "base_fee": _t(int), "per_byte": _t(int), "dst_gas": _t(int),
            "fee_switch": _t(bool), "protocol_fee": _t(int)})),
        "dvn": lambda v, p: DvnSpec(**_mapping(v, p, {
            "required": _str_list, "optional": _str_list, "threshold": _t(int)})),
        "bridges": lambda v, p: [_bridge(b, f"{p}[{i}]") for i, b in enumerate(_check(v, list, p))],
        "cct_fees": lambda v, p: CctFeeConfig(**_mapping(v, p, {
            "pct_non_link": _fraction, "pct_link": _fraction, "fixed_fee_default": _fraction,
            "fixed_fee_ethereum_lane": _fraction, "link_discount": _fraction})),
    }, ("name", "standard"))
    return FamilySpec(**d)


# step op -> (allowed fields, required fields)
STEP_SCHEMA: dict[str, tuple[dict[str, Callable], tuple[str, ...]]] = {
    "transfer": ({"family": _t(str), "src": _t(str), "dst": _t(str), "from": _t(str),
                  "to": _t(str), "amount": _t(int), "bridge": _t(str), "pay_in_link": _t(bool),
                  "min_amount": _t(int)},
                 ("family", "src", "dst", "from", "to", "amount")),
    "local_transfer": ({"family": _t(str), "chain": _t(str), "from": _t(str), "to": _t(str),
                        "amount": _t(int)}, ("family", "chain", "from", "to", "amount")),
    "advance": ({"ticks": _t(int)}, ("ticks",)),
    "until": ({"tick": _t(int)}, ("tick",)),
    "settle": ({"extra": _t(int)}, ()),
    "pause": ({"family": _t(str), "chain": _t(str)}, ("family", "chain")),
    "unpause": ({"family": _t(str), "chain": _t(str)}, ("family", "chain")),
    "set_limit": ({"family": _t(str), "chain": _t(str), "limit": _t(int)},
                  ("family", "chain", "limit")),
    "set_latency": ({"channel": _t(str), "ticks": _t(int), "src": _t(str), "dst": _t(str)},
                    ("channel", "ticks")),
    "compromise": ({"verifiers": _str_list, "withholding": _t(bool), "at": _t(int)},
                   ("verifiers",)),
    "restore": ({"verifiers": _str_list}, ("verifiers",)),
    "forge": ({"family": _t(str), "src": _t(str), "dst": _t(str), "to": _t(str),
               "amount": _t(int), "verifiers": _str_list}, ("family", "src", "dst", "to", "amount",
                                                            "verifiers")),
    "configure_dvn": ({"family": _t(str), "chain": _t(str), "required": _str_list,
                       "optional": _str_list, "threshold": _t(int)},
                      ("family", "required", "optional", "threshold")),
    "ntt_complete": ({"family": _t(str), "chain": _t(str), "sequence": _t(int), "by": _t(str)},
                     ("family", "chain", "sequence")),
    "ntt_complete_inbound": ({"family": _t(str), "chain": _t(str)}, ("family", "chain")),
    "ntt_cancel": ({"family": _t(str), "chain": _t(str), "sequence": _t(int), "by": _t(str)},
                   ("family", "chain", "sequence", "by")),
    "lockbox_deposit": ({"family": _t(str), "user": _t(str), "amount": _t(int)},
                        ("family", "user", "amount")),
    "lockbox_withdraw": ({"family": _t(str), "user": _t(str), "amount": _t(int)},
                         ("family", "user", "amount")),
    "campaign": ({"ops": _t(int)}, ("ops",)),
}


def _step(raw, path) -> dict[str, Any]:
    _check(raw, dict, path)
    op = raw.get("op")
    if op is None:
        raise SchemaError(f"{path}.op: required field missing")
    if op not in STEP_SCHEMA:
        raise SchemaError(f"{path}.op: unknown operation {op!r} "
                          f"(known: {', '.join(sorted(STEP_SCHEMA))})")
    allowed, required = STEP_SCHEMA[op]
    body = {k: v for k, v in raw.items() if k not in ("op", "expect_error")}
    d = _mapping(body, path, allowed, required)
    d["op"] = op
    if "expect_error" in raw:
        d["expect_error"] = _check(raw["expect_error"], str, f"{path}.expect_error")
    return d


@dataclass
class ScenarioConfig:
    world: WorldConfig
    steps: list[dict[str, Any]] = field(default_factory=list)
    seed: int = 0
    probes: bool = False

    @property
    def name(self) -> str:
        return self.world.name


WORLD_KEYS = {"name": _t(str), "seed": _t(int), "latency": _t(int), "users": _str_list,
              "auto_relay": _t(bool), "guardians": _t(int), "guardian_threshold": _t(int),
              "don_committee": _t(int), "don_threshold": _t(int), "probes": _t(bool),
              "preset": _t(str), "chains": _t(list), "families": _t(list), "steps": _t(list)}


def parse_scenario(data: Any, source: str = "scenario") -> ScenarioConfig:
    d = _mapping(data if data is not None else {}, source, WORLD_KEYS, ("name",))
    preset = d.pop("preset", None)
    if preset is not None:
        if preset != "all-standards":
            raise SchemaError(f"{source}.preset: unknown preset {preset!r} (known: all-standards)")
        world = all_standards_config(d["name"])
    else:
        world = WorldConfig(d["name"])
    if "chains" in d:
        world.chains = [_chain(c, f"{source}.chains[{i}]") for i, c in enumerate(d["chains"])]
    if "families" in d:
        world.families = [_family(f, f"{source}.families[{i}]") for i, f in enumerate(d["families"])]
    for key in ("latency", "users", "auto_relay", "guardians", "guardian_threshold",
                "don_committee", "don_threshold"):
        if key in d:
            setattr(world, key, d[key])
    if not world.chains:
        raise SchemaError(f"{source}.chains: at least two chains are required")
    steps = [_step(s, f"{source}.steps[{i}]") for i, s in enumerate(d.get("steps", []))]
    validate(world, steps, source)
    return ScenarioConfig(world, steps, d.get("seed", 0), d.get("probes", False))


def validate(world: WorldConfig, steps: list[dict[str, Any]], source: str = "scenario") -> None:
    """Resolve every cross reference before anything runs."""
    if world.guardian_threshold < 1 or world.guardian_threshold > world.guardians:
        raise SchemaError(f"{source}.guardian_threshold: {world.guardian_threshold} is not "
                          f"within 1..{world.guardians} guardians")
    if world.don_threshold < 1 or world.don_threshold > world.don_committee:
        raise SchemaError(f"{source}.don_threshold: {world.don_threshold} is not "
                          f"within 1..{world.don_committee} committee members")
    labels = [c.label for c in world.chains]
    if len(set(labels)) != len(labels):
        raise SchemaError(f"{source}.chains: duplicate chain label")
    members = {c.label for c in world.chains if c.superchain}
    fam_chains: dict[str, set[str]] = {}
    for i, fam in enumerate(world.families):
        path = f"{source}.families[{i}]"
        if fam.standard not in MODES:
            raise SchemaError(f"{path}.standard: unknown standard {fam.standard!r} "
                              f"(known: {', '.join(MODES)})")
        if fam.mode not in MODES[fam.standard]:
            raise SchemaError(f"{path}.mode: {fam.standard} has no {fam.mode} mode "
                              f"(allowed: {', '.join(MODES[fam.standard])})")
        if fam.name in fam_chains:
            raise SchemaError(f"{path}.name: duplicate family {fam.name!r}")
        for j, c in enumerate(fam.chains):
            if c not in labels:
                raise SchemaError(f"{path}.chains[{j}]: unknown chain {c!r}")
        chains = set(fam.chains) or (members if fam.standard == "superchain" else set(labels))
        if fam.standard == "superchain" and not chains <= members:
            raise SchemaError(f"{path}.chains: {', '.join(sorted(chains - members))} "
                              f"not in the Superchain")
        if fam.native is not None and fam.native not in chains:
            raise SchemaError(f"{path}.native: {fam.native!r} is not one of the family's chains")
        if isinstance(fam.decimals, dict):
            for c in fam.decimals:
                if c not in labels:
                    raise SchemaError(f"{path}.decimals.{c}: unknown chain")
        if fam.standard == "oft":
            dvn = fam.dvn
            if dvn.threshold > len(dvn.optional) or (dvn.threshold < 1 and not dvn.required):
                raise SchemaError(f"{path}.dvn.threshold: {dvn.threshold} with "
                                  f"{len(dvn.optional)} optional verifiers")
        fam_chains[fam.name] = chains
    for i, step in enumerate(steps):
        path = f"{source}.steps[{i}]"
        fam = step.get("family")
        if fam is not None and fam not in fam_chains:
            raise SchemaError(f"{path}.family: unknown family {fam!r}")
        for key in ("chain", "src", "dst"):
            if key not in step:
                continue
            if step[key] not in labels:
                raise SchemaError(f"{path}.{key}: unknown chain {step[key]!r}")
            if fam is not None and step[key] not in fam_chains[fam]:
                raise SchemaError(f"{path}.{key}: family {fam} is not deployed on {step[key]}")
        if step["op"] == "set_latency" and step["ticks"] < 0:
            raise SchemaError(f"{path}.ticks: must not be negative")
        if step["op"] in ("advance", "settle", "campaign"):
            key = {"advance": "ticks", "settle": "extra", "campaign": "ops"}[step["op"]]
            if step.get(key, 0) < 0:
                raise SchemaError(f"{path}.{key}: must not be negative")


def load_scenario(path_or_name: str) -> ScenarioConfig:
    """Load a scenario from a file path or by bundled name."""
    path = Path(path_or_name)
    if path.exists():
        text, source = path.read_text(), path.name
    else:
        bundled = resources.files("xchainsim") / "scenarios" / f"{path_or_name}.yaml"
        if not bundled.is_file():
            raise ConfigError(f"no scenario file or bundled scenario named {path_or_name!r}")
        text, source = bundled.read_text(), f"{path_or_name}.yaml"
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError(f"{source}: invalid YAML: {exc}") from None
    return parse_scenario(data, source)


def bundled_scenarios() -> list[str]:
    root = resources.files("xchainsim") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


# -- running ------------------------------------------------------------------
def _run_step(world: World, step: dict[str, Any], seed: int) -> Any:
    sim = world.sim
    op = step["op"]
    fam = world.family(step["family"]) if "family" in step else None
    chain = sim.chain(step["chain"]) if "chain" in step else None
    if op == "transfer":
        extra = {k: step[k] for k in ("bridge", "pay_in_link") if k in step}
        if "min_amount" in step:
            extra["min_amount"] = step["min_amount"]
        return world.transfer(step["family"], step["src"], step["dst"], step["from"], step["to"],
                              step["amount"], **extra)
    if op == "local_transfer":
        fam.ledgers[chain].transfer(world.user(step["from"], chain), world.user(step["to"], chain),
                                    step["amount"])
    elif op == "advance":
        sim.advance_tick(step["ticks"])
    elif op == "until":
        sim.run_until(step["tick"])
    elif op == "settle":
        world.settle(step.get("extra", 0))
    elif op == "pause":
        fam.pause(chain)
    elif op == "unpause":
        fam.unpause(chain)
    elif op == "set_limit":
        fam.set_limit(chain, step["limit"])
    elif op == "set_latency":
        src = sim.chain(step["src"]) if "src" in step else None
        dst = sim.chain(step["dst"]) if "dst" in step else None
        sim.messages.set_latency(step["channel"], step["ticks"], src, dst)
    elif op == "compromise":
        for vid in step["verifiers"]:
            sim.messages.compromise_verifier(vid, step.get("at"), step.get("withholding", False))
    elif op == "restore":
        for vid in step["verifiers"]:
            sim.messages.restore_verifier(vid)
    elif op == "forge":
        src, dst = sim.chain(step["src"]), sim.chain(step["dst"])
        return fam.forge(src, dst, world.user(step["to"], dst), step["amount"], step["verifiers"])
    elif op == "configure_dvn":
        where = chain or fam.native
        model = DvnSet(frozenset(step["required"]), frozenset(step["optional"]), step["threshold"])
        fam.receiver(where).set_dvn_config(fam.owner(where), model)
    elif op == "ntt_complete":
        mgr = fam.managers[chain]
        caller = world.user(step.get("by", "keeper"), chain)
        return mgr.complete_outbound_queued_transfer(caller, step["sequence"])
    elif op == "ntt_complete_inbound":
        mgr = fam.managers[chain]
        for digest in sorted(mgr.inbound_queue):
            mgr.complete_inbound_queued_transfer(digest)
    elif op == "ntt_cancel":
        return fam.managers[chain].cancel_outbound_queued_transfer(
            world.user(step["by"], chain), step["sequence"])
    elif op == "lockbox_deposit":
        fam.lockbox.deposit(world.user(step["user"], fam.native), step["amount"])
    elif op == "lockbox_withdraw":
        fam.lockbox.withdraw(world.user(step["user"], fam.native), step["amount"])
    elif op == "campaign":
        from .workload import Workload

        Workload(world, seed).run(step["ops"])
    return None


def _describe(result: Any) -> dict[str, Any]:
    if result is None:
        return {}
    if isinstance(result, tuple):  # CCT: (message, fee)
        return {"msg": result[0].msg_id, "fee": str(result[1])}
    if hasattr(result, "queued_tick"):
        return {"queued_sequence": result.key}
    if hasattr(result, "msg_id"):
        return {"msg": result.msg_id}
    if isinstance(result, int):
        return {"value": result}
    return {}


def run_scenario(config: ScenarioConfig, seed: int | None = None,
                 probes: bool | None = None) -> tuple[RunReport, list[Event]]:
    seed = config.seed if seed is None else seed
    world = World(config.world, seed)
    sim = world.sim
    for i, step in enumerate(config.steps):
        expected = step.get("expect_error")
        try:
            result = _run_step(world, step, seed)
        except SimulationError as exc:
            err = type(exc).__name__
            status = "expected_error" if expected in (err, "any") else "error"
            sim.log("scenario", "step", index=i, action=step["op"], status=status, error=err,
                    reason=str(exc))
        else:
            status = "ok" if expected is None else "missing_error"
            sim.log("scenario", "step", index=i, action=step["op"], status=status, **_describe(result))
    sim.finish()
    world.harness.compare()
    if probes if probes is not None else config.probes:
        from .matrix import log_probe_results, run_probes

        log_probe_results(sim, run_probes())
    events = list(sim.events)
    return build_run_report(events, config.name), events


# -- reports ------------------------------------------------------------------
SUPERCHAIN_NOTE = ("superchain: pre-production, cross-chain transfers follow the published "
                   "interop design, which is not yet live")

@dataclass
class RunReport:
    name: str
    seed: int | None
    passed: bool
    invariants: dict[str, Any]
    transfers: dict[str, Any]
    records: list[dict[str, Any]]
    latency: dict[str, Any]
    fees: dict[str, Any]
    steps: list[dict[str, Any]]
    probes: dict[str, Any] | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> RunReport:
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        """Short human-readable digest of the run."""
        inv = self.invariant_report
        lines = [f"scenario {self.name} (seed {self.seed}): {'PASS' if self.passed else 'FAIL'}"]
        for verdict, v in sorted(inv.verdicts.items()):
            detail = "" if v["status"] == "pass" else f"  {v.get('detail', '')}"
            lines.append(f"  {verdict:<20} {v['status']}{detail}")
        t = self.transfers
        by = ", ".join(f"{k}={n}" for k, n in t["by_status"].items()) or "none"
        lines.append(f"  transfers: {t['requested']} requested ({by})")
        census = inv.census
        if census.get("forged"):
            lines.append(f"  forged messages: {census['forged']} ({census['forged_delivered']} "
                         f"delivered, {census['forged_blocked']} blocked below quorum)")
        if t["illegitimate_credits"] or t["unbacked_mints"]:
            lines.append(f"  illegitimate credits: {t['illegitimate_credits']}, "
                         f"unbacked mints: {t['unbacked_mints']}")
        for std, s in self.latency.items():
            lines.append(f"  latency {std}: {s['matching']}/{s['direct']} direct deliveries at the "
                         f"route latency, {s['detoured']} held or queued")
        for std, comps in self.fees.items():
            parts = ", ".join(f"{c}={a} {cur}" for c, by_cur in comps.items()
                              for cur, a in by_cur.items())
            lines.append(f"  fees {std}: {parts}")
        bad = [s for s in self.steps if s["status"] in ("missing_error",)]
        if bad:
            lines.append(f"  {len(bad)} step(s) expected an error that did not happen")
        if self.probes is not None:
            ok = "matches" if self.probes.get("matches_table") else "DOES NOT match"
            lines.append(f"  capability matrix {ok} the reference table")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)

    @property
    def invariant_report(self) -> InvariantReport:
        return InvariantReport.from_dict(self.invariants)


def account_fees(events: list[Event]) -> dict[str, dict[str, dict[str, str]]]:
    """Sum of charged fees: standard -> component -> currency -> exact ratio string."""
    sums: dict[tuple[str, str, str], Fraction] = {}
    for ev in events:
        if ev.module == "fee" and ev.op == "charge":
            f = ev.fields
            key = (f["standard"], f["component"], f["currency"])
            sums[key] = sums.get(key, Fraction(0)) + Fraction(f["amount"])
    out: dict[str, dict[str, dict[str, str]]] = {}
    for (std, comp, cur), total in sorted(sums.items()):
        out.setdefault(std, {}).setdefault(comp, {})[cur] = str(total)
    return out


def transfer_latencies(events: list[Event]) -> dict[str, Any]:
    """Per standard: how long completed transfers took against the route's latency."""
    request_std: dict[str, str] = {}
    emitted: dict[str, tuple[int, int, str | None]] = {}
    msg_tid: dict[str, str] = {}
    detoured: set[str] = set()
    stats: dict[str, dict[str, Any]] = {}
    for ev in events:
        name, f = ev.name, ev.fields
        if name == "xfer.request":
            request_std[f["tid"]] = f["standard"]
        elif name == "xfer.debit" and f.get("tid"):
            msg_tid[f["msg"]] = f["tid"]
        elif name == "msg.emit":
            emitted[f["msg"]] = (ev.tick, f["latency"], f["dst"])
        elif name in ("msg.hold", "xfer.queue_in", "superchain.inbox"):
            detoured.add(f["msg"])
        elif name == "xfer.credit" and f["msg"] in msg_tid and f["msg"] in emitted:
            std = request_std[msg_tid[f["msg"]]]
            tick, configured, dst = emitted[f["msg"]]
            s = stats.setdefault(std, {"completed": 0, "direct": 0, "matching": 0, "detoured": 0,
                                       "observed": {}})
            s["completed"] += 1
            if f["msg"] in detoured:
                s["detoured"] += 1
                continue
            s["direct"] += 1
            took = ev.tick - tick
            s["matching"] += took == configured
            key = f"{dst}:{took}"
            s["observed"][key] = s["observed"].get(key, 0) + 1
    return {k: stats[k] for k in sorted(stats)}


def transfer_records(events: list[Event]) -> list[dict[str, Any]]:
    """One record per transfer request, in request order."""
    records: dict[str, dict[str, Any]] = {}
    by_msg: dict[str, dict[str, Any]] = {}
    for ev in events:
        name, f = ev.name, ev.fields
        if name == "xfer.request":
            records[f["tid"]] = {"tid": f["tid"], "standard": f["standard"], "family": f["family"],
                                 "src": f["src"], "dst": f["dst"], "amount": f["amount"],
                                 "request_tick": ev.tick, "emit_tick": None, "deliver_tick": None,
                                 "status": "requested", "fees": {}}
        elif name == "xfer.fail" and f["tid"] in records:
            records[f["tid"]]["status"] = f"failed:{f['error']}"
        elif name == "xfer.queue_out" and f.get("tid") in records:
            records[f["tid"]]["status"] = "queued_outbound"
        elif name == "xfer.cancel" and f.get("tid") in records:
            records[f["tid"]]["status"] = "cancelled"
        elif name == "xfer.debit" and f.get("tid") in records:
            rec = records[f["tid"]]
            rec.update(msg=f["msg"], emit_tick=ev.tick, status="in_flight")
            by_msg[f["msg"]] = rec
        elif name == "fee.charge" and f["tid"] in records:
            fees = records[f["tid"]]["fees"]
            key = f"{f['component']}:{f['currency']}"
            fees[key] = str(Fraction(fees.get(key, 0)) + Fraction(f["amount"]))
        elif f.get("msg") in by_msg:
            rec = by_msg[f["msg"]]
            if name == "xfer.credit":
                rec.update(deliver_tick=ev.tick, status="delivered")
            elif name == "xfer.strand":
                rec["status"] = "stranded"
            elif name == "xfer.queue_in":
                rec["status"] = "queued_inbound"
            elif name == "msg.hold":
                rec["status"] = "held_paused"
    return list(records.values())


def transfer_census(records: list[dict[str, Any]], events: list[Event]) -> dict[str, Any]:
    status: dict[str, int] = {}
    for rec in records:
        status[rec["status"]] = status.get(rec["status"], 0) + 1
    debited = {rec["msg"] for rec in records if "msg" in rec}
    illegitimate = sum(1 for ev in events if ev.name == "xfer.credit"
                       and ev.fields["msg"] not in debited)
    unbacked = sum(1 for ev in events if ev.name == "xfer.unbacked")
    return {"requested": len(records), "by_status": dict(sorted(status.items())),
            "illegitimate_credits": illegitimate, "unbacked_mints": unbacked}


def build_run_report(events: list[Event], name: str | None = None) -> RunReport:
    """Everything in the report comes from the event log."""
    oracle = Oracle()
    steps = []
    probes = None
    for ev in events:
        oracle.feed(ev)
        if ev.module == "scenario" and ev.op == "step":
            steps.append(dict(ev.fields))
        elif ev.module == "probe" and ev.op == "matrix":
            probes = ev.fields
    inv = oracle.report(name)
    records = transfer_records(events)
    notes = []
    if any(row["standard"] == "superchain" for row in inv.families.values()):
        notes.append(SUPERCHAIN_NOTE)
    return RunReport(
        name=inv.name, seed=oracle.seed,
        passed=inv.passed and (probes is None or probes.get("matches_table", False)),
        invariants=inv.to_dict(), transfers=transfer_census(records, events), records=records,
        latency=transfer_latencies(events), fees=account_fees(events), steps=steps, probes=probes,
        notes=notes)
