"""Chains, addresses and per-chain token ledgers.

Every balance is an unsigned integer in the token's smallest unit. Arithmetic
is checked against the uint256 range; leaving it raises instead of wrapping.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

from .errors import AmountOverflow, ConfigError, InsufficientBalance, Unauthorized

if TYPE_CHECKING:
    from .sim import Simulation

UINT256_MAX = 2**256 - 1


def check_amount(amount: int) -> int:
    if isinstance(amount, bool) or not isinstance(amount, int):
        raise TypeError(f"amount must be int, got {type(amount).__name__}")
    if amount < 0 or amount > UINT256_MAX:
        raise AmountOverflow(f"amount {amount} outside uint256")
    return amount


@dataclass(frozen=True)
class ChainId:
    id: int
    label: str
    block_interval: int = 1

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Address:
    """An account or contract on one chain.

    ``value`` is always 32 bytes so that payload encodings round-trip exactly.
    Two addresses on different chains may share a value; that is how
    deterministic deployments are expressed.
    """

    chain: ChainId
    value: bytes

    def __post_init__(self):
        if len(self.value) != 32:
            raise ValueError("address value must be 32 bytes")

    @classmethod
    def named(cls, chain: ChainId, name: str) -> Address:
        raw = name.encode()
        if len(raw) > 32:
            raise ValueError(f"name too long for an address: {name!r}")
        return cls(chain, raw.ljust(32, b"\0"))

    @property
    def name(self) -> str:
        return value_name(self.value)

    def on(self, chain: ChainId) -> Address:
        """Same value, other chain."""
        return Address(chain, self.value)

    def __str__(self) -> str:
        return f"{self.chain.label}/{self.name}"


@lru_cache(maxsize=4096)
def value_name(value: bytes) -> str:
    stripped = value.rstrip(b"\0")
    try:
        text = stripped.decode()
    except UnicodeDecodeError:
        return "0x" + value.hex()
    if text.isprintable() and not text.startswith("0x") and b"\0" not in stripped:
        return text
    return "0x" + value.hex()


class TokenLedger:
    """Balance table for one token on one chain."""

    def __init__(self, sim: Simulation, token_id: str, chain: ChainId, decimals: int,
                 family: str | None = None):
        if not 0 <= decimals <= 77:
            raise ConfigError(f"unsupported decimals {decimals}")
        self.sim = sim
        self.token_id = token_id
        self.chain = chain
        self.decimals = decimals
        self.family = family
        self.key = f"{token_id}@{chain.label}"
        self.balances: dict[Address, int] = {}
        self.total_supply = 0
        self.authorized_adjusters: set[Address] = set()

    def __repr__(self) -> str:
        return f"TokenLedger({self.key}, supply={self.total_supply})"

    def balance_of(self, account: Address) -> int:
        return self.balances.get(account, 0)

    def _own(self, account: Address) -> None:
        if account.chain != self.chain:
            raise ConfigError(f"{account} is not on {self.chain.label}")

    def authorize(self, adjuster: Address) -> None:
        self.authorized_adjusters.add(adjuster)
        self.sim.log("chain", "authorize", ledger=self.key, adjuster=str(adjuster))

    def revoke(self, adjuster: Address) -> None:
        self.authorized_adjusters.discard(adjuster)
        self.sim.log("chain", "revoke", ledger=self.key, adjuster=str(adjuster))

    def transfer(self, frm: Address, to: Address, amount: int) -> None:
        check_amount(amount)
        self._own(frm)
        self._own(to)
        have = self.balances.get(frm, 0)
        if have < amount:
            raise InsufficientBalance(f"{frm} holds {have} < {amount}")
        if amount == 0:
            return
        after = self.balances.get(to, 0) + amount
        if frm != to and after > UINT256_MAX:
            raise AmountOverflow("balance overflow")
        self.balances[frm] = have - amount
        self.balances[to] = self.balances.get(to, 0) + amount
        self.sim.log("chain", "transfer", ledger=self.key, frm=str(frm), to=str(to), amount=amount)

    def mint(self, caller: Address, to: Address, amount: int) -> None:
        if caller not in self.authorized_adjusters:
            raise Unauthorized(f"unauthorized: {caller} may not mint {self.key}")
        self._mint(to, amount)

    def burn(self, caller: Address, frm: Address, amount: int) -> None:
        if caller not in self.authorized_adjusters:
            raise Unauthorized(f"unauthorized: {caller} may not burn {self.key}")
        check_amount(amount)
        self._own(frm)
        have = self.balances.get(frm, 0)
        if have < amount:
            raise InsufficientBalance(f"{frm} holds {have} < {amount}")
        if amount == 0:
            return
        self.balances[frm] = have - amount
        self.total_supply -= amount
        self.sim.log("chain", "burn", ledger=self.key, frm=str(frm), amount=amount)

    def _mint(self, to: Address, amount: int) -> None:
        check_amount(amount)
        self._own(to)
        if self.total_supply + amount > UINT256_MAX:
            raise AmountOverflow("total supply overflow")
        if amount == 0:
            return
        self.balances[to] = self.balances.get(to, 0) + amount
        self.total_supply += amount
        self.sim.log("chain", "mint", ledger=self.key, to=str(to), amount=amount)
