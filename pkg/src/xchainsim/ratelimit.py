"""Linearly replenishing capacity shared by xERC20, NTT, CCT and OFT limiters."""
from __future__ import annotations

from typing import TYPE_CHECKING

from .chain import check_amount
from .errors import ConfigError, RateLimited

if TYPE_CHECKING:
    from .sim import Simulation

DEFAULT_WINDOW = 86400


class RateLimit:
    """Capacity refills at ``limit / window`` per tick, capped at ``limit``.

    Capacity is stored multiplied by ``window`` so refills never truncate and
    repeated partial refills cannot drift.
    """

    def __init__(self, sim: Simulation, name: str, limit: int, window: int = DEFAULT_WINDOW):
        if window < 1:
            raise ConfigError("rate-limit window must be >= 1 tick")
        check_amount(limit)
        self.sim = sim
        self.name = name
        self.limit = limit
        self.window = window
        self._scaled = limit * window
        self.last_refill = sim.tick
        sim.log("rl", "config", limiter=name, limit=limit, window=window)

    def __repr__(self) -> str:
        return f"RateLimit({self.name}, limit={self.limit}, window={self.window})"

    def _refill(self) -> None:
        now = self.sim.tick
        if now > self.last_refill:
            cap = self.limit * self.window
            self._scaled = min(cap, self._scaled + self.limit * (now - self.last_refill))
            self.last_refill = now

    @property
    def capacity(self) -> int:
        self._refill()
        return self._scaled // self.window

    def can_consume(self, amount: int) -> bool:
        return self.capacity >= amount

    def consume(self, amount: int) -> None:
        check_amount(amount)
        if self.capacity < amount:
            raise RateLimited(f"rate limited: {self.name} capacity {self.capacity} < {amount}")
        if amount:
            self._scaled -= amount * self.window
            self.sim.log("rl", "consume", limiter=self.name, amount=amount)

    def set_limit(self, limit: int) -> None:
        """Replace the max. Current capacity is clamped, never raised."""
        check_amount(limit)
        self._refill()
        self.limit = limit
        self._scaled = min(self._scaled, limit * self.window)
        self.sim.log("rl", "config", limiter=self.name, limit=limit, window=self.window)
