"""Exception taxonomy shared by every simulated contract."""


class SimulationError(Exception):
    """Base class for any operation that reverts inside the simulation."""


class ConfigError(SimulationError):
    pass


class Unauthorized(SimulationError):
    pass


class InsufficientBalance(SimulationError):
    pass


class AmountOverflow(SimulationError):
    pass


class RateLimited(SimulationError):
    pass


class SlippageExceeded(SimulationError):
    pass


class Paused(SimulationError):
    pass


class UnknownPeer(SimulationError):
    pass


class StillQueued(SimulationError):
    pass


class UnknownSequence(SimulationError):
    pass


class BelowThreshold(SimulationError):
    pass


class AlreadyRelayed(SimulationError):
    pass


class DeliveryRejected(SimulationError):
    """Raised by a receiving contract to refuse a delivered message."""


class InvariantViolation(Exception):
    """Internal accounting broke. Not a revert: the run must halt."""
