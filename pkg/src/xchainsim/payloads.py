"""Fixed binary payload layouts, one per standard.

All integers are big-endian. Address fields carry the 32-byte address value;
the chain is implied by the message destination. Layouts::

    xERC20      token_id[32] recipient[32] amount:u256 src_nonce:u64          104 B
    OFT         recipient[32] amount_shared:u64 nonce:u64 extra[...]          48 B + extra
    NTT         token_id[32] amount:u256 recipient[32] sequence:u64           104 B
    CCT         token_id[32] amount:u256 recipient[32] src_pool[32] mode:u8   129 B
    Superchain  token[32] recipient[32] amount:u256 nonce:u64                 104 B

``token_id`` is the UTF-8 id right-padded with zero bytes.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import AmountOverflow, DeliveryRejected

U64_MAX = 2**64 - 1


def _id32(token_id: str) -> bytes:
    raw = token_id.encode()
    if len(raw) > 32:
        raise ValueError(f"token id too long: {token_id!r}")
    return raw.ljust(32, b"\0")


def _uint(value: int, size: int) -> bytes:
    if value < 0 or value >= 1 << (8 * size):
        raise AmountOverflow(f"{value} does not fit in {size * 8} bits")
    return value.to_bytes(size, "big")


def _read_id(raw: bytes) -> str:
    return raw.rstrip(b"\0").decode()


def _need(data: bytes, size: int, what: str) -> None:
    if len(data) != size:
        raise DeliveryRejected(f"malformed {what} payload: {len(data)} bytes, want {size}")


@dataclass(frozen=True)
class XErc20Payload:
    token_id: str
    recipient: bytes
    amount: int
    src_nonce: int

    SIZE = 104

    def encode(self) -> bytes:
        return _id32(self.token_id) + self.recipient + _uint(self.amount, 32) + _uint(self.src_nonce, 8)

    @classmethod
    def decode(cls, data: bytes) -> XErc20Payload:
        _need(data, cls.SIZE, "xERC20")
        return cls(_read_id(data[:32]), data[32:64], int.from_bytes(data[64:96], "big"),
                   int.from_bytes(data[96:104], "big"))


@dataclass(frozen=True)
class OftPayload:
    recipient: bytes
    amount_shared: int
    nonce: int
    extra: bytes = b""

    HEADER = 48

    def encode(self) -> bytes:
        return self.recipient + _uint(self.amount_shared, 8) + _uint(self.nonce, 8) + self.extra

    @classmethod
    def decode(cls, data: bytes) -> OftPayload:
        if len(data) < cls.HEADER:
            raise DeliveryRejected(f"malformed OFT payload: {len(data)} bytes")
        return cls(data[:32], int.from_bytes(data[32:40], "big"),
                   int.from_bytes(data[40:48], "big"), data[48:])


@dataclass(frozen=True)
class NttPayload:
    token_id: str
    amount: int
    recipient: bytes
    sequence: int

    SIZE = 104

    def encode(self) -> bytes:
        return _id32(self.token_id) + _uint(self.amount, 32) + self.recipient + _uint(self.sequence, 8)

    @classmethod
    def decode(cls, data: bytes) -> NttPayload:
        _need(data, cls.SIZE, "NTT")
        return cls(_read_id(data[:32]), int.from_bytes(data[32:64], "big"), data[64:96],
                   int.from_bytes(data[96:104], "big"))


CCT_MODE_TAGS = {"BurnMint": 0, "LockMint": 1, "BurnUnlock": 2, "LockUnlock": 3}
CCT_TAG_MODES = {v: k for k, v in CCT_MODE_TAGS.items()}


@dataclass(frozen=True)
class CctPayload:
    token_id: str
    amount: int
    recipient: bytes
    src_pool: bytes
    mode: str

    SIZE = 129

    def encode(self) -> bytes:
        return (_id32(self.token_id) + _uint(self.amount, 32) + self.recipient + self.src_pool
                + bytes([CCT_MODE_TAGS[self.mode]]))

    @classmethod
    def decode(cls, data: bytes) -> CctPayload:
        _need(data, cls.SIZE, "CCT")
        tag = data[128]
        if tag not in CCT_TAG_MODES:
            raise DeliveryRejected(f"unknown CCT mode tag {tag}")
        return cls(_read_id(data[:32]), int.from_bytes(data[32:64], "big"), data[64:96],
                   data[96:128], CCT_TAG_MODES[tag])


@dataclass(frozen=True)
class SuperchainPayload:
    token: bytes
    recipient: bytes
    amount: int
    nonce: int

    SIZE = 104

    def encode(self) -> bytes:
        return self.token + self.recipient + _uint(self.amount, 32) + _uint(self.nonce, 8)

    @classmethod
    def decode(cls, data: bytes) -> SuperchainPayload:
        _need(data, cls.SIZE, "Superchain")
        return cls(data[:32], data[32:64], int.from_bytes(data[64:96], "big"),
                   int.from_bytes(data[96:104], "big"))
