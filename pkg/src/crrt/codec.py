"""Byte-level writer/reader for canonical wire encodings."""

from __future__ import annotations

from typing import Iterable

from .group import GroupError, GroupParams


class DecodeError(ValueError):
    """Malformed or truncated wire data."""


class Writer:
    def __init__(self, params: GroupParams | None = None):
        self.params = params
        self._parts: list[bytes] = []

    def u8(self, v: int) -> "Writer":
        self._parts.append(v.to_bytes(1, "big"))
        return self

    def u16(self, v: int) -> "Writer":
        self._parts.append(v.to_bytes(2, "big"))
        return self

    def u32(self, v: int) -> "Writer":
        self._parts.append(v.to_bytes(4, "big"))
        return self

    def blob(self, data: bytes) -> "Writer":
        self.u32(len(data))
        self._parts.append(bytes(data))
        return self

    def element(self, x: int) -> "Writer":
        self._parts.append(self.params.encode_element(x))
        return self

    def scalar(self, x: int) -> "Writer":
        self._parts.append(self.params.encode_scalar(x))
        return self

    def elements(self, xs: Iterable[int]) -> "Writer":
        xs = list(xs)
        self.u16(len(xs))
        for x in xs:
            self.element(x)
        return self

    def scalars(self, xs: Iterable[int]) -> "Writer":
        xs = list(xs)
        self.u16(len(xs))
        for x in xs:
            self.scalar(x)
        return self

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes, params: GroupParams | None = None):
        self.data = bytes(data)
        self.pos = 0
        self.params = params

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise DecodeError("truncated input")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return int.from_bytes(self.take(2), "big")

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def blob(self) -> bytes:
        return self.take(self.u32())

    def element(self) -> int:
        try:
            return self.params.decode_element(self.take(self.params.element_len))
        except GroupError as exc:
            raise DecodeError(str(exc)) from exc

    def scalar(self) -> int:
        try:
            return self.params.decode_scalar(self.take(self.params.scalar_len))
        except GroupError as exc:
            raise DecodeError(str(exc)) from exc

    def elements(self) -> list[int]:
        return [self.element() for _ in range(self.u16())]

    def scalars(self) -> list[int]:
        return [self.scalar() for _ in range(self.u16())]

    def done(self) -> None:
        if self.pos != len(self.data):
            raise DecodeError(f"{len(self.data) - self.pos} trailing bytes")
