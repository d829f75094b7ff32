import math

from pcfgcompress.exceptions import MalformedBytes


def put_varint(value: int) -> bytes:
    """
    Encodes a non-negative integer as an unsigned LEB128 varint.

    Args:
        value (int): The integer to encode.

    Returns:
        bytes: Seven bits per byte, least significant group first.

    Example:
        >>> put_varint(300)
        b'\\xac\\x02'
    """
    if value < 0:
        raise ValueError("varint requires a non-negative integer")
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


class ByteReader:
    """Sequential reader over a byte string; running out raises MalformedBytes."""

    def __init__(self, data: bytes, offset: int = 0) -> None:
        self._data = bytes(data)
        self.offset = offset

    def read_byte(self) -> int:
        if self.offset >= len(self._data):
            raise MalformedBytes(f"unexpected end of data at offset {self.offset}")
        value = self._data[self.offset]
        self.offset += 1
        return value

    def read_bytes(self, count: int) -> bytes:
        end = self.offset + count
        if end > len(self._data):
            raise MalformedBytes(
                f"need {count} bytes at offset {self.offset}, "
                f"only {len(self._data) - self.offset} left"
            )
        value = self._data[self.offset : end]
        self.offset = end
        return value

    def read_varint(self) -> int:
        shift = 0
        value = 0
        while True:
            byte = self.read_byte()
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7
            if shift > 63:
                raise MalformedBytes("varint longer than 64 bits")

    @property
    def remaining(self) -> int:
        return len(self._data) - self.offset


def round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def pretty_print_size(num) -> str:
    num = int(num)

    if abs(num) >= 1_000_000:
        return f"{num / 1_000_000:.1f}M"
    elif abs(num) >= 1_000:
        return f"{num / 1_000:.1f}K"
    else:
        return f"{num}B"
