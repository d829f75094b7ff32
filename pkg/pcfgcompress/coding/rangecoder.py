"""
Carry-less range coder with adaptive and static frequency models.

The coder keeps ``low``/``range`` registers and shifts out one byte at a time.
When the interval straddles a byte boundary while ``range`` has fallen below
the bottom threshold, ``range`` is cut down to the boundary instead of
propagating a carry.

Registers are ``RC_HEADROOM_BITS`` wider than the model total, rounded up to
whole bytes: 48 bits for the adaptive model and for static models whose
smallest probability is at least 2**-16, wider for sharper static models.
Python integers make the width free to choose per model.

The flush writes only as many leading bytes of a value inside the final
interval as are needed to identify it; the decoder reads zeros past the end
of the stream for at most one register's worth of bytes.

The symbol placed last in a model's cumulative order takes whatever remains
of ``range`` after integer division, so a dominant symbol placed there costs
almost nothing beyond its model probability.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from pcfgcompress.constants import (
    ADAPTIVE_INCREMENT,
    ADAPTIVE_INITIAL_COUNT,
    ADAPTIVE_TOTAL_BITS,
    RC_HEADROOM_BITS,
    STATIC_MAX_TOTAL_BITS,
    STATIC_MIN_TOTAL_BITS,
    STATIC_RESOLUTION_BITS,
)
from pcfgcompress.enums import ModelMode
from pcfgcompress.exceptions import InvalidModel, SymbolOutOfRange, TruncatedStream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Registers:
    precision: int

    @classmethod
    def for_total_bits(cls, total_bits: int) -> "_Registers":
        return cls(8 * math.ceil((total_bits + RC_HEADROOM_BITS) / 8))

    @property
    def mask(self) -> int:
        return (1 << self.precision) - 1

    @property
    def top(self) -> int:
        return 1 << (self.precision - 8)

    @property
    def bottom(self) -> int:
        return 1 << (self.precision - 16)

    @property
    def shift(self) -> int:
        return self.precision - 8

    @property
    def width(self) -> int:
        return self.precision // 8


@dataclass(frozen=True)
class FrequencyModel:
    """
    Describes how symbol frequencies are obtained; coding state is created per call.

    Attributes:
        alphabet_size: Number of symbols, at least 2.
        mode: Adaptive (counts learned while coding) or static.
        freqs: Quantized static frequencies summing to ``2**total_bits``.
        total_bits: Bound on the frequency total, as a power of two.
    """

    alphabet_size: int
    mode: ModelMode = ModelMode.ADAPTIVE
    freqs: Optional[Tuple[int, ...]] = None
    total_bits: int = ADAPTIVE_TOTAL_BITS

    @classmethod
    def adaptive(cls, alphabet_size: int) -> "FrequencyModel":
        """
        Counts start at 1, grow by 32 per coded symbol and are halved (floor 1)
        once their total exceeds 2**16.
        """
        if alphabet_size < 2:
            raise InvalidModel(f"alphabet size {alphabet_size} is below 2")
        return cls(alphabet_size, ModelMode.ADAPTIVE)

    @classmethod
    def static(cls, probs: Sequence[float]) -> "FrequencyModel":
        """
        Quantizes probabilities to integer frequencies with a power-of-two total.

        The total leaves 16 bits of resolution below the smallest positive
        probability (at least 2**16, at most 2**64). Every symbol keeps a
        frequency of at least 1, so a zero probability still leaves the
        symbol encodable.
        """
        if len(probs) < 2:
            raise InvalidModel("a static model needs at least two symbols")
        if any(p < 0 for p in probs) or not math.isclose(math.fsum(probs), 1.0, abs_tol=1e-9):
            raise InvalidModel("static probabilities must be non-negative and sum to 1")
        smallest = min(p for p in probs if p > 0)
        total_bits = math.ceil(-math.log2(smallest)) + STATIC_RESOLUTION_BITS
        total_bits = min(max(total_bits, STATIC_MIN_TOTAL_BITS), STATIC_MAX_TOTAL_BITS)
        total = 1 << total_bits
        if len(probs) > total:
            raise InvalidModel("alphabet too large for the static frequency total")
        freqs = [max(1, int(p * total)) for p in probs]
        largest = max(range(len(freqs)), key=lambda s: (probs[s], -s))
        freqs[largest] += total - sum(freqs)
        while freqs[largest] < 1:
            donor = max(range(len(freqs)), key=lambda s: freqs[s])
            freqs[donor] -= 1
            freqs[largest] += 1
        return cls(len(freqs), ModelMode.STATIC, tuple(freqs), total_bits)

    @property
    def registers(self) -> _Registers:
        return _Registers.for_total_bits(self.total_bits)

    def probability(self, symbol: int) -> float:
        """Quantized probability used by the coder (static models only)."""
        return self.freqs[symbol] / (1 << self.total_bits)

    def start(self) -> "_ModelState":
        return _ModelState(self)


class _ModelState:
    """Per-call frequency table laid out in the model's cumulative order."""

    def __init__(self, model: FrequencyModel) -> None:
        self.size = model.alphabet_size
        self.adaptive = model.mode is ModelMode.ADAPTIVE
        self.limit = 1 << model.total_bits
        if self.adaptive:
            self.freq = [ADAPTIVE_INITIAL_COUNT] * self.size
            # Symbol 0 is the expected default and sits on top.
            self.order = list(range(1, self.size)) + [0]
        else:
            self.freq = list(model.freqs)
            top = max(range(self.size), key=lambda s: (self.freq[s], -s))
            self.order = [s for s in range(self.size) if s != top] + [top]
        self.total = sum(self.freq)
        self._reindex()

    def _reindex(self) -> None:
        self.cum = [0] * self.size
        running = 0
        for s in self.order:
            self.cum[s] = running
            running += self.freq[s]

    def interval(self, symbol: int) -> Tuple[int, int]:
        return self.cum[symbol], self.freq[symbol]

    def locate(self, value: int) -> int:
        for s in self.order:
            if value < self.cum[s] + self.freq[s]:
                return s
        return self.order[-1]

    def update(self, symbol: int) -> None:
        if not self.adaptive:
            return
        self.freq[symbol] += ADAPTIVE_INCREMENT
        self.total += ADAPTIVE_INCREMENT
        if self.total > self.limit:
            self.freq = [max(1, f >> 1) for f in self.freq]
            self.total = sum(self.freq)
        self._reindex()


def _narrow(low: int, range_: int, r: int, cum: int, freq: int, total: int) -> Tuple[int, int]:
    low += r * cum
    if cum + freq == total:
        range_ -= r * cum
    else:
        range_ = r * freq
    return low, range_


def _flush(low: int, range_: int, regs: _Registers) -> bytes:
    # Shortest byte prefix whose zero-padded value lies in [low, low + range).
    for length in range(regs.width + 1):
        unit = 1 << (regs.precision - 8 * length)
        value = -(-low // unit) * unit
        if value < low + range_:
            return value.to_bytes(regs.width + 1, "big")[1 : length + 1]
    raise AssertionError("empty coding interval")


def rc_encode(symbols: Sequence[int], model: FrequencyModel) -> bytes:
    """
    Range-codes a symbol sequence.

    Args:
        symbols (Sequence[int]): Symbols below ``model.alphabet_size``.
        model (FrequencyModel): The model; the decoder must use an identical one.

    Returns:
        bytes: The coded stream, ending with a flush of at most one register width.
    """
    regs = model.registers
    state = model.start()
    out = bytearray()
    low, range_ = 0, regs.mask
    for position, symbol in enumerate(symbols):
        if not 0 <= symbol < state.size:
            raise SymbolOutOfRange(
                f"symbol {symbol} at position {position} outside alphabet of {state.size}"
            )
        cum, freq = state.interval(symbol)
        low, range_ = _narrow(low, range_, range_ // state.total, cum, freq, state.total)
        state.update(symbol)
        while True:
            if (low ^ (low + range_)) >= regs.top:
                if range_ >= regs.bottom:
                    break
                range_ = (regs.mask + 1 - low) & (regs.bottom - 1)
            out.append(low >> regs.shift)
            low = (low << 8) & regs.mask
            range_ <<= 8
    out += _flush(low, range_, regs)
    return bytes(out)


def rc_decode(data: bytes, model: FrequencyModel, count: int) -> List[int]:
    """
    Decodes ``count`` symbols produced by ``rc_encode`` with the same model.

    Raises:
        TruncatedStream: If the stream ends before ``count`` symbols are read.
    """
    if count == 0:
        return []
    regs = model.registers
    data = bytes(data)
    position = 0

    def next_byte() -> int:
        nonlocal position
        position += 1
        if position <= len(data):
            return data[position - 1]
        if position - len(data) <= regs.width:
            return 0
        raise TruncatedStream(
            f"stream of {len(data)} bytes ended after {len(symbols)} of {count} symbols"
        )

    symbols: List[int] = []
    state = model.start()
    low, range_ = 0, regs.mask
    code = 0
    for _ in range(regs.width):
        code = (code << 8) | next_byte()
    for _ in range(count):
        r = range_ // state.total
        value = min((code - low) // r, state.total - 1)
        symbol = state.locate(value)
        cum, freq = state.interval(symbol)
        low, range_ = _narrow(low, range_, r, cum, freq, state.total)
        state.update(symbol)
        symbols.append(symbol)
        while True:
            if (low ^ (low + range_)) >= regs.top:
                if range_ >= regs.bottom:
                    break
                range_ = (regs.mask + 1 - low) & (regs.bottom - 1)
            code = ((code << 8) | next_byte()) & regs.mask
            low = (low << 8) & regs.mask
            range_ <<= 8
    return symbols


def ideal_bits(symbols: Sequence[int], probs: Sequence[float]) -> int:
    """Ceiling of the information content of ``symbols`` under ``probs``."""
    return math.ceil(-math.fsum(math.log2(probs[s]) for s in symbols))
