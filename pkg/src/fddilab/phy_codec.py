"""FDDI physical-layer line codes: 4b/5b symbol coding, NRZI and MLT-3.

The 4b/5b code table is not hardwired; it is loaded from a versioned data
file (``data/4b5b_table.txt``) so the codec logic stays table-driven. All
operations are pure functions over immutable values.

Bit conventions: bit sequences are iterables of 0/1 ints. Two-level line
signals use 0 = low, 1 = high; three-level (MLT-3) signals use -1/0/+1.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Iterator, Sequence

FDDI_DATA_RATE_BPS = 100_000_000
FDDI_CODE_BIT_RATE_BPS = 125_000_000  # 4b/5b expands 4 data bits to 5 code bits

SYMBOL_BITS = 5
NIBBLE_BITS = 4


class InvalidSymbolError(ValueError):
    """A 5-bit pattern with no entry in the code table (code violation)."""

    def __init__(self, position: int, pattern: str):
        self.position = position
        self.pattern = pattern
        super().__init__(f"invalid 5-bit pattern {pattern!r} at symbol {position}")


class ControlSymbolError(ValueError):
    """A control symbol encountered where a data symbol was required."""

    def __init__(self, position: int, name: str):
        self.position = position
        self.name = name
        super().__init__(f"control symbol {name} at symbol {position}")


class AperiodicSignalError(ValueError):
    """The line signal shows no exact repetition over its length."""


@dataclass(frozen=True)
class Symbol4b5b:
    """One 4b/5b symbol: a 5-bit pattern plus its interpretation."""

    code: str            # 5 chars of '0'/'1', transmission order
    kind: str            # "data" | "control"
    meaning: str         # hex digit for data, symbol name for control

    @property
    def value(self) -> int:
        if self.kind != "data":
            raise ValueError(f"{self.meaning} is not a data symbol")
        return int(self.meaning, 16)


@dataclass(frozen=True)
class LineSignal:
    """A line-coded signal: one level per code bit, at a given bit rate."""

    levels: tuple[int, ...]
    bit_rate: float = float(FDDI_CODE_BIT_RATE_BPS)


class CodeTable:
    """4b/5b symbol table with lookups by nibble value and by bit pattern."""

    def __init__(self, symbols: Iterable[Symbol4b5b], version: str = ""):
        self.symbols: tuple[Symbol4b5b, ...] = tuple(symbols)
        self.version = version
        self.by_code: dict[str, Symbol4b5b] = {}
        self.by_nibble: dict[int, Symbol4b5b] = {}
        for sym in self.symbols:
            if len(sym.code) != SYMBOL_BITS or set(sym.code) - {"0", "1"}:
                raise ValueError(f"malformed code pattern {sym.code!r}")
            if sym.code in self.by_code:
                raise ValueError(f"pattern {sym.code} mapped twice")
            self.by_code[sym.code] = sym
            if sym.kind == "data":
                value = sym.value
                if value in self.by_nibble:
                    raise ValueError(f"data value {value:x} mapped twice")
                self.by_nibble[value] = sym
        if self.by_nibble and len(self.by_nibble) != 16:
            raise ValueError(f"expected 16 data symbols, got {len(self.by_nibble)}")

    @property
    def data_symbols(self) -> tuple[Symbol4b5b, ...]:
        return tuple(s for s in self.symbols if s.kind == "data")

    @property
    def control_symbols(self) -> tuple[Symbol4b5b, ...]:
        return tuple(s for s in self.symbols if s.kind == "control")


def parse_code_table(text: str) -> CodeTable:
    """Parse the code-table file format: '#' comments, one record per line."""
    version = ""
    symbols = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("version:"):
            version = line.split(":", 1)[1].strip()
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(f"bad code-table record: {raw!r}")
        code, kind, meaning = fields
        if kind not in ("data", "control"):
            raise ValueError(f"unknown symbol kind {kind!r}")
        symbols.append(Symbol4b5b(code=code, kind=kind, meaning=meaning))
    return CodeTable(symbols, version=version)


def load_code_table() -> CodeTable:
    """Load the code table shipped with the package."""
    text = resources.files("fddilab.data").joinpath("4b5b_table.txt").read_text("utf-8")
    return parse_code_table(text)


_default_table: CodeTable | None = None


def default_code_table() -> CodeTable:
    global _default_table
    if _default_table is None:
        _default_table = load_code_table()
    return _default_table


def encode_4b5b(data: Iterable[int], table: CodeTable | None = None) -> list[Symbol4b5b]:
    """Encode a sequence of nibbles (ints in [0, 15]) into 4b/5b symbols."""
    table = table or default_code_table()
    out = []
    for i, nibble in enumerate(data):
        if not 0 <= nibble <= 15:
            raise ValueError(f"nibble {nibble!r} at position {i} not in [0, 15]")
        out.append(table.by_nibble[nibble])
    return out


def decode_4b5b(stream: Iterable[str | Symbol4b5b],
                table: CodeTable | None = None) -> list[int]:
    """Decode 5-bit patterns back to nibbles.

    Control symbols and unmapped patterns are never dropped silently:
    they raise ControlSymbolError / InvalidSymbolError with the position.
    """
    table = table or default_code_table()
    out = []
    for i, item in enumerate(stream):
        code = item.code if isinstance(item, Symbol4b5b) else item
        sym = table.by_code.get(code)
        if sym is None:
            raise InvalidSymbolError(i, code)
        if sym.kind != "data":
            raise ControlSymbolError(i, sym.meaning)
        out.append(sym.value)
    return out


def symbols_to_bits(symbols: Iterable[Symbol4b5b]) -> list[int]:
    """Flatten symbols into their code bits in transmission order."""
    bits = []
    for sym in symbols:
        bits.extend(int(c) for c in sym.code)
    return bits


def bits_to_patterns(bits: Sequence[int]) -> Iterator[str]:
    """Regroup a code-bit stream into 5-bit patterns (length must divide)."""
    if len(bits) % SYMBOL_BITS:
        raise ValueError(f"bit count {len(bits)} not a multiple of {SYMBOL_BITS}")
    for i in range(0, len(bits), SYMBOL_BITS):
        yield "".join(str(b) for b in bits[i:i + SYMBOL_BITS])


def encoded_bit_rate(data_rate_bps: float) -> float:
    """Code-bit rate after 4b/5b expansion: 5/4 of the data rate."""
    return data_rate_bps * SYMBOL_BITS / NIBBLE_BITS


def nrzi_encode(bits: Iterable[int], initial_level: str = "low",
                bit_rate: float = float(FDDI_CODE_BIT_RATE_BPS)) -> LineSignal:
    """NRZI: a 1 bit toggles the line level, a 0 bit holds it."""
    if initial_level not in ("low", "high"):
        raise ValueError(f"initial_level must be 'low' or 'high', got {initial_level!r}")
    level = 1 if initial_level == "high" else 0
    levels = []
    for b in bits:
        if b:
            level ^= 1
        levels.append(level)
    return LineSignal(levels=tuple(levels), bit_rate=bit_rate)


# MLT-3 cycles through these levels; a 1 bit advances, a 0 bit holds.
# Direct +1 <-> -1 jumps are impossible by construction.
MLT3_CYCLE = (0, 1, 0, -1)


def mlt3_encode(bits: Iterable[int],
                bit_rate: float = float(FDDI_CODE_BIT_RATE_BPS)) -> LineSignal:
    """MLT-3 three-level code: worst-case signal frequency is half NRZI's."""
    phase = 0
    levels = []
    for b in bits:
        if b:
            phase = (phase + 1) % 4
        levels.append(MLT3_CYCLE[phase])
    return LineSignal(levels=tuple(levels), bit_rate=bit_rate)


def transition_count(signal: LineSignal, initial_level: int = 0) -> int:
    """Number of level changes, counting the change off the initial level."""
    count = 0
    prev = initial_level
    for lv in signal.levels:
        if lv != prev:
            count += 1
        prev = lv
    return count


def fundamental_frequency(signal: LineSignal) -> float:
    """Fundamental frequency of an exactly periodic line signal, in Hz.

    The period is the smallest exact repeat p with at least two full
    periods of evidence (levels[i] == levels[i+p] for all i). A constant
    signal is DC: 0 Hz. Raises AperiodicSignalError when no repeat exists.
    """
    levels = signal.levels
    n = len(levels)
    if n == 0:
        raise ValueError("empty signal")
    for p in range(1, n // 2 + 1):
        if all(levels[i] == levels[i + p] for i in range(n - p)):
            if p == 1:
                return 0.0  # constant level, no transitions
            return signal.bit_rate / p
    raise AperiodicSignalError(f"no exact repeat within {n} levels")
