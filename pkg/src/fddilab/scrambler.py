"""SONET frame-synchronous scrambler and its 4b/5b interference analyzer.

The scrambler is a 7-stage shift register implementing 1 + x^6 + x^7,
seeded all-ones at each frame start. Its output is a maximal-length
sequence of period 127 that gets XORed onto the payload bits.

The analyzer answers: how long a run of the scrambler sequence (or its
complement) can a stream of valid 4b/5b symbols reproduce? Two matching
models are computed:

* ``whole_symbol`` - the matched window must be an exact concatenation of
  complete 5-bit symbols (lengths are multiples of 5);
* ``with_fragments`` - the window may begin and end mid-symbol, i.e. it is
  any substring of a valid symbol stream. This is the model that matters
  on the wire, where a user's symbol boundaries need not align with the
  window, and is the primary model reported.

Bit-transmission order within bytes is most-significant-bit first; all
sequences here are plain 0/1 bit streams in transmission order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .phy_codec import CodeTable

STAGES = 7
PERIOD = 127  # 2**7 - 1: the polynomial is primitive
SEED_BITS = (1, 1, 1, 1, 1, 1, 1)


@dataclass(frozen=True)
class ScramblerState:
    """Register contents (stage 1..7) plus bit offset since frame start."""

    registers: tuple[int, ...] = SEED_BITS
    position: int = 0

    def __post_init__(self):
        if len(self.registers) != STAGES:
            raise ValueError(f"need {STAGES} register bits")
        if not any(self.registers):
            raise ValueError("all-zero scrambler state is degenerate")


def seed() -> ScramblerState:
    """Frame-start state: all seven registers loaded with 1."""
    return ScramblerState(SEED_BITS, 0)


def next_bit(state: ScramblerState) -> tuple[int, ScramblerState]:
    """Emit stage 7, shift, feed x^6 XOR x^7 back into stage 1."""
    r = state.registers
    out = r[6]
    feedback = r[5] ^ r[6]
    return out, ScramblerState((feedback,) + r[:6], state.position + 1)


def keystream(n: int, state: ScramblerState | None = None) -> list[int]:
    """The next n scrambler output bits (from seed if no state given)."""
    st = state or seed()
    bits = []
    for _ in range(n):
        b, st = next_bit(st)
        bits.append(b)
    return bits


def sequence_127() -> list[int]:
    """One full period of the scrambler sequence, from the all-ones seed."""
    return keystream(PERIOD)


def scramble(data: Sequence[int], frame_start: bool = True,
             state: ScramblerState | None = None,
             exempt: Iterable[int] = ()) -> list[int]:
    """XOR the frame-synchronous keystream onto data bits.

    When ``frame_start`` the scrambler is re-seeded before the first bit;
    otherwise a ``state`` carried over from the previous call is required.
    ``exempt`` lists bit positions passed through unscrambled (the
    keystream still advances over them, keeping frame alignment). The
    operation is an involution: scrambling twice restores the input.
    """
    if frame_start:
        st = seed()
    elif state is None:
        raise ValueError("need a carried-over state when frame_start is False")
    else:
        st = state
    skip = frozenset(exempt)
    out = []
    for i, bit in enumerate(data):
        key, st = next_bit(st)
        out.append(bit if i in skip else bit ^ key)
    return out


def scramble_with_state(data: Sequence[int], state: ScramblerState,
                        exempt: Iterable[int] = ()) -> tuple[list[int], ScramblerState]:
    """Scramble continuing from ``state``; returns the end state as well."""
    skip = frozenset(exempt)
    st = state
    out = []
    for i, bit in enumerate(data):
        key, st = next_bit(st)
        out.append(bit if i in skip else bit ^ key)
    return out, st


@dataclass(frozen=True)
class MatchResult:
    """Longest reproducible window for one matching model."""

    model: str               # "whole_symbol" | "with_fragments"
    length_bits: int
    offset: int              # start bit offset into the 127-bit sequence
    polarity: str            # "sequence" | "complement"
    alignment: int           # window start offset inside its covering symbol
    bits: str                # the matched window, transmission order
    leading_fragment: str    # tail of a symbol consumed before first full one
    symbols: tuple[str, ...]  # meanings of the full symbols in the witness
    trailing_fragment: str   # head of a symbol consumed after the last full one


@dataclass(frozen=True)
class MatchReport:
    """Both matching models plus the table the analysis ran against."""

    with_fragments: MatchResult
    whole_symbol: MatchResult
    table_version: str
    symbol_count: int

    @property
    def best(self) -> MatchResult:
        return self.with_fragments


# The search walks windows of the periodic sequence. No valid-symbol cover
# can be unbounded (that would need the 127-bit sequence itself to be a
# symbol stream at every alignment), but cap the walk defensively.
_SCAN_CAP = 5 * PERIOD + 10


def _window_match(bits: Sequence[int], start: int, align: int,
                  codes: Sequence[str], allow_fragments: bool):
    """Maximal window at (start, align); returns (length, lead, syms, trail)."""
    period = len(bits)

    def at(i: int) -> str:
        return str(bits[i % period])

    lead = ""
    need = 5 - align
    if align:
        if not allow_fragments:
            return 0, "", (), ""
        # grow the leading fragment while it still matches some symbol
        # at this interior offset; bits before the window are unconstrained
        while len(lead) < need:
            cand = lead + at(start + len(lead))
            if not any(c[align:align + len(cand)] == cand for c in codes):
                break
            lead = cand
        if len(lead) < need:
            # window never reaches a symbol boundary
            return len(lead), lead, (), ""
    length = len(lead)
    i = start + len(lead)
    syms = []
    while length < _SCAN_CAP:
        chunk = "".join(at(i + j) for j in range(5))
        if chunk not in codes:
            break
        syms.append(chunk)
        length += 5
        i += 5
    trail = ""
    if allow_fragments:
        for t in range(4, 0, -1):
            head = "".join(at(i + j) for j in range(t))
            if any(c.startswith(head) for c in codes):
                trail = head
                length += t
                break
    return length, lead, tuple(syms), trail


def longest_valid_match(table: CodeTable) -> MatchReport:
    """Exhaustive search over every (offset, polarity, alignment) triple."""
    base = sequence_127()
    codes = [s.code for s in table.symbols]
    names = {s.code: s.meaning for s in table.symbols}
    best: dict[bool, tuple] = {True: None, False: None}
    for polarity, bits in (("sequence", base),
                           ("complement", [1 - b for b in base])):
        for start in range(PERIOD):
            for allow_fragments in (False, True):
                aligns = range(5) if allow_fragments else (0,)
                for align in aligns:
                    length, lead, syms, trail = _window_match(
                        bits, start, align, codes, allow_fragments)
                    if length >= _SCAN_CAP:
                        raise RuntimeError("unbounded symbol cover of the sequence")
                    cur = best[allow_fragments]
                    if cur is None or length > cur[0]:
                        window = "".join(
                            str(bits[(start + j) % PERIOD]) for j in range(length))
                        best[allow_fragments] = (
                            length, start, polarity, align, window,
                            lead, tuple(names[c] for c in syms), trail)

    def result(model: str, entry) -> MatchResult:
        length, start, polarity, align, window, lead, syms, trail = entry
        return MatchResult(model=model, length_bits=length, offset=start,
                           polarity=polarity, alignment=align, bits=window,
                           leading_fragment=lead, symbols=syms,
                           trailing_fragment=trail)

    return MatchReport(
        with_fragments=result("with_fragments", best[True]),
        whole_symbol=result("whole_symbol", best[False]),
        table_version=table.version,
        symbol_count=len(table.symbols),
    )
