"""SONET/SDH rate hierarchy and the FDDI-to-SONET payload mapping.

Rates are kept as exact integer kbps so the published hierarchy table
reproduces bit-exactly (STS-N line rate = N x 51840 kbps; the payload
rate column scales the same way from 50112 kbps).

The mapping side builds an STM-1 synchronous payload envelope layout
(9 rows x 261 columns = 2349 bytes per 125 us frame) whose per-byte
classification guarantees the anti-scrambler stuffing discipline: user
data never affects more than 17 contiguous bytes, and every 17-byte
stretch contains one stuff-control bit that the user cannot drive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

SPE_ROWS = 9
SPE_COLS = 261
SPE_BYTES = SPE_ROWS * SPE_COLS            # 2349
FRAME_US = 125
PATH_OVERHEAD_BYTES = SPE_ROWS             # first column, one byte per row

STS1_LINE_KBPS = 51_840
STS1_PAYLOAD_KBPS = 50_112
STS_LEVELS = (1, 3, 9, 12, 18, 24, 36, 48, 96, 192)

# Published payload figures, kept verbatim. The STS-96 and STS-192 rows
# do not scale as N x 50.112 kbps (that would give 4810752 / 9621504);
# the hierarchy reproduces the published table, not the extrapolation.
PAYLOAD_KBPS = {
    1: 50_112,
    3: 150_336,
    9: 451_008,
    12: 601_344,
    18: 902_016,
    24: 1_202_688,
    36: 1_804_032,
    48: 2_405_376,
    96: 4_810_176,
    192: 9_620_928,
}

# Published payload figure for the STM-1 SPE available to the FDDI mapping.
# Note it does NOT equal 2349*8/125 = 150.336; it corresponds to 2176
# bytes per frame. Both numbers are reported by spe_arithmetic_report().
SPE_PUBLISHED_PAYLOAD_MBPS = 139.264

FDDI_CODE_BITS_PER_FRAME = 15_625          # 125 Mbps x 125 us

# Byte classification tags
PATH_OVERHEAD = "path_overhead"
FIXED_STUFF = "fixed_stuff"
STUFF_CONTROL = "stuff_control"
USER_DATA = "user_data"

MAX_USER_RUN_BYTES = 17

# Default layout: after the overhead column, bytes repeat in groups of 18
# (17 user-affectable + 1 fixed stuff); the 9th byte of each group carries
# the stuff-control bit as its last transmitted bit.
DEFAULT_RUN_LENGTH = 17
DEFAULT_CONTROL_INDEX = 8
STUFF_CONTROL_BIT = 7      # bit index within the byte, MSB-first order
FIXED_STUFF_FILL = 0       # fixed stuff is all-zeros before scrambling


class UnknownLevelError(ValueError):
    """STS level outside the published hierarchy."""


class InfeasibleLayoutError(ValueError):
    """Layout parameters cannot satisfy capacity and the 17-byte rule."""


class LayoutMismatchError(ValueError):
    """Frames presented for extraction disagree on their layout."""


@dataclass(frozen=True)
class RateEntry:
    """One row of the SONET/SDH signal hierarchy."""

    sts_level: int
    line_rate_kbps: int
    payload_rate_kbps: int
    oc: str
    stm: str | None

    @property
    def line_rate_mbps(self) -> float:
        return self.line_rate_kbps / 1000

    @property
    def payload_rate_mbps(self) -> float:
        return self.payload_rate_kbps / 1000


def sts_rates(n: int) -> RateEntry:
    """Line/payload rates and designations for STS-N."""
    if n not in STS_LEVELS:
        raise UnknownLevelError(f"STS-{n} is not a published level")
    stm = f"STM-{n // 3}" if n % 3 == 0 else None
    return RateEntry(sts_level=n,
                     line_rate_kbps=n * STS1_LINE_KBPS,
                     payload_rate_kbps=PAYLOAD_KBPS[n],
                     oc=f"OC-{n}",
                     stm=stm)


def rate_table() -> list[RateEntry]:
    return [sts_rates(n) for n in STS_LEVELS]


def kbps_to_mbps_str(kbps: int) -> str:
    """Exact decimal Mbps string (no binary-float drift)."""
    whole, frac = divmod(kbps, 1000)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:03d}".rstrip("0")


def spe_bandwidth() -> float:
    """The published STM-1 SPE bandwidth available to the mapping, in Mbps."""
    return SPE_PUBLISHED_PAYLOAD_MBPS


def spe_bandwidth_recomputed() -> Fraction:
    """2349 bytes x 8 bits / 125 us, recomputed exactly, in Mbps."""
    return Fraction(SPE_BYTES * 8, FRAME_US)


def spe_arithmetic_report() -> dict:
    """Cited vs recomputed SPE bandwidth, with the implied byte counts."""
    recomputed = spe_bandwidth_recomputed()
    published = Fraction(str(SPE_PUBLISHED_PAYLOAD_MBPS))
    implied_bytes = published * FRAME_US / 8
    return {
        "published_mbps": float(published),
        "recomputed_mbps": float(recomputed),
        "spe_bytes": SPE_BYTES,
        "published_implies_bytes": float(implied_bytes),
        "byte_shortfall": float(SPE_BYTES - implied_bytes),
        "consistent": published == recomputed,
        "exceeds_fddi_code_rate": published > 125,
    }


@dataclass(frozen=True)
class SpeLayout:
    """Deterministic per-byte classification of one SPE."""

    classification: tuple[str, ...]
    run_length: int
    control_index: int
    user_bit_positions: tuple[tuple[int, int], ...] = field(repr=False)

    @property
    def capacity_bits(self) -> int:
        return len(self.user_bit_positions)

    def byte_runs(self) -> list[int]:
        """Lengths of maximal user-affectable byte runs, transmission order."""
        runs = []
        cur = 0
        for tag in self.classification:
            if tag in (USER_DATA, STUFF_CONTROL):
                cur += 1
            elif cur:
                runs.append(cur)
                cur = 0
        if cur:
            runs.append(cur)
        return runs


def build_spe_layout(run_length: int = DEFAULT_RUN_LENGTH,
                     control_index: int = DEFAULT_CONTROL_INDEX) -> SpeLayout:
    """Classify every SPE byte position.

    ``run_length`` user-affectable bytes alternate with one fixed-stuff
    byte; each full run of 17 carries a stuff-control bit at position
    ``control_index``. Raises InfeasibleLayoutError when the parameters
    break the 17-byte rule or starve the FDDI payload.
    """
    if not 1 <= run_length <= MAX_USER_RUN_BYTES:
        raise InfeasibleLayoutError(
            f"run_length {run_length} violates the {MAX_USER_RUN_BYTES}-byte rule")
    if not 0 <= control_index < run_length:
        raise InfeasibleLayoutError(
            f"control_index {control_index} outside run of {run_length}")

    tags: list[str] = []
    for row in range(SPE_ROWS):
        tags.append(PATH_OVERHEAD)
        col = 0
        remaining = SPE_COLS - 1
        while col < remaining:
            span = min(run_length, remaining - col)
            for k in range(span):
                # a full-length run needs its stuff-control bit; shorter
                # tail runs are below the 17-byte limit already
                if span >= MAX_USER_RUN_BYTES and k == min(control_index, span - 1):
                    tags.append(STUFF_CONTROL)
                else:
                    tags.append(USER_DATA)
            col += span
            if col < remaining:
                tags.append(FIXED_STUFF)
                col += 1

    positions: list[tuple[int, int]] = []
    for idx, tag in enumerate(tags):
        if tag == USER_DATA:
            positions.extend((idx, bit) for bit in range(8))
        elif tag == STUFF_CONTROL:
            positions.extend((idx, bit) for bit in range(8) if bit != STUFF_CONTROL_BIT)

    layout = SpeLayout(classification=tuple(tags), run_length=run_length,
                       control_index=control_index,
                       user_bit_positions=tuple(positions))
    if layout.capacity_bits < FDDI_CODE_BITS_PER_FRAME:
        raise InfeasibleLayoutError(
            f"capacity {layout.capacity_bits} bits < {FDDI_CODE_BITS_PER_FRAME}")
    assert len(tags) == SPE_BYTES
    return layout


@dataclass(frozen=True)
class SpeFrame:
    """One mapped SPE: raw bytes plus how many payload bits are meaningful."""

    layout: SpeLayout
    data: bytes
    user_bits_filled: int


def map_fddi(code_bits: Sequence[int], layout: SpeLayout | None = None) -> list[SpeFrame]:
    """Pack a 4b/5b code-bit stream into SPE frames, MSB-first per byte.

    Overhead and fixed-stuff positions carry the fixed fill; unfilled
    payload bits in the last frame are zero. extract_fddi() inverts this
    exactly using the per-frame fill count.
    """
    layout = layout or build_spe_layout()
    capacity = layout.capacity_bits
    frames = []
    for start in range(0, len(code_bits), capacity):
        chunk = code_bits[start:start + capacity]
        octets = bytearray([FIXED_STUFF_FILL] * SPE_BYTES)
        for (byte_idx, bit_idx), bit in zip(layout.user_bit_positions, chunk):
            if bit:
                octets[byte_idx] |= 1 << (7 - bit_idx)
        frames.append(SpeFrame(layout=layout, data=bytes(octets),
                               user_bits_filled=len(chunk)))
    return frames


def extract_fddi(frames: Iterable[SpeFrame],
                 layout: SpeLayout | None = None) -> list[int]:
    """Recover the code-bit stream from mapped frames, in order."""
    bits: list[int] = []
    for frame in frames:
        if layout is None:
            layout = frame.layout
        if frame.layout.classification != layout.classification:
            raise LayoutMismatchError("frame classification differs from layout")
        for byte_idx, bit_idx in frame.layout.user_bit_positions[:frame.user_bits_filled]:
            bits.append((frame.data[byte_idx] >> (7 - bit_idx)) & 1)
    return bits


def frame_bits(frame: SpeFrame) -> list[int]:
    """All 2349 x 8 frame bits in transmission order (for scrambling)."""
    out = []
    for octet in frame.data:
        out.extend((octet >> (7 - b)) & 1 for b in range(8))
    return out
