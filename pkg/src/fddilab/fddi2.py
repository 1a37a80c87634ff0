"""FDDI-II hybrid-mode cycle accounting and wideband-channel allocation.

Every 125 us the ring carries one cycle: 2 preamble bytes plus a
1560-byte body split into 16 wideband channels (WBCs) of 96 bytes and a
24-byte header kept opaque here. At 100 Mbps a 125 us slot holds 1562.5
bytes; the half byte not covered by preamble+body is tracked explicitly
as 4 slack bits rather than silently absorbed.

A WBC is assigned wholly to isochronous or packet mode. Isochronous
channels own fixed byte positions of every cycle (owned bytes are wasted
when idle, never reused); packet-mode WBCs pool their bytes for the
basic token MAC, which behaves exactly as the plain FDDI MAC simulated
in mac_sim.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

CYCLE_US = 125
CYCLE_PREAMBLE_BYTES = 2
CYCLE_BODY_BYTES = 1560
WBC_COUNT = 16
WBC_BYTES = 96
CYCLE_HEADER_BYTES = CYCLE_BODY_BYTES - WBC_COUNT * WBC_BYTES   # 24
CYCLE_TOTAL_BYTES = CYCLE_PREAMBLE_BYTES + CYCLE_BODY_BYTES     # 1562
SLACK_BITS = 4   # 1562.5 bytes fit in 125 us at 100 Mbps; 0.5 byte spare

ISOCHRONOUS = "isochronous"
PACKET = "packet"

FDDI = "fddi"
FDDI2 = "fddi2"

IDLE = None  # trace marker for an unused owned byte


class CapacityExceededError(ValueError):
    """Isochronous requests exceed the isochronous WBC bytes."""


def wbc_bandwidth_kbps() -> int:
    """One WBC: 96 bytes per 125 us, exactly 6144 kbps."""
    return WBC_BYTES * 8 * 1000 // CYCLE_US


def wbc_bandwidth_mbps() -> float:
    return wbc_bandwidth_kbps() / 1000


def voice_channels_per_wbc(channel_kbps: int = 64) -> int:
    """How many fixed-rate circuits (64 kbps default) one WBC carries."""
    return wbc_bandwidth_kbps() // channel_kbps


def bytes_per_cycle_to_kbps(n_bytes: int) -> Fraction:
    """n owned bytes per cycle = n * 8 bits / 125 us, in kbps."""
    return Fraction(n_bytes * 8 * 1000, CYCLE_US)


@dataclass(frozen=True)
class StationKind:
    station_id: int
    kind: str  # FDDI | FDDI2


def can_enter_hybrid(stations: Sequence[StationKind]) -> bool:
    """Hybrid mode needs every station on the ring to be FDDI-II."""
    if not stations:
        raise ValueError("empty ring")
    return all(s.kind == FDDI2 for s in stations)


def _check_modes(wbc_modes: Sequence[str]) -> tuple[str, ...]:
    modes = tuple(wbc_modes)
    if len(modes) != WBC_COUNT:
        raise ValueError(f"need {WBC_COUNT} WBC modes, got {len(modes)}")
    for m in modes:
        if m not in (ISOCHRONOUS, PACKET):
            raise ValueError(f"unknown WBC mode {m!r}")
    return modes


@dataclass(frozen=True)
class Allocation:
    """Granted isochronous byte positions plus the packet-mode pool."""

    wbc_modes: tuple[str, ...]
    grants: tuple[tuple[str, tuple[tuple[int, int], ...]], ...]  # (channel, ((wbc, offset), ...))
    isochronous_capacity_bytes: int
    packet_pool_bytes: int

    def grant_map(self) -> dict[str, tuple[tuple[int, int], ...]]:
        return dict(self.grants)

    def owner_of(self) -> dict[tuple[int, int], str]:
        owners: dict[tuple[int, int], str] = {}
        for channel, slots in self.grants:
            for slot in slots:
                owners[slot] = channel
        return owners


def allocate(wbc_modes: Sequence[str],
             channel_requests: Sequence[tuple[str, int]]) -> Allocation:
    """First-fit byte-position assignment inside isochronous WBCs.

    Positions are (wbc index 0..15, byte offset 0..95) and are reserved:
    an idle owner's bytes stay unused. Packet-mode WBCs contribute their
    full 96 bytes to the pooled basic-mode capacity instead.
    """
    modes = _check_modes(wbc_modes)
    iso_wbcs = [i for i, m in enumerate(modes) if m == ISOCHRONOUS]
    capacity = len(iso_wbcs) * WBC_BYTES
    requested = 0
    for name, count in channel_requests:
        if count < 0:
            raise ValueError(f"negative byte count for channel {name!r}")
        requested += count
    if requested > capacity:
        raise CapacityExceededError(
            f"requested {requested} isochronous bytes/cycle, "
            f"only {capacity} available")
    free = iter([(w, b) for w in iso_wbcs for b in range(WBC_BYTES)])
    grants = []
    for name, count in channel_requests:
        slots = tuple(next(free) for _ in range(count))
        grants.append((name, slots))
    return Allocation(
        wbc_modes=modes,
        grants=tuple(grants),
        isochronous_capacity_bytes=capacity,
        packet_pool_bytes=(WBC_COUNT - len(iso_wbcs)) * WBC_BYTES,
    )


@dataclass(frozen=True)
class AuditFinding:
    cycle_index: int
    wbc: int
    offset: int
    owner: str | None
    found: str | None
    problem: str


def reserved_byte_audit(allocation: Allocation,
                        cycle_trace: Iterable[Mapping[tuple[int, int], str | None]],
                        ) -> list[AuditFinding]:
    """Check reservation discipline over a trace of cycle fills.

    Each trace entry maps (wbc, offset) -> channel name carried there, or
    IDLE. Owned bytes must carry their owner's payload or idle fill;
    unowned isochronous bytes must never carry channel payload.
    """
    owners = allocation.owner_of()
    findings = []
    for cycle_index, fill in enumerate(cycle_trace):
        for slot, carried in fill.items():
            owner = owners.get(slot)
            if carried is IDLE:
                continue
            if owner is None:
                findings.append(AuditFinding(
                    cycle_index, slot[0], slot[1], None, carried,
                    "payload in unallocated byte"))
            elif carried != owner:
                findings.append(AuditFinding(
                    cycle_index, slot[0], slot[1], owner, carried,
                    "byte carried another channel's payload"))
    return findings


def cycles_in_flight(ring_latency_us) -> tuple[int, Fraction]:
    """Cycles wholly contained in the ring at a given latency.

    Returns (full cycles, fractional remainder of a cycle).
    """
    latency = Fraction(str(ring_latency_us)) if isinstance(ring_latency_us, float) \
        else Fraction(ring_latency_us)
    if latency < 0:
        raise ValueError("latency must be non-negative")
    full = int(latency // CYCLE_US)
    return full, latency / CYCLE_US - full
