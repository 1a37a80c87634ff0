"""Deterministic discrete-event simulator of the FDDI timed-token MAC.

Protocol rules implemented per token visit at a station:

* the station measures its token rotation time (time since the token
  last arrived at this station);
* synchronous frames may be sent on every visit, up to the station's
  per-visit synchronous allocation;
* asynchronous frames may be sent only when the token arrived early
  (rotation < TTRT), for at most the earliness; a frame is sent only if
  it fits entirely inside the remaining window, so a late token carries
  no asynchronous traffic at all.

Time is kept as exact rationals (microseconds); the event queue breaks
ties on (time, station id, event kind), so a run is a pure function of
(config, load, duration, seed).
"""

from __future__ import annotations

import heapq
import json
import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

LINE_RATE_BITS_PER_US = Fraction(100)  # 100 Mbps

# Standard ring-sizing limits checked in compliance mode.
MAX_STATIONS = 500
MAX_CABLE_KM = 100

# Ring-latency estimation constants. Both are model choices, not
# protocol constants: fiber propagation at 5.085 us/km and a nominal
# 1 us of repeat latency per station.
PROPAGATION_US_PER_KM = Fraction("5.085")
DEFAULT_STATION_DELAY_US = Fraction(1)

SYNC = "sync"
ASYNC = "async"

_EV_TOKEN = 0


class DomainError(ValueError):
    """Formula arguments outside the valid domain."""


class ConfigViolationsError(ValueError):
    """Simulation requested with an invalid ring configuration."""

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        super().__init__("; ".join(f"{v.rule}: {v.detail}" for v in violations))


def _us(value) -> Fraction:
    """Microsecond quantity as an exact rational (floats via decimal text)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class RingConfig:
    """Ring topology and timed-token parameters."""

    n_stations: int
    ring_latency_us: Fraction       # D: zero-load round-trip token walk time
    ttrt_us: Fraction               # T: negotiated target token rotation time
    sync_allocation_us: tuple[Fraction, ...] = ()
    stripping: str = "source"       # "source" | "destination"
    total_cable_km: float | None = None
    compliance: bool = True

    @staticmethod
    def make(n_stations, ring_latency_us, ttrt_us, sync_allocation_us=None,
             stripping="source", total_cable_km=None, compliance=True) -> "RingConfig":
        alloc = sync_allocation_us or [0] * n_stations
        if len(alloc) != n_stations:
            raise ValueError(f"need one sync allocation per station ({n_stations})")
        return RingConfig(
            n_stations=n_stations,
            ring_latency_us=_us(ring_latency_us),
            ttrt_us=_us(ttrt_us),
            sync_allocation_us=tuple(_us(a) for a in alloc),
            stripping=stripping,
            total_cable_km=total_cable_km,
            compliance=compliance,
        )


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str


def validate_config(cfg: RingConfig) -> list[Violation]:
    """Every violated configuration invariant, with the offending values."""
    out = []
    if cfg.n_stations < 1:
        out.append(Violation("NoStations", f"n_stations={cfg.n_stations}"))
    if cfg.ttrt_us < cfg.ring_latency_us:
        out.append(Violation(
            "TtrtBelowLatency",
            f"TTRT {cfg.ttrt_us} us < ring latency {cfg.ring_latency_us} us"))
    if cfg.stripping not in ("source", "destination"):
        out.append(Violation("UnknownStripping", cfg.stripping))
    sync_total = sum(cfg.sync_allocation_us, Fraction(0))
    if sync_total > cfg.ttrt_us - cfg.ring_latency_us:
        out.append(Violation(
            "SyncOversubscribed",
            f"sync allocations {sync_total} us > T - D "
            f"= {cfg.ttrt_us - cfg.ring_latency_us} us"))
    if cfg.compliance:
        if cfg.n_stations > MAX_STATIONS:
            out.append(Violation(
                "StationCount", f"{cfg.n_stations} stations > {MAX_STATIONS}"))
        if cfg.total_cable_km is not None and cfg.total_cable_km > MAX_CABLE_KM:
            out.append(Violation(
                "TotalCable", f"{cfg.total_cable_km} km > {MAX_CABLE_KM} km"))
    return out


def theoretical_efficiency(n: int, ttrt_us, latency_us) -> float:
    """Saturated timed-token efficiency n(T - D) / (nT + D)."""
    if n < 1:
        raise DomainError(f"need at least one station, got {n}")
    t = _us(ttrt_us)
    d = _us(latency_us)
    if d < 0 or t < d:
        raise DomainError(f"need T >= D >= 0, got T={t}, D={d}")
    if d == 0:
        return 1.0
    return float(Fraction(n) * (t - d) / (Fraction(n) * t + d))


def estimate_ring_latency(total_cable_km, n_stations: int,
                          per_station_us=DEFAULT_STATION_DELAY_US) -> Fraction:
    """Model-based D: propagation over the cable plus per-station delay."""
    return (_us(total_cable_km) * PROPAGATION_US_PER_KM
            + n_stations * _us(per_station_us))


@dataclass(frozen=True)
class TrafficSource:
    """Offered load at one station. rate_mbps=None means saturated."""

    station: int
    traffic_class: str              # "sync" | "async"
    rate_mbps: float | None = None
    frame_bytes: int = 100
    destination: int | None = None  # default: downstream neighbour


@dataclass(frozen=True)
class TrafficModel:
    sources: tuple[TrafficSource, ...] = ()
    probe_count: int = 0

    @staticmethod
    def make(sources: Iterable[TrafficSource] = (), probe_count: int = 0) -> "TrafficModel":
        return TrafficModel(sources=tuple(sources), probe_count=probe_count)


ZERO_LOAD = TrafficModel()


@dataclass(frozen=True)
class VisitRecord:
    """One token visit: timing and what was transmitted."""

    station: int
    arrival_us: Fraction
    rotation_us: Fraction
    sync_tx_us: Fraction
    async_tx_us: Fraction
    depart_us: Fraction


@dataclass(frozen=True)
class SimMetrics:
    """Aggregate results of one simulation run."""

    duration_us: float
    warmup_us: float
    n_token_visits: int
    throughput: float               # fraction of the 100 Mbps line rate
    sync_bytes_sent: int
    async_bytes_sent: int
    sync_bytes_delivered: int
    async_bytes_delivered: int
    sync_frames_in_flight: int
    async_frames_in_flight: int
    max_sync_gap_us: float | None
    mean_access_delay_us: float | None
    max_access_delay_us: float | None
    probe_delays_us: tuple[float, ...] = field(repr=False, default=())
    trace: tuple[VisitRecord, ...] = field(repr=False, compare=False, default=())


class _Queue:
    """Per-(station, class) frame queue fed by a pre-generated arrival list."""

    __slots__ = ("frame_bytes", "frame_time", "destination", "saturated",
                 "arrivals", "taken")

    def __init__(self, source: TrafficSource, duration: Fraction, rng_seed: int):
        self.frame_bytes = source.frame_bytes
        self.frame_time = Fraction(source.frame_bytes * 8) / LINE_RATE_BITS_PER_US
        self.destination = source.destination
        self.saturated = source.rate_mbps is None
        self.taken = 0
        self.arrivals: list[float] = []
        if not self.saturated:
            rng = random.Random(rng_seed)
            rate = source.rate_mbps          # bits per us
            if rate <= 0:
                return
            mean_gap = source.frame_bytes * 8 / rate
            t = rng.expovariate(1.0 / mean_gap)
            horizon = float(duration)
            while t <= horizon:
                self.arrivals.append(t)
                t += rng.expovariate(1.0 / mean_gap)

    def available(self, now: Fraction) -> int:
        if self.saturated:
            return 1 << 30
        return bisect_right(self.arrivals, float(now)) - self.taken

    def take(self) -> float | None:
        """Dequeue one frame; returns its arrival time (None if saturated)."""
        if self.saturated:
            return None
        t = self.arrivals[self.taken]
        self.taken += 1
        return t


def run_simulation(cfg: RingConfig, load: TrafficModel, duration_us,
                   seed: int, warmup_us=None,
                   collect_trace: bool = False) -> SimMetrics:
    """Simulate the ring and return deterministic aggregate metrics.

    Throughput is measured over [warmup, duration); byte conservation
    counters cover the whole run. Probe access delays sample the wait
    from a uniformly random instant until the token next arrives at a
    uniformly random station.
    """
    violations = validate_config(cfg)
    if violations:
        raise ConfigViolationsError(violations)
    duration = _us(duration_us)
    if duration <= 0:
        raise ValueError("duration must be positive")
    warmup = _us(warmup_us) if warmup_us is not None else duration / 5
    if not 0 <= warmup < duration:
        raise ValueError("need 0 <= warmup < duration")

    n = cfg.n_stations
    t_target = cfg.ttrt_us
    hop = cfg.ring_latency_us / n

    queues: dict[tuple[int, str], _Queue] = {}
    for idx, src in enumerate(load.sources):
        if not 0 <= src.station < n:
            raise ValueError(f"traffic source station {src.station} out of range")
        if src.traffic_class not in (SYNC, ASYNC):
            raise ValueError(f"unknown traffic class {src.traffic_class!r}")
        key = (src.station, src.traffic_class)
        if key in queues:
            raise ValueError(f"duplicate traffic source for {key}")
        queues[key] = _Queue(src, duration, rng_seed=seed * 1_000_003 + idx)

    # pretend a zero-load rotation preceded t=0 so first rotations read D
    last_arrival = [i * hop - cfg.ring_latency_us for i in range(n)]
    need_arrivals = load.probe_count > 0
    arrivals_log: list[list[Fraction]] = [[] for _ in range(n)] if need_arrivals else []
    max_gap = [None] * n

    sent_bytes = {SYNC: 0, ASYNC: 0}
    delivered_bytes = {SYNC: 0, ASYNC: 0}
    in_flight = {SYNC: 0, ASYNC: 0}
    window_bits = 0
    visits = 0
    trace: list[VisitRecord] = []

    def send_frames(station: int, cls: str, start: Fraction,
                    budget: Fraction) -> Fraction:
        """Send whole frames while they fit in budget; returns time used."""
        q = queues.get((station, cls))
        if q is None or budget <= 0:
            return Fraction(0)
        nonlocal window_bits
        ft = q.frame_time
        dst = q.destination if q.destination is not None else (station + 1) % n
        hops = (dst - station) % n or n
        if q.saturated:
            # back-to-back frames fill the whole budget: account in bulk
            k = math.floor(budget / ft)
            if k <= 0:
                return Fraction(0)
            sent_bytes[cls] += k * q.frame_bytes
            # frame j (1..k) completes at start + j*ft
            in_window = (min(k, math.floor((duration - start) / ft))
                         - min(k, max(0, math.floor((warmup - start) / ft))))
            window_bits += max(0, in_window) * q.frame_bytes * 8
            delivered = min(k, max(0, math.floor(
                (duration - hops * hop - start) / ft)))
            delivered_bytes[cls] += delivered * q.frame_bytes
            in_flight[cls] += k - delivered
            return k * ft
        used = Fraction(0)
        while q.available(start + used) > 0 and used + ft <= budget:
            q.take()
            used += ft
            done = start + used
            sent_bytes[cls] += q.frame_bytes
            if warmup < done <= duration:
                window_bits += q.frame_bytes * 8
            if done + hops * hop <= duration:
                delivered_bytes[cls] += q.frame_bytes
            else:
                in_flight[cls] += 1
        return used

    events: list[tuple[Fraction, int, int]] = [(Fraction(0), 0, _EV_TOKEN)]
    while events:
        now, station, _kind = heapq.heappop(events)
        if now > duration:
            break
        rotation = now - last_arrival[station]
        last_arrival[station] = now
        if need_arrivals:
            arrivals_log[station].append(now)
        if now > warmup:
            prev = max_gap[station]
            max_gap[station] = rotation if prev is None else max(prev, rotation)
        visits += 1

        sync_used = send_frames(station, SYNC, now, cfg.sync_allocation_us[station])
        async_budget = t_target - rotation if rotation < t_target else Fraction(0)
        async_used = send_frames(station, ASYNC, now + sync_used, async_budget)

        depart = now + sync_used + async_used
        if collect_trace:
            trace.append(VisitRecord(station, now, rotation,
                                     sync_used, async_used, depart))
        heapq.heappush(events, (depart + hop, (station + 1) % n, _EV_TOKEN))

    span = duration - warmup
    throughput = float(Fraction(window_bits) / (span * LINE_RATE_BITS_PER_US))

    sync_stations = [i for i in range(n) if cfg.sync_allocation_us[i] > 0]
    gap_pool = sync_stations or range(n)
    gaps = [max_gap[i] for i in gap_pool if max_gap[i] is not None]
    max_sync_gap = float(max(gaps)) if gaps else None

    probe_delays: list[float] = []
    if load.probe_count > 0:
        rng = random.Random(seed * 1_000_003 + 7919)
        last_per_station = [float(a[-1]) if a else 0.0 for a in arrivals_log]
        horizon = min(last_per_station)
        lo = float(warmup)
        if horizon > lo:
            for _ in range(load.probe_count):
                t = rng.uniform(lo, horizon)
                st = rng.randrange(n)
                arr = arrivals_log[st]
                idx = bisect_right(arr, t)
                if idx < len(arr):
                    probe_delays.append(float(arr[idx]) - t)

    return SimMetrics(
        duration_us=float(duration),
        warmup_us=float(warmup),
        n_token_visits=visits,
        throughput=throughput,
        sync_bytes_sent=sent_bytes[SYNC],
        async_bytes_sent=sent_bytes[ASYNC],
        sync_bytes_delivered=delivered_bytes[SYNC],
        async_bytes_delivered=delivered_bytes[ASYNC],
        sync_frames_in_flight=in_flight[SYNC],
        async_frames_in_flight=in_flight[ASYNC],
        max_sync_gap_us=max_sync_gap,
        mean_access_delay_us=(sum(probe_delays) / len(probe_delays)
                              if probe_delays else None),
        max_access_delay_us=max(probe_delays) if probe_delays else None,
        probe_delays_us=tuple(probe_delays),
        trace=tuple(trace),
    )


def saturated_async_load(stations: Iterable[int], frame_bytes: int = 100) -> TrafficModel:
    """All listed stations offer unbounded asynchronous traffic."""
    return TrafficModel.make(
        TrafficSource(station=s, traffic_class=ASYNC, rate_mbps=None,
                      frame_bytes=frame_bytes)
        for s in stations)


def disjoint_neighbour_pairs(pairs: Sequence[int], n_stations: int) -> list[tuple[int, int]]:
    """(source, downstream-neighbour) pairs; rejects overlapping stations."""
    used: set[int] = set()
    out = []
    for src in pairs:
        dst = (src + 1) % n_stations
        if src in used or dst in used:
            raise ValueError(f"pair {src}->{dst} overlaps another pair")
        used.update((src, dst))
        out.append((src, dst))
    return out


def spatial_reuse_throughput(cfg: RingConfig, pair_sources: Sequence[int],
                             duration_us=None, frame_bytes: int = 100,
                             seed: int = 0) -> float:
    """Aggregate throughput for k disjoint neighbour pairs, as a fraction
    of the single-link rate.

    Under destination stripping each frame occupies only the segment from
    its source to the downstream neighbour, so disjoint pairs transmit
    concurrently and the aggregate can exceed 1.0. Under source stripping
    the one token serialises everything (frames circle the whole ring),
    so the timed-token simulation bounds the aggregate by 1.0.
    """
    n = cfg.n_stations
    pairs = disjoint_neighbour_pairs(pair_sources, n)
    duration = _us(duration_us) if duration_us is not None else 200 * cfg.ttrt_us
    if cfg.stripping == "destination":
        frame_time = Fraction(frame_bytes * 8) / LINE_RATE_BITS_PER_US
        frames_per_pair = int(duration / frame_time)
        bits = frames_per_pair * frame_bytes * 8 * len(pairs)
        return float(Fraction(bits) / (duration * LINE_RATE_BITS_PER_US))
    metrics = run_simulation(
        cfg, saturated_async_load([s for s, _ in pairs], frame_bytes),
        duration_us=duration, seed=seed)
    return metrics.throughput


def config_from_dict(doc: dict) -> tuple[RingConfig, TrafficModel]:
    """Build (RingConfig, TrafficModel) from a parsed config document."""
    n = int(doc["n_stations"])
    alloc_in = doc.get("sync_allocation_us", [])
    if isinstance(alloc_in, dict):
        alloc = [0] * n
        for key, val in alloc_in.items():
            alloc[int(key)] = val
    else:
        alloc = list(alloc_in) + [0] * (n - len(alloc_in))
    cfg = RingConfig.make(
        n_stations=n,
        ring_latency_us=doc["ring_latency_us"],
        ttrt_us=doc["ttrt_us"],
        sync_allocation_us=alloc,
        stripping=doc.get("stripping", "source"),
        total_cable_km=doc.get("total_cable_km"),
        compliance=doc.get("compliance", True),
    )
    sources = []
    for entry in doc.get("traffic", []):
        rate = entry.get("rate_mbps")
        if rate in ("saturated", None):
            rate = None
        else:
            rate = float(rate)
        sources.append(TrafficSource(
            station=int(entry["station"]),
            traffic_class=entry["class"],
            rate_mbps=rate,
            frame_bytes=int(entry.get("frame_bytes", 100)),
            destination=(int(entry["destination"])
                         if entry.get("destination") is not None else None),
        ))
    load = TrafficModel.make(sources, probe_count=int(doc.get("probes", 0)))
    return cfg, load


def load_config_file(path: str) -> tuple[RingConfig, TrafficModel]:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))
