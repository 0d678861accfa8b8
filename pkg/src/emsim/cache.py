"""Set-associative caches and TLBs with a rotating set-index mapping.

A block whose index field is i lives in physical set (i + rot) mod S.
Rotating bumps rot by one and invalidates everything (dirty lines are
written back first when a lower level is attached), so each physical set
takes turns hosting the hottest index. Per-set and per-line write counters
record the wear the rotation is meant to spread.

Write accounting: a write hit and a line fill each count as one write to
the touched entry (a fill rewrites the whole line). Invalidation clears
bits only and is not counted; the refill traffic it causes is.

TLBs reuse the same model with line_bytes=1 over page numbers (4 KiB
pages), so a "block address" there is just the page number.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .workload import ConfigError

PAGE_BYTES = 4096
DEFAULT_ROTATION_PERIOD = 10_000_000
LEVEL_ROLES = ("L1D", "L1I", "L2", "L3", "DTLB", "ITLB", "STLB")


def _power_of_two(x: int) -> bool:
    return x > 0 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class CacheConfig:
    name: str
    sets: int
    ways: int
    line_bytes: int
    rotation_period: int | None = None  # None = never rotate
    write_allocate: bool = True
    level_role: str = ""

    def __post_init__(self):
        if not _power_of_two(self.sets):
            raise ValueError(f"{self.name}: sets must be a power of two, got {self.sets}")
        if not _power_of_two(self.line_bytes):
            raise ValueError(f"{self.name}: line_bytes must be a power of two")
        if self.ways < 1:
            raise ValueError(f"{self.name}: ways must be >= 1")
        if self.rotation_period is not None and self.rotation_period < 1:
            raise ValueError(f"{self.name}: rotation_period must be >= 1 or None")


@dataclass(frozen=True, slots=True)
class AccessOutcome:
    hit: bool
    fill: bool
    writeback: int | None = None  # byte address of the evicted dirty block


class RotatingCache:
    __slots__ = ("config", "rot_counter", "_valid", "_tag", "_dirty", "_rank",
                 "set_writes", "line_writes", "invalidations", "accesses",
                 "fills", "write_hits", "rotation_writebacks",
                 "writeback_sink", "charge_rotation_writebacks", "debug")

    def __init__(self, config: CacheConfig,
                 writeback_sink: Optional[Callable[[int], None]] = None,
                 charge_rotation_writebacks: bool = True,
                 debug: bool = False):
        self.config = config
        self.rot_counter = 0
        n = config.sets * config.ways
        self._valid = [False] * n
        self._tag = [0] * n
        self._dirty = [False] * n
        self._rank = list(range(config.ways)) * config.sets
        self.set_writes = [0] * config.sets
        self.line_writes = [0] * n
        self.invalidations = 0
        self.accesses = 0
        self.fills = 0
        self.write_hits = 0
        self.rotation_writebacks = 0
        self.writeback_sink = writeback_sink
        self.charge_rotation_writebacks = charge_rotation_writebacks
        self.debug = debug

    def physical_set(self, address: int) -> int:
        index_field = (address // self.config.line_bytes) % self.config.sets
        return (index_field + self.rot_counter) % self.config.sets

    def access(self, address: int, kind: str) -> AccessOutcome:
        cfg = self.config
        ways = cfg.ways
        block = address // cfg.line_bytes
        s = (block % cfg.sets + self.rot_counter) % cfg.sets
        base = s * ways

        hit_way = -1
        for w in range(ways):
            i = base + w
            if self._valid[i] and self._tag[i] == block:
                hit_way = w
                break

        if hit_way >= 0:
            self._touch(base, ways, hit_way)
            if kind == "WRITE":
                self._dirty[base + hit_way] = True
                self.set_writes[s] += 1
                self.line_writes[base + hit_way] += 1
                self.write_hits += 1
            out = AccessOutcome(hit=True, fill=False)
        elif kind == "READ" or cfg.write_allocate:
            victim = -1
            for w in range(ways):
                if not self._valid[base + w]:
                    victim = w
                    break
            if victim < 0:
                for w in range(ways):
                    if self._rank[base + w] == ways - 1:
                        victim = w
                        break
            i = base + victim
            wb = None
            if self._valid[i] and self._dirty[i]:
                wb = self._tag[i] * cfg.line_bytes
            self._valid[i] = True
            self._tag[i] = block
            self._dirty[i] = kind == "WRITE"
            self._touch(base, ways, victim)
            self.set_writes[s] += 1
            self.line_writes[i] += 1
            self.fills += 1
            out = AccessOutcome(hit=False, fill=True, writeback=wb)
        else:
            # write miss on a no-allocate cache: the write passes below
            out = AccessOutcome(hit=False, fill=False)

        if self.debug:
            assert sorted(self._rank[base:base + ways]) == list(range(ways))

        self.accesses += 1
        if cfg.rotation_period is not None and self.accesses % cfg.rotation_period == 0:
            self.rotate()
        return out

    def _touch(self, base: int, ways: int, way: int) -> None:
        old = self._rank[base + way]
        for w in range(ways):
            if self._rank[base + w] < old:
                self._rank[base + w] += 1
        self._rank[base + way] = 0

    def rotate(self) -> None:
        cfg = self.config
        for i in range(cfg.sets * cfg.ways):
            if self._valid[i] and self._dirty[i]:
                self.rotation_writebacks += 1
                if self.charge_rotation_writebacks and self.writeback_sink is not None:
                    self.writeback_sink(self._tag[i] * cfg.line_bytes)
            self._valid[i] = False
            self._dirty[i] = False
        self.rot_counter = (self.rot_counter + 1) % cfg.sets
        self.invalidations += 1

    def set_writes_snapshot(self) -> tuple[int, ...]:
        return tuple(self.set_writes)

    def line_writes_snapshot(self) -> tuple[int, ...]:
        """Per-entry write counts, set-major (set 0 way 0, set 0 way 1, ...)."""
        return tuple(self.line_writes)


# --- hierarchy ----------------------------------------------------------------

_DEFAULT_GEOMETRY = {
    # 32 KiB / 8-way and 32 KiB / 4-way L1s, 256 KiB L2, 8 MiB L3, 64 B lines;
    # TLB geometry in entries: 64/4w, 128/4w, 512/4w over 4 KiB page numbers
    "L1D": dict(sets=64, ways=8, line_bytes=64),
    "L1I": dict(sets=128, ways=4, line_bytes=64),
    "L2": dict(sets=512, ways=8, line_bytes=64),
    "L3": dict(sets=8192, ways=16, line_bytes=64),
    "DTLB": dict(sets=16, ways=4, line_bytes=1),
    "ITLB": dict(sets=32, ways=4, line_bytes=1),
    "STLB": dict(sets=128, ways=4, line_bytes=1),
}


def default_level_configs(rotation_period: int | None = None) -> dict[str, CacheConfig]:
    """Table-driven defaults; one CacheConfig per level role."""
    return {
        role: CacheConfig(name=role, level_role=role,
                          rotation_period=rotation_period, **geom)
        for role, geom in _DEFAULT_GEOMETRY.items()
    }


class Hierarchy:
    """L1D/L1I over a shared L2 and L3, with D/I TLBs over a shared STLB.

    DATA accesses look up the D-TLB (misses consult the S-TLB) and then walk
    L1D -> L2 -> L3; INSTR accesses use the I-TLB and L1I. Fills fetch from
    the level below as reads; dirty evictions and rotation write-backs land
    on the level below as writes. Memory below L3 absorbs silently.
    """

    def __init__(self, caches: dict[str, RotatingCache]):
        missing = [r for r in LEVEL_ROLES if r not in caches]
        if missing:
            raise ValueError(f"hierarchy missing levels: {missing}")
        self.caches = caches
        l2, l3 = caches["L2"], caches["L3"]
        self._below = {"L1D": [l2, l3], "L1I": [l2, l3], "L2": [l3], "L3": []}
        for role, chain in self._below.items():
            caches[role].writeback_sink = self._make_sink(chain)

    def _make_sink(self, chain):
        return lambda address: self._chain_access(chain, address, "WRITE")

    def _chain_access(self, chain, address: int, kind: str) -> None:
        if not chain:
            return
        out = chain[0].access(address, kind)
        if out.writeback is not None:
            self._chain_access(chain[1:], out.writeback, "WRITE")
        if not out.hit:
            if out.fill:
                self._chain_access(chain[1:], address, "READ")
            elif kind == "WRITE":
                self._chain_access(chain[1:], address, "WRITE")

    def access(self, address: int, kind: str, space: str = "DATA") -> None:
        if address < 0:
            raise ValueError("address must be non-negative")
        page = address // PAGE_BYTES
        if space == "DATA":
            tlb, first = "DTLB", "L1D"
        elif space == "INSTR":
            tlb, first = "ITLB", "L1I"
        else:
            raise ValueError(f"unknown address space {space!r}")
        tlb_out = self.caches[tlb].access(page, "READ")
        if not tlb_out.hit:
            self.caches["STLB"].access(page, "READ")
        self._chain_access([self.caches[first]] + self._below[first], address, kind)


def build_hierarchy(rotation_period: int | None = None,
                    overrides: dict | None = None,
                    charge_rotation_writebacks: bool = True,
                    debug: bool = False) -> Hierarchy:
    """Assemble a hierarchy from defaults plus per-level overrides.

    rotation_period applies to every level (None = no rotation anywhere);
    overrides is {role: {sets|ways|line_bytes|rotation_period|write_allocate}}
    and wins over the global period for the levels it names.
    """
    configs = {}
    overrides = overrides or {}
    unknown = set(overrides) - set(LEVEL_ROLES)
    if unknown:
        raise ConfigError(f"unknown hierarchy levels: {sorted(unknown)}")
    for role, geom in _DEFAULT_GEOMETRY.items():
        fields = dict(geom, rotation_period=rotation_period, write_allocate=True)
        for key, value in overrides.get(role, {}).items():
            if key not in ("sets", "ways", "line_bytes", "rotation_period",
                           "write_allocate"):
                raise ConfigError(f"unknown cache config field {key!r} for {role}")
            fields[key] = value
        try:
            configs[role] = CacheConfig(name=role, level_role=role, **fields)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    caches = {role: RotatingCache(cfg,
                                  charge_rotation_writebacks=charge_rotation_writebacks,
                                  debug=debug)
              for role, cfg in configs.items()}
    return Hierarchy(caches)


def hierarchy_overrides_from_json(doc) -> dict:
    """Normalize a JSON hierarchy config into build_hierarchy overrides.

    Accepted shape (all parts optional):

        {"rotation_period": 10000000 | "never",
         "count_rotation_writebacks": true,
         "levels": {"L1D": {"sets": 64, "ways": 8, "line_bytes": 64,
                            "rotation_period": "never" | 123,
                            "write_allocate": true}, ...}}

    Returns {"rotation_period": ..., "count_rotation_writebacks": ...,
    "levels": ...} with "never"/null mapped to None; absent keys omitted.
    """
    if isinstance(doc, str):
        import json
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"hierarchy config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("hierarchy config must be a JSON object")
    unknown = set(doc) - {"rotation_period", "count_rotation_writebacks", "levels"}
    if unknown:
        raise ConfigError(f"unknown hierarchy config fields: {sorted(unknown)}")

    def norm_period(value):
        if value is None or value == "never":
            return None
        if isinstance(value, int) and not isinstance(value, bool) and value >= 1:
            return value
        raise ConfigError(f"rotation_period must be a positive integer or \"never\", "
                          f"got {value!r}")

    result: dict = {}
    if "rotation_period" in doc:
        result["rotation_period"] = norm_period(doc["rotation_period"])
    if "count_rotation_writebacks" in doc:
        flag = doc["count_rotation_writebacks"]
        if not isinstance(flag, bool):
            raise ConfigError("count_rotation_writebacks must be a boolean")
        result["count_rotation_writebacks"] = flag
    if "levels" in doc:
        levels = doc["levels"]
        if not isinstance(levels, dict):
            raise ConfigError("levels must be an object")
        normalized = {}
        for role, fields in levels.items():
            if role not in LEVEL_ROLES:
                raise ConfigError(f"unknown hierarchy level {role!r}")
            if not isinstance(fields, dict):
                raise ConfigError(f"level {role} config must be an object")
            fields = dict(fields)
            if "rotation_period" in fields:
                fields["rotation_period"] = norm_period(fields["rotation_period"])
            normalized[role] = fields
        result["levels"] = normalized
    return result
