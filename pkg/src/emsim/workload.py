"""Trace event model, text trace parsing, and seeded synthetic workloads.

Trace file format (UTF-8, one event per line, `#` starts a comment):

    <cycle> A <ready_count>                 ALU issue burst
    <cycle> R <GPR|FP|FLAGS|SP> <arch_id>   architectural register write
    <cycle> M <R|W> <address> <D|I>         memory access (data/instruction)

Cycles must be non-decreasing and a cycle may carry at most one ALU issue
record. Synthetic traces come from generate(), which is a pure function of
its GenSpec (seed included): identical specs give byte-identical traces on
any platform, courtesy of the fixed SplitMix64 generator.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Union

from .rng import SplitMix64

REG_CLASSES = ("GPR", "FP", "FLAGS", "SP")
MEM_KINDS = ("READ", "WRITE")
MEM_SPACES = ("DATA", "INSTR")


class TraceParseError(ValueError):
    """Malformed or inconsistent trace input."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ConfigError(ValueError):
    """Invalid generator spec or run configuration."""


@dataclass(frozen=True, slots=True)
class AluIssue:
    ready_count: int


@dataclass(frozen=True, slots=True)
class RegWrite:
    reg_class: str
    arch_id: int


@dataclass(frozen=True, slots=True)
class MemAccess:
    kind: str  # READ | WRITE
    address: int  # byte address
    space: str  # DATA | INSTR


Payload = Union[AluIssue, RegWrite, MemAccess]


@dataclass(frozen=True, slots=True)
class Event:
    cycle: int
    payload: Payload


# --- parsing / serialization -------------------------------------------------

_KIND_CODE = {"R": "READ", "W": "WRITE"}
_SPACE_CODE = {"D": "DATA", "I": "INSTR"}
_KIND_LETTER = {v: k for k, v in _KIND_CODE.items()}
_SPACE_LETTER = {v: k for k, v in _SPACE_CODE.items()}


def parse_trace(lines: Iterable[str]) -> list[Event]:
    """Parse a trace from an iterable of text lines (an open file works).

    Raises TraceParseError with the offending line number on malformed
    input, decreasing cycles, or two ALU issues in one cycle.
    """
    events: list[Event] = []
    last_cycle = -1
    alu_cycle = -1
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            cycle = int(fields[0])
            tag = fields[1]
            if tag == "A":
                if len(fields) != 3:
                    raise TraceParseError("ALU record needs 3 fields", line_no)
                payload: Payload = AluIssue(ready_count=int(fields[2]))
            elif tag == "R":
                if len(fields) != 4:
                    raise TraceParseError("register record needs 4 fields", line_no)
                if fields[2] not in REG_CLASSES:
                    raise TraceParseError(f"unknown register class {fields[2]!r}", line_no)
                payload = RegWrite(reg_class=fields[2], arch_id=int(fields[3]))
                if payload.arch_id < 0:
                    raise TraceParseError("register id must be non-negative", line_no)
            elif tag == "M":
                if len(fields) != 5:
                    raise TraceParseError("memory record needs 5 fields", line_no)
                if fields[2] not in _KIND_CODE:
                    raise TraceParseError(f"memory kind must be R or W, got {fields[2]!r}", line_no)
                if fields[4] not in _SPACE_CODE:
                    raise TraceParseError(f"memory space must be D or I, got {fields[4]!r}", line_no)
                payload = MemAccess(kind=_KIND_CODE[fields[2]],
                                    address=int(fields[3]),
                                    space=_SPACE_CODE[fields[4]])
                if payload.address < 0:
                    raise TraceParseError("address must be non-negative", line_no)
            else:
                raise TraceParseError(f"unknown record tag {tag!r}", line_no)
        except TraceParseError:
            raise
        except (ValueError, IndexError) as exc:
            raise TraceParseError(f"malformed record: {exc}", line_no) from exc

        if cycle < 0:
            raise TraceParseError("cycle must be non-negative", line_no)
        if cycle < last_cycle:
            raise TraceParseError(
                f"cycle {cycle} decreases below previous cycle {last_cycle}", line_no)
        if isinstance(payload, AluIssue):
            if payload.ready_count < 0:
                raise TraceParseError("ready_count must be non-negative", line_no)
            if cycle == alu_cycle:
                raise TraceParseError(f"second ALU issue in cycle {cycle}", line_no)
            alu_cycle = cycle
        last_cycle = cycle
        events.append(Event(cycle, payload))
    return events


def serialize_event(event: Event) -> str:
    p = event.payload
    if isinstance(p, AluIssue):
        return f"{event.cycle} A {p.ready_count}"
    if isinstance(p, RegWrite):
        return f"{event.cycle} R {p.reg_class} {p.arch_id}"
    return f"{event.cycle} M {_KIND_LETTER[p.kind]} {p.address} {_SPACE_LETTER[p.space]}"


def serialize_trace(events: Iterable[Event]) -> Iterator[str]:
    """Inverse of parse_trace: yields one line per event, no newline."""
    for event in events:
        yield serialize_event(event)


def load_trace(path) -> list[Event]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_trace(fh)


def save_trace(path, events: Iterable[Event], header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_trace(fh, events, header)


def write_trace(fh: IO[str], events: Iterable[Event], header: str | None = None) -> None:
    fh.write("# emsim trace v1\n")
    if header:
        fh.write(f"# {header}\n")
    for line in serialize_trace(events):
        fh.write(line + "\n")


# --- synthetic workload generation -------------------------------------------


@dataclass(frozen=True)
class ZipfRegWrites:
    """Register writes with rank-frequency weight (rank+1)^-s over num_regs."""

    num_regs: int
    zipf_s: float
    KIND = "zipf-reg-writes"


@dataclass(frozen=True)
class SkewedAddrs:
    """Data accesses over working_set_lines cache lines, a hot_fraction of
    which receives hot_weight times the base access weight."""

    working_set_lines: int
    hot_fraction: float
    hot_weight: float
    line_bytes: int = 64
    KIND = "skewed-addrs"


@dataclass(frozen=True)
class AluBursts:
    """One ALU issue per cycle, width drawn from width_distribution, which
    lists one relative weight per width 0..max_width."""

    max_width: int
    width_distribution: tuple[float, ...]
    KIND = "alu-bursts"


Kind = Union[ZipfRegWrites, SkewedAddrs, AluBursts]


@dataclass(frozen=True)
class GenSpec:
    seed: int
    length: int
    kind: Kind

    def __post_init__(self):
        if not 0 <= self.seed < (1 << 64):
            raise ConfigError("seed must fit in 64 bits")
        if self.length < 0:
            raise ConfigError("length must be >= 0")
        k = self.kind
        if isinstance(k, ZipfRegWrites):
            if k.num_regs < 1:
                raise ConfigError("num_regs must be >= 1")
            if k.zipf_s <= 0:
                raise ConfigError("zipf_s must be > 0")
        elif isinstance(k, SkewedAddrs):
            if k.working_set_lines < 1:
                raise ConfigError("working_set_lines must be >= 1")
            if not 0.0 < k.hot_fraction <= 1.0:
                raise ConfigError("hot_fraction must be in (0, 1]")
            if k.hot_weight < 1.0:
                raise ConfigError("hot_weight must be >= 1")
            if k.line_bytes < 1:
                raise ConfigError("line_bytes must be >= 1")
        elif isinstance(k, AluBursts):
            if k.max_width < 1:
                raise ConfigError("max_width must be >= 1")
            if len(k.width_distribution) != k.max_width + 1:
                raise ConfigError("width_distribution needs max_width + 1 weights")
            if any(w < 0 for w in k.width_distribution):
                raise ConfigError("width weights must be non-negative")
            if sum(k.width_distribution) <= 0:
                raise ConfigError("width weights must not all be zero")
        else:
            raise ConfigError(f"unknown generator kind {k!r}")


def _cumulative(weights) -> list[float]:
    cum = []
    total = 0.0
    for w in weights:
        total += w
        cum.append(total)
    return cum


def _pick(cum: list[float], rng: SplitMix64) -> int:
    # Inverse CDF over the cumulative weights; exact and O(log n).
    return bisect.bisect_right(cum, rng.random() * cum[-1])


def generate(spec: GenSpec) -> list[Event]:
    """Produce spec.length events, one per cycle, deterministically."""
    rng = SplitMix64(spec.seed)
    k = spec.kind
    events: list[Event] = []
    if isinstance(k, ZipfRegWrites):
        cum = _cumulative((r + 1) ** -k.zipf_s for r in range(k.num_regs))
        for cycle in range(spec.length):
            reg = _pick(cum, rng)
            events.append(Event(cycle, RegWrite("GPR", reg)))
    elif isinstance(k, SkewedAddrs):
        hot_lines = max(1, int(k.working_set_lines * k.hot_fraction + 0.5))
        cum = _cumulative(k.hot_weight if i < hot_lines else 1.0
                          for i in range(k.working_set_lines))
        for cycle in range(spec.length):
            line = _pick(cum, rng)
            kind = "WRITE" if rng.random() < 0.5 else "READ"
            events.append(Event(cycle, MemAccess(kind, line * k.line_bytes, "DATA")))
    else:  # AluBursts
        cum = _cumulative(k.width_distribution)
        for cycle in range(spec.length):
            width = _pick(cum, rng)
            events.append(Event(cycle, AluIssue(width)))
    return events


# --- GenSpec JSON form --------------------------------------------------------

_KIND_FIELDS = {
    ZipfRegWrites.KIND: (ZipfRegWrites, ("num_regs", "zipf_s")),
    SkewedAddrs.KIND: (SkewedAddrs, ("working_set_lines", "hot_fraction",
                                     "hot_weight", "line_bytes")),
    AluBursts.KIND: (AluBursts, ("max_width", "width_distribution")),
}


def genspec_from_json(doc: Union[str, dict]) -> GenSpec:
    """Build a GenSpec from a JSON document (text or already-parsed dict).

    Expected shape: {"seed": int, "length": int, "kind": str, ...kind fields}.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"generator spec is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("generator spec must be a JSON object")
    try:
        kind_name = doc["kind"]
        seed = int(doc["seed"])
        length = int(doc["length"])
    except KeyError as exc:
        raise ConfigError(f"generator spec missing field {exc}") from exc
    if kind_name not in _KIND_FIELDS:
        raise ConfigError(f"unknown generator kind {kind_name!r}; "
                          f"expected one of {sorted(_KIND_FIELDS)}")
    cls, fields = _KIND_FIELDS[kind_name]
    kwargs = {}
    for field in fields:
        if field in doc:
            kwargs[field] = doc[field]
        elif field == "line_bytes":
            continue  # has a default
        else:
            raise ConfigError(f"generator kind {kind_name!r} requires field {field!r}")
    if "width_distribution" in kwargs:
        kwargs["width_distribution"] = tuple(kwargs["width_distribution"])
    extra = set(doc) - {"kind", "seed", "length", *fields}
    if extra:
        raise ConfigError(f"unknown generator spec fields: {sorted(extra)}")
    try:
        kind = cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad generator spec: {exc}") from exc
    return GenSpec(seed=seed, length=length, kind=kind)


def genspec_to_json(spec: GenSpec) -> dict:
    doc = {"kind": spec.kind.KIND, "seed": spec.seed, "length": spec.length}
    for field in _KIND_FIELDS[spec.kind.KIND][1]:
        value = getattr(spec.kind, field)
        doc[field] = list(value) if isinstance(value, tuple) else value
    return doc
