"""Rotating architectural-to-physical register mapping with wear counters.

Architectural register a lives at physical slot (a + rotator) mod N.
rotate() bumps the rotator and shifts every stored value one slot up so
program-visible contents never change; only the physical location of each
value (and therefore which slot future writes wear out) moves. Per-slot
write counters feed the wear statistics.

The value shift itself is not charged to the write counters by default:
rotation fires orders of magnitude less often than ordinary writes, so
charging it would drown the workload signal. Pass count_rotation_shifts
to charge every slot one write per rotation for pessimistic accounting.
"""

from __future__ import annotations

from .workload import ConfigError

DEFAULT_ROTATION_PERIOD = 10_000_000


def ring_preset(name: str) -> tuple[tuple[str, int], ...]:
    """Named ring compositions for the CLI and the simulator.

    gpr16         16 integer registers
    gpr-flags-sp  16 integer registers plus FLAGS and SP in the last two slots
    fp32          32 floating-point registers
    """
    if name == "gpr16":
        return tuple(("GPR", i) for i in range(16))
    if name == "gpr-flags-sp":
        return tuple(("GPR", i) for i in range(16)) + (("FLAGS", 0), ("SP", 0))
    if name == "fp32":
        return tuple(("FP", i) for i in range(32))
    raise ConfigError(f"unknown ring preset {name!r}; "
                      "expected gpr16, gpr-flags-sp, or fp32")


class RotatingRegFile:
    __slots__ = ("ring_members", "num_slots", "rotation_period",
                 "count_rotation_shifts", "rotator", "rotations_done",
                 "values", "phys_writes", "_index")

    def __init__(self, ring_members, rotation_period: int = DEFAULT_ROTATION_PERIOD,
                 count_rotation_shifts: bool = False):
        members = tuple((str(c), int(i)) for c, i in ring_members)
        if not members:
            raise ValueError("ring needs at least one member")
        if len(set(members)) != len(members):
            raise ValueError("ring members must be distinct")
        if rotation_period < 1:
            raise ValueError("rotation_period must be >= 1")
        self.ring_members = members
        self.num_slots = len(members)
        self.rotation_period = rotation_period
        self.count_rotation_shifts = count_rotation_shifts
        self.rotator = 0
        self.rotations_done = 0
        self.values = [0] * self.num_slots
        self.phys_writes = [0] * self.num_slots
        self._index = {m: i for i, m in enumerate(members)}

    def member_index(self, reg_class: str, arch_id: int) -> int | None:
        """Ring position of an architectural register, None if not enrolled."""
        return self._index.get((reg_class, arch_id))

    def map(self, arch_index: int) -> int:
        if not 0 <= arch_index < self.num_slots:
            raise IndexError(f"arch index {arch_index} outside [0, {self.num_slots})")
        return (arch_index + self.rotator) % self.num_slots

    def write(self, arch_index: int, value: int) -> None:
        phys = self.map(arch_index)
        self.values[phys] = value
        self.phys_writes[phys] += 1

    def read(self, arch_index: int) -> int:
        return self.values[self.map(arch_index)]

    def rotate(self) -> None:
        self.rotator = (self.rotator + 1) % self.num_slots
        self.values[:] = self.values[-1:] + self.values[:-1]
        self.rotations_done += 1
        if self.count_rotation_shifts:
            for i in range(self.num_slots):
                self.phys_writes[i] += 1

    def write_snapshot(self) -> tuple[int, ...]:
        return tuple(self.phys_writes)
