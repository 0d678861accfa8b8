"""Execution-unit allocation policies with per-unit usage accounting.

Three policies over N identical units:

* fixed-priority: always grab the lowest-indexed units. This is the
  conventional scheduler and the wear baseline; unit 0 ages fastest.
* counter-rotate: a per-cycle counter picks the leading unit, so the
  selection window walks around the units. The counter is kept modulo N
  (wrap bias from a fixed-width counter would unbalance units whenever
  N does not divide the counter period).
* toggle-balance: each unit holds a single excitation bit and the
  allocator holds a single global bit. Units whose bit matches the
  global bit form the eligible set M; requests are served from M
  lowest-index-first, toggling served bits, and when a request drains M
  the global bit flips and the shortfall comes from the remaining units.
  This equalizes usage without any wide counters.
"""

from __future__ import annotations

from dataclasses import dataclass

FIXED_PRIORITY = "fixed-priority"
COUNTER_ROTATE = "counter-rotate"
TOGGLE_BALANCE = "toggle-balance"

POLICIES = (FIXED_PRIORITY, COUNTER_ROTATE, TOGGLE_BALANCE)


@dataclass(frozen=True, slots=True)
class AllocResult:
    """Units granted by one allocation, in grant order, plus the bit mask."""

    units: tuple[int, ...]
    mask: int


class AluAllocator:
    __slots__ = ("num_units", "policy", "usage", "_counter", "_ex", "_global")

    def __init__(self, num_units: int, policy: str = FIXED_PRIORITY):
        if num_units < 1:
            raise ValueError("num_units must be >= 1")
        if policy not in POLICIES:
            raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
        self.num_units = num_units
        self.policy = policy
        self.usage = [0] * num_units
        self._counter = 0          # counter-rotate: kept modulo num_units
        self._ex = [0] * num_units # toggle-balance: per-unit bits
        self._global = 0           # toggle-balance: global bit

    def allocate(self, k: int) -> AllocResult:
        """Grant k of the N units for this cycle and bump their usage."""
        if not 0 <= k <= self.num_units:
            raise ValueError(f"k must be in [0, {self.num_units}], got {k}")
        if self.policy == FIXED_PRIORITY:
            units = tuple(range(k))
        elif self.policy == COUNTER_ROTATE:
            lead = self._counter
            units = tuple((lead + j) % self.num_units for j in range(k))
            self._counter = (self._counter + 1) % self.num_units
        else:
            units = self._toggle_balance(k)
        for i in units:
            self.usage[i] += 1
        mask = 0
        for i in units:
            mask |= 1 << i
        return AllocResult(units=units, mask=mask)

    def _toggle_balance(self, k: int) -> tuple[int, ...]:
        g = self._global
        members = [i for i in range(self.num_units) if self._ex[i] == g]
        if k < len(members):
            selected = members[:k]
        else:
            rest = [i for i in range(self.num_units) if self._ex[i] != g]
            selected = members + rest[: k - len(members)]
            self._global = g ^ 1
        for i in selected:
            self._ex[i] ^= 1
        return tuple(selected)

    def usage_snapshot(self) -> tuple[int, ...]:
        return tuple(self.usage)

    def clone(self) -> "AluAllocator":
        other = AluAllocator(self.num_units, self.policy)
        other.usage = list(self.usage)
        other._counter = self._counter
        other._ex = list(self._ex)
        other._global = self._global
        return other

    # read-only views for tests and debugging
    @property
    def ex_bits(self) -> tuple[int, ...]:
        return tuple(self._ex)

    @property
    def global_bit(self) -> int:
        return self._global
