"""Self-contained deterministic RNG for reproducible shuffles and draws.

The generator is SplitMix64 over a 64-bit state. Using a fixed, fully
documented procedure (rather than a library RNG whose stream may change
between versions or platforms) keeps seeded outputs bit-identical everywhere:

* ``next_u64``: state += 0x9E3779B97F4A7C15; the result is the state mixed
  by two xor-shift-multiply rounds (constants 0xBF58476D1CE4E5B9 and
  0x94D049BB133111EB) and a final ``z ^ (z >> 31)``.
* ``below(n)``: rejection sampling on ``next_u64`` so the draw is exactly
  uniform on [0, n).
* ``shuffle``: Fisher-Yates from the last position down, with ``below``.
* ``uniform(lo, hi)``: the top 53 bits of ``next_u64`` scaled into [0, 1).
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SeededRng:
    """Deterministic 64-bit generator; identical output on every platform."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Exactly uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi]."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.below(hi - lo + 1)

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform float in [lo, hi)."""
        u = (self.next_u64() >> 11) / float(1 << 53)
        return lo + (hi - lo) * u

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
