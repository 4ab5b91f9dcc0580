"""Deterministic seed derivation for ensembles and experiments.

Per-run seeds come from splitmix64 applied to (base_seed, index) so that
ensemble members are independent, reproducible, and order-insensitive
(workers can run in any order; run i always gets the same stream).
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(x: int) -> int:
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    """Seed for stream `index` under `base_seed` (splitmix64 of the pair)."""
    return _mix((base_seed & _MASK) + (index + 1) * _GOLDEN)
