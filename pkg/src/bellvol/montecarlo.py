"""Monte Carlo estimation of relative violation volumes.

Every configuration draws the functional's directions independently and
uniformly on the sphere (``cos(theta) ~ U[-1, 1]``, ``phi ~ U[0, 2 pi)``).

Random streams
--------------
RNG contract ``philox4x64-seedseq-v1``: chunk ``i`` of a plan with seed ``s``
uses ``numpy.random.Philox`` keyed by ``SeedSequence(s, spawn_key=(i,))``.
Inside a chunk the uniforms are drawn as one ``(m, k, 2)`` array
(``[..., 0]`` -> ``cos(theta)``, ``[..., 1]`` -> ``phi``). Counts depend
only on ``(seed, chunk_size, n_samples)``, never on the number of workers.
Changing any of this is a breaking change for pinned-seed results.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .inequalities import BellFunctional
from .quantum import Direction, TwoQubitState

log = logging.getLogger(__name__)

RNG_CONTRACT = "philox4x64-seedseq-v1"
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SamplingPlan:
    n_samples: int
    seed: int = 0
    chunk_size: int = 2**16
    fix_first_direction: bool = False
    confidence_level: float = 0.99

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if not 0 <= self.seed <= SEED_MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 0 < self.confidence_level < 1:
            raise ValueError("confidence_level must lie in (0, 1)")

    @property
    def n_chunks(self) -> int:
        return -(-self.n_samples // self.chunk_size)

    def chunk_length(self, index: int) -> int:
        return min(self.chunk_size, self.n_samples - index * self.chunk_size)


@dataclass(frozen=True)
class ViolationEstimate:
    fraction: float
    n_violating: int
    n_samples: int
    stderr: float
    ci_low: float
    ci_high: float
    confidence_level: float
    inequality_id: str
    state_label: str
    mode: str | None
    seed: int
    rng: str = RNG_CONTRACT

    def to_dict(self) -> dict:
        return asdict(self)


class SymmetryError(ValueError):
    """Pinning ``a`` to the z axis requested for a state that is not rotationally invariant."""


def wilson_interval(k: int, n: int, confidence: float = 0.99) -> tuple[float, float]:
    """Wilson score interval for ``k`` successes out of ``n``."""
    if n < 1 or not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n and n >= 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = k / n
    z2n = z * z / n
    centre = (p + z2n / 2) / (1 + z2n)
    half = z / (1 + z2n) * math.sqrt(p * (1 - p) / n + z2n / (4 * n))
    lo, hi = centre - half, centre + half
    # the interval always contains p; clamp rounding at the edges
    return max(0.0, min(lo, p)), min(1.0, max(hi, p))


def chunk_generator(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def directions_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Map ``[..., 2]`` uniforms on [0, 1) to unit vectors ``[..., 3]``."""
    cos_t = 2.0 * u[..., 0] - 1.0
    phi = 2.0 * np.pi * u[..., 1]
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t * cos_t))
    return np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=-1)


def sample_direction(stream: np.random.Generator) -> Direction:
    return Direction.from_components(*directions_from_uniforms(stream.random(2)))


def sample_directions(stream: np.random.Generator, n: int) -> np.ndarray:
    return directions_from_uniforms(stream.random((n, 2)))


def chunk_settings(plan: SamplingPlan, functional: BellFunctional, index: int) -> np.ndarray:
    """Directions for chunk ``index``, shape ``(m, n_directions, 3)``."""
    m = plan.chunk_length(index)
    rng = chunk_generator(plan.seed, index)
    dirs = directions_from_uniforms(rng.random((m, functional.n_directions, 2)))
    if plan.fix_first_direction:
        dirs[:, 0] = (0.0, 0.0, 1.0)
    return dirs


def count_chunk(
    state: TwoQubitState, functional: BellFunctional, plan: SamplingPlan, index: int
) -> int:
    dirs = chunk_settings(plan, functional, index)
    return int(np.count_nonzero(functional.margins(state.T, dirs) > 0.0))


def default_workers() -> int:
    env = os.environ.get("BELLVOL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def estimate_volume(
    state: TwoQubitState,
    functional: BellFunctional,
    plan: SamplingPlan,
    workers: int | None = None,
) -> ViolationEstimate:
    """Fraction of uniformly drawn settings for which ``functional`` is violated."""
    if plan.fix_first_direction and not state.is_rotationally_invariant:
        raise SymmetryError(
            f"fixing a = (0, 0, 1) is only valid for rotationally invariant states "
            f"(r = s = 0, T proportional to identity); {state.label!r} is not"
        )
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("workers must be >= 1")
    chunks = range(plan.n_chunks)
    if workers == 1:
        counts = [count_chunk(state, functional, plan, i) for i in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda i: count_chunk(state, functional, plan, i), chunks))
    k = sum(counts)
    n = plan.n_samples
    p = k / n
    lo, hi = wilson_interval(k, n, plan.confidence_level)
    log.debug("%s/%s: %d/%d violating", functional.name, state.label, k, n)
    return ViolationEstimate(
        fraction=p,
        n_violating=k,
        n_samples=n,
        stderr=math.sqrt(p * (1 - p) / n),
        ci_low=lo,
        ci_high=hi,
        confidence_level=plan.confidence_level,
        inequality_id=functional.id.value,
        state_label=state.label,
        mode=None if functional.mode is None else functional.mode.value,
        seed=plan.seed,
    )


def derived_seed(seed: int, index: int) -> int:
    return (seed ^ index) & SEED_MASK


def sweep(
    states: Sequence[TwoQubitState],
    functional: BellFunctional,
    plan: SamplingPlan,
    workers: int | None = None,
) -> list[ViolationEstimate]:
    """One estimate per state, state ``i`` using seed ``plan.seed ^ i``."""
    if not states:
        raise ValueError("sweep needs at least one state")
    out = []
    for i, state in enumerate(states):
        sub = SamplingPlan(
            plan.n_samples,
            derived_seed(plan.seed, i),
            plan.chunk_size,
            plan.fix_first_direction,
            plan.confidence_level,
        )
        try:
            out.append(estimate_volume(state, functional, sub, workers))
        except ValueError as exc:
            raise type(exc)(f"sweep entry {i} ({state.label}): {exc}") from exc
    return out
