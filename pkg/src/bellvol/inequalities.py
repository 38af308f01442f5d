"""Bell functionals and their violation margins.

Margins are sign-normalized: a configuration violates the inequality when
its margin is strictly positive. Two functionals are covered:

* ``Bell1964``: ``|E(a,b) - E(a,c)| <= 1 + E(b,c)``. The local bound holds
  only under perfect anticorrelation along equal axes, which is true for the
  singlet but not in general. Product states such as ``r = s = z`` can give a
  positive margin, so a "violation" for states other than singlet-like ones
  does not certify nonlocality.
* ``CHSH``: ``|E(a,b) + E(a,b') + E(a',b) - E(a',b')| <= 2``, a genuine
  local-hidden-variable bound for every state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .quantum import Direction, TwoQubitState, correlation, correlations


class InequalityId(str, enum.Enum):
    BELL1964 = "bell1"
    CHSH = "chsh"


class ChshMode(str, enum.Enum):
    FIXED = "fixed"
    MAX = "max"


@dataclass(frozen=True)
class Margin:
    value: float
    violated: bool


def _margin(value: float, tolerance: float) -> Margin:
    return Margin(float(value), bool(value > tolerance))


@dataclass(frozen=True)
class BellFunctional:
    """Descriptor of a Bell inequality together with its vectorized margin.

    ``n_directions`` is the number of distinct unit vectors drawn per
    configuration (the Bell-1964 settings share ``b`` between the parties).
    """

    id: InequalityId
    n_settings_A: int
    n_settings_B: int
    n_directions: int
    classical_bound: float
    quantum_bound: float
    mode: ChshMode | None = None

    def margins(self, T: np.ndarray, dirs: np.ndarray) -> np.ndarray:
        """Margins for stacked settings ``dirs`` of shape ``(n, n_directions, 3)``."""
        if self.id is InequalityId.BELL1964:
            return bell1_margins(T, dirs[:, 0], dirs[:, 1], dirs[:, 2])
        return chsh_margins(T, dirs[:, 0], dirs[:, 1], dirs[:, 2], dirs[:, 3], self.mode)

    @property
    def name(self) -> str:
        if self.mode is None:
            return self.id.value
        return f"{self.id.value}:{self.mode.value}"


BELL1964 = BellFunctional(InequalityId.BELL1964, 2, 2, 3, classical_bound=1.0, quantum_bound=1.5)
CHSH = BellFunctional(InequalityId.CHSH, 2, 2, 4, 2.0, 2 * math.sqrt(2), ChshMode.FIXED)
CHSH_MAX = BellFunctional(InequalityId.CHSH, 2, 2, 4, 2.0, 2 * math.sqrt(2), ChshMode.MAX)


def get_functional(name: str, mode: str = "fixed") -> BellFunctional:
    ident = InequalityId(name)
    if ident is InequalityId.BELL1964:
        return BELL1964
    return CHSH if ChshMode(mode) is ChshMode.FIXED else CHSH_MAX


def bell1_margin(
    state: TwoQubitState, a: Direction, b: Direction, c: Direction, tolerance: float = 0.0
) -> Margin:
    value = (
        abs(correlation(state, a, b) - correlation(state, a, c))
        - 1.0
        - correlation(state, b, c)
    )
    return _margin(value, tolerance)


def bell1_margin_angles(
    theta_b: float, theta_c: float, phi: float, tolerance: float = 0.0
) -> Margin:
    """Singlet Bell-1964 margin with ``a`` on the z axis.

    ``phi`` is the azimuth difference ``phi_c - phi_b``; the azimuth sum
    drops out.
    """
    cb, cc = math.cos(theta_b), math.cos(theta_c)
    rhs = 1.0 - math.sin(theta_c) * math.sin(theta_b) * math.cos(phi) - cc * cb
    return _margin(abs(cc - cb) - rhs, tolerance)


def bell1_margins(T, a, b, c) -> np.ndarray:
    return np.abs(correlations(T, a, b) - correlations(T, a, c)) - 1.0 - correlations(T, b, c)


def chsh_value(
    state: TwoQubitState, a: Direction, a2: Direction, b: Direction, b2: Direction
) -> float:
    return (
        correlation(state, a, b)
        + correlation(state, a, b2)
        + correlation(state, a2, b)
        - correlation(state, a2, b2)
    )


def _chsh_terms(T, a, a2, b, b2):
    return (
        correlations(T, a, b),
        correlations(T, a, b2),
        correlations(T, a2, b),
        correlations(T, a2, b2),
    )


def chsh_margins(T, a, a2, b, b2, mode: ChshMode | str = ChshMode.FIXED) -> np.ndarray:
    e = _chsh_terms(T, a, a2, b, b2)
    total = e[0] + e[1] + e[2] + e[3]
    if ChshMode(mode) is ChshMode.FIXED:
        return np.abs(total - 2 * e[3]) - 2.0
    # moving the minus sign to term k gives total - 2 e_k
    return np.max([np.abs(total - 2 * ek) for ek in e], axis=0) - 2.0


def chsh_margin(
    state: TwoQubitState,
    a: Direction,
    a2: Direction,
    b: Direction,
    b2: Direction,
    mode: ChshMode | str = ChshMode.FIXED,
    tolerance: float = 0.0,
) -> Margin:
    vecs = [d.as_array()[None, :] for d in (a, a2, b, b2)]
    value = chsh_margins(state.T, *vecs, mode=mode)[0]
    return _margin(value, tolerance)
