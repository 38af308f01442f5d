"""Measurement directions and two-qubit states in Bloch form.

A two-qubit state is stored as its local Bloch vectors ``r`` (party A),
``s`` (party B) and the 3x3 correlation tensor ``T`` with
``T[i, j] = <sigma_i (x) sigma_j>``. The joint correlation of spin
measurements along unit vectors ``a`` and ``b`` is then ``a @ T @ b``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

UNIT_TOL = 1e-12
RENORMALIZE_TOL = 1e-6
PSD_TOL = 1e-9

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
_I2 = np.eye(2, dtype=complex)


class StateError(ValueError):
    """Raised for invalid states or malformed state files."""


@dataclass(frozen=True)
class Direction:
    """Unit vector on the sphere. Build with :meth:`from_components` or
    :func:`direction_from_spherical` rather than directly."""

    ux: float
    uy: float
    uz: float

    def __post_init__(self):
        norm = math.sqrt(self.ux**2 + self.uy**2 + self.uz**2)
        if not abs(norm - 1.0) <= UNIT_TOL:
            raise ValueError(f"not a unit vector (norm={norm!r}); use Direction.from_components")

    @classmethod
    def from_components(cls, ux: float, uy: float, uz: float) -> "Direction":
        """Renormalize components within ``1e-6`` of unit norm; reject the rest."""
        v = np.array([ux, uy, uz], dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("direction components must be finite")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > RENORMALIZE_TOL:
            raise ValueError(f"direction norm {norm!r} is not within {RENORMALIZE_TOL} of 1")
        v = v / norm
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.ux, self.uy, self.uz])

    def rotated(self, R: np.ndarray) -> "Direction":
        return Direction.from_components(*(np.asarray(R) @ self.as_array()))

    def spherical(self) -> tuple[float, float]:
        """Return ``(theta, phi)`` with ``theta`` in [0, pi] and ``phi`` in [0, 2 pi)."""
        theta = math.atan2(math.hypot(self.ux, self.uy), self.uz)
        phi = math.atan2(self.uy, self.ux) % (2 * math.pi)
        return theta, phi


def direction_from_spherical(theta: float, phi: float) -> Direction:
    """Unit vector ``(sin t cos p, sin t sin p, cos t)``.

    ``theta`` is clamped to [0, pi] and ``phi`` is wrapped modulo 2 pi.
    NaN or infinite input raises ``ValueError``.
    """
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise ValueError("spherical angles must be finite")
    theta = min(math.pi, max(0.0, theta))
    phi = phi % (2 * math.pi)
    st = math.sin(theta)
    return Direction.from_components(st * math.cos(phi), st * math.sin(phi), math.cos(theta))


@dataclass(frozen=True)
class AngleSettings:
    """Polar angles of ``b`` and ``c`` with azimuths, in the chart where ``a = z``."""

    theta_b: float
    theta_c: float
    phi_b: float
    phi_c: float

    @property
    def phi(self) -> float:
        return self.phi_c - self.phi_b

    @property
    def lam(self) -> float:
        return self.phi_c + self.phi_b

    def directions(self) -> tuple[Direction, Direction]:
        return (
            direction_from_spherical(self.theta_b, self.phi_b),
            direction_from_spherical(self.theta_c, self.phi_c),
        )

    @classmethod
    def from_directions(cls, b: Direction, c: Direction) -> "AngleSettings":
        theta_b, phi_b = b.spherical()
        theta_c, phi_c = c.spherical()
        return cls(theta_b, theta_c, phi_b, phi_c)


def _readonly(x, shape) -> np.ndarray:
    arr = np.array(x, dtype=float)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Two-qubit density operator in Bloch form; PSD-checked on construction."""

    r: np.ndarray
    s: np.ndarray
    T: np.ndarray
    label: str = "state"
    min_eigenvalue: float = field(init=False, repr=False)

    def __post_init__(self):
        for name, shape in (("r", (3,)), ("s", (3,)), ("T", (3, 3))):
            try:
                object.__setattr__(self, name, _readonly(getattr(self, name), shape))
            except (ValueError, TypeError) as exc:
                raise StateError(f"field {name!r}: {exc}") from None
        lam = float(np.linalg.eigvalsh(self.density_matrix()).min())
        if lam < -PSD_TOL:
            raise StateError(
                f"state {self.label!r} is not positive semidefinite (min eigenvalue {lam:.3e})"
            )
        object.__setattr__(self, "min_eigenvalue", lam)

    def density_matrix(self) -> np.ndarray:
        """Reconstruct the 4x4 Hermitian operator."""
        rho = np.kron(_I2, _I2).astype(complex)
        for i in range(3):
            rho += self.r[i] * np.kron(PAULI[i], _I2)
            rho += self.s[i] * np.kron(_I2, PAULI[i])
            for j in range(3):
                rho += self.T[i, j] * np.kron(PAULI[i], PAULI[j])
        return rho / 4

    @property
    def is_rotationally_invariant(self) -> bool:
        """True when ``r = s = 0`` and ``T`` is a multiple of the identity."""
        t = self.T[0, 0]
        return (
            not np.any(self.r)
            and not np.any(self.s)
            and np.array_equal(self.T, t * np.eye(3))
        )

    def to_dict(self) -> dict:
        return {
            "r": self.r.tolist(),
            "s": self.s.tolist(),
            "T": self.T.tolist(),
            "label": self.label,
        }


def singlet() -> TwoQubitState:
    return TwoQubitState(np.zeros(3), np.zeros(3), -np.eye(3), label="singlet")


def werner(p: float) -> TwoQubitState:
    """Singlet mixed with white noise: ``p |psi-><psi-| + (1 - p) I/4``."""
    if not 0.0 <= p <= 1.0:
        raise StateError(f"Werner weight p must lie in [0, 1], got {p!r}")
    return TwoQubitState(np.zeros(3), np.zeros(3), -p * np.eye(3), label=f"werner({p:g})")


def product_state(r, s, label: str = "product") -> TwoQubitState:
    """Uncorrelated product of two qubit states, ``T = r s^T``."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    return TwoQubitState(r, s, np.outer(r, s), label=label)


def correlation(state: TwoQubitState, a: Direction, b: Direction) -> float:
    """Expected product of the +/-1 outcomes along ``a`` (A) and ``b`` (B)."""
    return float(a.as_array() @ state.T @ b.as_array())


def correlations(T: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise ``a_n @ T @ b_n`` for stacked directions of shape ``(n, 3)``."""
    return np.einsum("ni,ni->n", a @ T, b)


def load_state(path: str | Path) -> TwoQubitState:
    """Read a state from JSON with fields ``r``, ``s``, ``T`` and optional ``label``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise StateError(f"cannot read state file {str(path)!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise StateError(f"state file {str(path)!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise StateError("state file must contain a JSON object")
    for name in ("r", "s", "T"):
        if name not in data:
            raise StateError(f"field {name!r}: missing")
    label = data.get("label", path.stem)
    if not isinstance(label, str):
        raise StateError("field 'label': must be a string")
    return TwoQubitState(data["r"], data["s"], data["T"], label=label)
