"""Small-dimension quantum states, projective measurements and their behaviors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import BellError, Behavior

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
PROJECTOR_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def _readonly(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GeneralState:
    d_a: int
    d_b: int
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        n = self.d_a * self.d_b
        if rho.shape != (n, n):
            raise BellError(f"density matrix shape {rho.shape} does not match {self.d_a}x{self.d_b}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise BellError("density matrix is not Hermitian")
        rho = (rho + rho.conj().T) / 2
        if abs(np.trace(rho).real - 1) > TRACE_TOL:
            raise BellError(f"density matrix trace {np.trace(rho).real} != 1")
        if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise BellError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "rho", _readonly(rho))

    @classmethod
    def pure(cls, psi: np.ndarray, d_a: int, d_b: int) -> GeneralState:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(d_a, d_b, np.outer(psi, psi.conj()))


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurementSet:
    """``projectors[x][k]`` is the projector for outcome ``k`` of input ``x``."""

    projectors: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        sets = []
        dim = None
        if not self.projectors:
            raise BellError("measurement set needs at least one input")
        for x, outcomes in enumerate(self.projectors):
            mats = tuple(_readonly(np.array(P, dtype=complex)) for P in outcomes)
            if len({m.shape for m in mats}) != 1:
                raise BellError(f"input {x}: projectors have mixed shapes")
            d = mats[0].shape[0]
            dim = dim or d
            if d != dim:
                raise BellError("all inputs must act on the same dimension")
            for k, P in enumerate(mats):
                if np.max(np.abs(P @ P - P)) > PROJECTOR_TOL or np.max(np.abs(P - P.conj().T)) > PROJECTOR_TOL:
                    raise BellError(f"input {x}, outcome {k}: not an orthogonal projector")
            if np.max(np.abs(sum(mats) - np.eye(d))) > PROJECTOR_TOL:
                raise BellError(f"input {x}: projectors do not sum to the identity")
            sets.append(mats)
        if len({len(s) for s in sets}) != 1:
            raise BellError("every input needs the same number of outcomes")
        object.__setattr__(self, "projectors", tuple(sets))

    @property
    def dim(self) -> int:
        return self.projectors[0][0].shape[0]

    @property
    def n_inputs(self) -> int:
        return len(self.projectors)

    @property
    def n_outcomes(self) -> int:
        return len(self.projectors[0])

    @classmethod
    def from_bases(cls, bases: Sequence[np.ndarray]) -> ProjectiveMeasurementSet:
        """One complete basis per input, columns are the basis vectors."""
        return cls(tuple(tuple(np.outer(B[:, k], B[:, k].conj()) for k in range(B.shape[1]))
                         for B in bases))

    @classmethod
    def from_bloch(cls, settings: Sequence[Sequence[float]]) -> ProjectiveMeasurementSet:
        """Qubit observables ``a.sigma``; outcome 0 is +1, outcome 1 is -1."""
        return cls(tuple(tuple(bloch_projectors(s)) for s in settings))


def bloch_setting(vec: Sequence[float]) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise BellError("Bloch setting must be a 3-vector")
    if abs(np.linalg.norm(v) - 1) > 1e-12:
        raise BellError(f"Bloch setting must be a unit vector (norm {np.linalg.norm(v)})")
    return v


def bloch_observable(vec: Sequence[float]) -> np.ndarray:
    x, y, z = bloch_setting(vec)
    return x * PAULI_X + y * PAULI_Y + z * PAULI_Z


def bloch_projectors(vec: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    obs = bloch_observable(vec)
    return (IDENTITY_2 + obs) / 2, (IDENTITY_2 - obs) / 2


def behavior_from_quantum(state: GeneralState, alice: ProjectiveMeasurementSet,
                          bob: ProjectiveMeasurementSet) -> Behavior:
    """Born rule ``p(a,b|x,y) = tr[(P^x_a (x) Q^y_b) rho]``."""
    if (alice.dim, bob.dim) != (state.d_a, state.d_b):
        raise BellError(f"measurement dimensions ({alice.dim}, {bob.dim}) do not match state "
                        f"({state.d_a}, {state.d_b})")
    P = np.array(alice.projectors)  # (x, a, i, j)
    Q = np.array(bob.projectors)  # (y, b, k, l)
    rho = state.rho.reshape(state.d_a, state.d_b, state.d_a, state.d_b)
    p = np.einsum("xaij,ybkl,jlik->abxy", P, Q, rho, optimize=True).real
    return Behavior(p)


class QubitCorrelators(NamedTuple):
    E: float
    A: float
    B: float


def two_qubit_correlators(theta: float, a: Sequence[float], b: Sequence[float]) -> QubitCorrelators:
    """Correlators of ``cos(t)|00> + sin(t)|11>`` for Bloch settings ``a``, ``b``."""
    ax, ay, az = bloch_setting(a)
    bx, by, bz = bloch_setting(b)
    s2, c2 = np.sin(2 * theta), np.cos(2 * theta)
    return QubitCorrelators(az * bz + s2 * (ax * bx - ay * by), c2 * az, c2 * bz)


def partial_state_vector(theta: float) -> np.ndarray:
    if not 0 <= theta <= np.pi / 4 + 1e-15:
        raise BellError(f"entanglement angle {theta} outside [0, pi/4]")
    return np.array([np.cos(theta), 0, 0, np.sin(theta)], dtype=complex)


def partial_state_density(theta: float) -> GeneralState:
    return GeneralState.pure(partial_state_vector(theta), 2, 2)


SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def werner_density(W: float) -> GeneralState:
    """``W |psi-><psi-| + (1 - W) I/4`` on two qubits."""
    if not 0 <= W <= 1:
        raise BellError(f"Werner visibility {W} outside [0, 1]")
    return GeneralState(2, 2, W * np.outer(SINGLET, SINGLET.conj()) + (1 - W) * np.eye(4) / 4)


def maximally_entangled(d: int) -> GeneralState:
    """``d^{-1/2} sum_j |jj>``."""
    psi = np.eye(d, dtype=complex).ravel() / np.sqrt(d)
    return GeneralState.pure(psi, d, d)


def fourier_basis(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def mub_pair(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Computational and Fourier bases (columns), mutually unbiased in every d."""
    if d < 2:
        raise BellError("mutually unbiased bases need d >= 2")
    return np.eye(d, dtype=complex), fourier_basis(d)


def intermediate_projector(s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Projector onto the top eigenvector of the equal mixture of ``s1`` and ``s2``."""
    s1 = np.asarray(s1, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    for s in (s1, s2):
        if abs(np.linalg.norm(s) - 1) > 1e-12:
            raise BellError("intermediate_projector needs unit vectors")
    if abs(np.vdot(s1, s2)) < 1e-12:
        raise BellError("orthogonal states have a degenerate mixture; no unique intermediate state")
    mix = (np.outer(s1, s1.conj()) + np.outer(s2, s2.conj())) / 2
    _, vecs = np.linalg.eigh(mix)
    top = vecs[:, -1]
    return np.outer(top, top.conj())


def state_to_json(state: GeneralState) -> dict:
    return {"d_a": state.d_a, "d_b": state.d_b,
            "rho": [[[z.real, z.imag] for z in row] for row in state.rho]}


def state_from_json(doc: dict) -> GeneralState:
    rho = np.array([[complex(re, im) for re, im in row] for row in doc["rho"]])
    return GeneralState(int(doc["d_a"]), int(doc["d_b"]), rho)


def measurements_to_json(ms: ProjectiveMeasurementSet) -> list:
    return [[[[[z.real, z.imag] for z in row] for row in P] for P in outcomes]
            for outcomes in ms.projectors]


def measurements_from_json(doc: list) -> ProjectiveMeasurementSet:
    return ProjectiveMeasurementSet(tuple(
        tuple(np.array([[complex(re, im) for re, im in row] for row in P]) for P in outcomes)
        for outcomes in doc))
