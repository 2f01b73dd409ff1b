"""Bell labels and Pauli-frame bookkeeping for entanglement swapping.

A frame ``(a, b)`` on an n-pair block stands for ``X^a Z^b`` applied to the
receiver-side halves of ``|phi+>^n``; phases are dropped. Swapping connects
qubit ``i`` of the left block to qubit ``i`` of the right block, so frames
compose by XOR together with the Bell-measurement outcome.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .gf2 import BitVec, DimensionError


class BellLabel(enum.Enum):
    PHI_PLUS = (0, 0)
    PSI_PLUS = (1, 0)
    PHI_MINUS = (0, 1)
    PSI_MINUS = (1, 1)

    @property
    def flags(self) -> tuple[int, int]:
        return self.value


def bell_from_flags(x: int, z: int) -> BellLabel:
    return BellLabel((int(x) & 1, int(z) & 1))


@dataclass(frozen=True)
class PauliFrame:
    a: BitVec  # X exponents
    b: BitVec  # Z exponents

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise DimensionError(f"frame halves differ in length: {len(self.a)} vs {len(self.b)}")

    @classmethod
    def zero(cls, n: int) -> PauliFrame:
        return cls(BitVec.zeros(n), BitVec.zeros(n))

    @property
    def n(self) -> int:
        return len(self.a)

    def __xor__(self, other: PauliFrame) -> PauliFrame:
        return PauliFrame(self.a ^ other.a, self.b ^ other.b)

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def label(self, i: int) -> BellLabel:
        return bell_from_flags(self.a[i], self.b[i])


@dataclass(frozen=True)
class EsOutcome:
    """Per-qubit Bell-measurement flags from one swapping midpoint."""

    mx: BitVec
    mz: BitVec

    def __post_init__(self):
        if len(self.mx) != len(self.mz):
            raise DimensionError(f"outcome halves differ in length: {len(self.mx)} vs {len(self.mz)}")

    @classmethod
    def zero(cls, n: int) -> EsOutcome:
        return cls(BitVec.zeros(n), BitVec.zeros(n))

    @property
    def n(self) -> int:
        return len(self.mx)

    def __xor__(self, other: EsOutcome) -> EsOutcome:
        return EsOutcome(self.mx ^ other.mx, self.mz ^ other.mz)

    def as_frame(self) -> PauliFrame:
        return PauliFrame(self.mx, self.mz)


def compose_es(f1: PauliFrame, f2: PauliFrame, m: EsOutcome) -> PauliFrame:
    """Frame of the end-to-end pair after swapping the pairs framed by f1 and f2."""
    if not f1.n == f2.n == m.n:
        raise DimensionError(f"lengths differ: f1={f1.n}, f2={f2.n}, outcome={m.n}")
    return PauliFrame(f1.a ^ f2.a ^ m.mx, f1.b ^ f2.b ^ m.mz)


# --- dense 4-qubit check of the swapping identity (tests only) ---

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def _pauli(x: int, z: int) -> np.ndarray:
    return np.linalg.matrix_power(_X, x) @ np.linalg.matrix_power(_Z, z)


def bell_vector(label: BellLabel) -> np.ndarray:
    """Two-qubit amplitudes of ``(I (x) X^x Z^z)|phi+>``."""
    return np.kron(_I, _pauli(*label.flags)) @ _PHI_PLUS


def identify_bell(state: np.ndarray, atol: float = 1e-12) -> BellLabel:
    """Label of a normalized two-qubit state that is a Bell state up to phase."""
    for label in BellLabel:
        if abs(abs(np.vdot(bell_vector(label), state)) - 1.0) < atol:
            return label
    raise ValueError("state is not a Bell state")


@dataclass(frozen=True)
class OracleBranch:
    outcome: EsOutcome
    label: BellLabel
    probability: float


def dense_oracle_es(f1: PauliFrame, f2: PauliFrame) -> list[OracleBranch]:
    """Swap two single-pair frames by explicit state-vector projection.

    Qubits are ordered 1, 2, 3, 4 with pairs (1,2) and (3,4); each frame acts
    on its receiver-side qubit (2 and 4). Qubits 2 and 3 are projected onto
    each Bell state and the resulting state of qubits 1 and 4 is identified.
    """
    if f1.n != 1 or f2.n != 1:
        raise DimensionError("the dense oracle handles single-pair frames only")
    pair12 = np.kron(_I, _pauli(f1.a[0], f1.b[0])) @ _PHI_PLUS
    pair34 = np.kron(_I, _pauli(f2.a[0], f2.b[0])) @ _PHI_PLUS
    psi = np.kron(pair12, pair34).reshape(2, 2, 2, 2)
    branches = []
    for mlabel in BellLabel:
        proj = bell_vector(mlabel).reshape(2, 2)
        rest = np.einsum("bc,abcd->ad", proj.conj(), psi).reshape(4)
        prob = float(np.vdot(rest, rest).real)
        label = identify_bell(rest / np.sqrt(prob))
        mx, mz = mlabel.flags
        outcome = EsOutcome(BitVec(1, mx), BitVec(1, mz))
        branches.append(OracleBranch(outcome, label, prob))
    return branches


def single_qubit_frames() -> list[PauliFrame]:
    return [PauliFrame(BitVec(1, x), BitVec(1, z)) for x, z in itertools.product((0, 1), repeat=2)]
