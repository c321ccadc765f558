"""Three-qubit bit-flip repetition code, classical and quantum.

Quantum syndromes are eigenvalue pairs ``(m1, m2)`` of ``Z Z I`` and
``Z I Z`` with values in ``{+1, -1}``; classical syndromes are bit pairs.
The correspondence is ``+1 <-> 0`` and ``-1 <-> 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from qipkit import linalg
from qipkit.errors import InvalidStateError
from qipkit.qcircuit import apply_circuit, embed_gate, repetition_encoder
from qipkit.qmeasure import ProjectiveMeasurement, projective_from_observable, sample, von_neumann
from qipkit.qstate import PureState

ANCILLA_TOL = 1e-9


# -- classical reference -------------------------------------------------

def classical_encode(bit: int) -> tuple:
    if bit not in (0, 1):
        raise ValueError(f"expected a bit, got {bit!r}")
    return (bit, bit, bit)


def classical_syndrome(word) -> tuple:
    """``(y0 xor y1, y0 xor y2)``."""
    y0, y1, y2 = word
    return (y0 ^ y1, y0 ^ y2)


_CLASSICAL_TABLE = {(0, 0): (0, 0, 0), (1, 1): (1, 0, 0), (1, 0): (0, 1, 0), (0, 1): (0, 0, 1)}


def classical_correct(word, syndrome=None) -> tuple:
    if syndrome is None:
        syndrome = classical_syndrome(word)
    fix = _CLASSICAL_TABLE[tuple(syndrome)]
    return tuple(y ^ f for y, f in zip(word, fix))


def syndrome_to_bits(s: tuple) -> tuple:
    return tuple(0 if v == 1 else 1 for v in s)


def bits_to_syndrome(b: tuple) -> tuple:
    return tuple(1 if v == 0 else -1 for v in b)


# -- quantum code ----------------------------------------------------------

_ZZI = linalg.kron_all(linalg.SIGMA_Z, linalg.SIGMA_Z, linalg.I2)
_ZIZ = linalg.kron_all(linalg.SIGMA_Z, linalg.I2, linalg.SIGMA_Z)
M1 = projective_from_observable(_ZZI)
M2 = projective_from_observable(_ZIZ)


def _proj(*bitstrings) -> np.ndarray:
    p = np.zeros((8, 8), dtype=complex)
    for b in bitstrings:
        i = int(b, 2)
        p[i, i] = 1.0
    return p


FOUR_PROJECTORS = ProjectiveMeasurement(
    (
        _proj("000", "111"),
        _proj("100", "011"),
        _proj("010", "101"),
        _proj("001", "110"),
    ),
    labels=(1, 2, 3, 4),
)

# syndrome -> qubit to flip (None = no action)
CORRECTION_TABLE = {(1, 1): None, (-1, -1): 0, (-1, 1): 1, (1, -1): 2}
# space index of the four-projector decoder -> flipped qubit
SPACE_TO_POSITION = {1: None, 2: 0, 3: 1, 4: 2}

ErrorSpec = Union[None, int, str]


def pauli_word(word: str) -> np.ndarray:
    """8x8 matrix of a 3-letter Pauli word such as ``"XXI"``."""
    ops = {"I": linalg.I2, "X": linalg.SIGMA_X, "Y": linalg.SIGMA_Y, "Z": linalg.SIGMA_Z}
    if len(word) != 3:
        raise ValueError(f"expected a 3-letter Pauli word, got {word!r}")
    return linalg.kron_all(*(ops[c] for c in word.upper()))


def error_operator(e: ErrorSpec) -> np.ndarray:
    """``None`` for no error, ``0``/``1``/``2`` for a single X flip, or a Pauli word."""
    if e is None:
        return np.eye(8, dtype=complex)
    if isinstance(e, str):
        return pauli_word(e)
    if e in (0, 1, 2):
        return embed_gate(linalg.SIGMA_X, [e], 3)
    raise ValueError(f"unsupported error {e!r}")


def encode(alpha: complex, beta: complex) -> PureState:
    """``alpha|0> + beta|1> -> alpha|000> + beta|111>`` via the two-CNOT encoder."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > linalg.ATOL:
        raise InvalidStateError("logical amplitudes are not normalized")
    inp = np.zeros(8, dtype=complex)
    inp[0b000] = alpha
    inp[0b100] = beta
    return apply_circuit(repetition_encoder(), PureState(inp))


def inject(state: PureState, e: ErrorSpec) -> PureState:
    if state.dim != 8:
        raise InvalidStateError("expected a 3-qubit state")
    return PureState(error_operator(e) @ state.amplitudes)


def measure_syndrome(state: PureState, rng: Optional[np.random.Generator] = None):
    """Measure ``Z Z I`` then ``Z I Z``; returns ``((m1, m2), post_state)``.

    Single-flip corrupted codewords give a deterministic outcome and are left
    unchanged. Superpositions across error spaces collapse at random, which
    requires ``rng``.
    """
    outcome = []
    for m in (M1, M2):
        dist = von_neumann(state, m)
        support = np.flatnonzero(dist.probs > 1e-12)
        if support.size == 1:
            i = int(support[0])
        else:
            if rng is None:
                raise ValueError("state spans several error spaces; pass rng to sample the syndrome")
            i = sample(dist, rng)
        outcome.append(int(dist.labels[i]))
        state = dist.post_states[i]
    return tuple(outcome), state


def correct(state: PureState, syndrome: tuple) -> PureState:
    pos = CORRECTION_TABLE[tuple(syndrome)]
    return state if pos is None else inject(state, pos)


def decode(state: PureState) -> PureState:
    """Run the encoder backwards and check the ancillas are back in |00>."""
    u = repetition_encoder().unitary()
    v = u.conj().T @ state.amplitudes
    leak = float(np.sum(np.abs(v.reshape(2, 4)[:, 1:]) ** 2))
    if leak > ANCILLA_TOL:
        raise InvalidStateError(f"ancillas not in |00> after decoding (weight {leak:.3e})")
    logical = v.reshape(2, 4)[:, 0]
    return PureState(logical / np.linalg.norm(logical))


def decode_logical(state: PureState) -> PureState:
    """Logical amplitudes read off the ``|000>``/``|111>`` components (no ancilla check)."""
    a, b = state.amplitudes[0b000], state.amplitudes[0b111]
    norm = math.hypot(abs(a), abs(b))
    if norm < 1e-12:
        raise InvalidStateError("state has no weight on the code space")
    return PureState(np.array([a, b]) / norm)


def four_projector_decode(state: PureState, rng: Optional[np.random.Generator] = None):
    """Von Neumann measurement onto the four error spaces; returns ``(index, post_state)``."""
    dist = von_neumann(state, FOUR_PROJECTORS)
    support = np.flatnonzero(dist.probs > 1e-12)
    if support.size == 1:
        i = int(support[0])
    else:
        if rng is None:
            raise ValueError("state spans several error spaces; pass rng to sample")
        i = sample(dist, rng)
    return dist.labels[i], dist.post_states[i]


@dataclass(frozen=True)
class EccReport:
    error: str
    syndrome: tuple
    recovered: bool
    fidelity: float


def run_pipeline(alpha: complex, beta: complex, e: ErrorSpec) -> EccReport:
    """encode -> inject -> syndrome -> correct -> compare with the logical input."""
    original = PureState([alpha, beta])
    corrupted = inject(encode(alpha, beta), e)
    syndrome, post = measure_syndrome(corrupted)
    fixed = correct(post, syndrome)
    recovered_state = decode_logical(fixed)
    fid = original.overlap(recovered_state)
    try:
        decode(fixed)
        in_code = True
    except InvalidStateError:
        in_code = False
    ok = in_code and abs(1 - fid) <= linalg.ATOL
    return EccReport("none" if e is None else str(e), syndrome, ok, fid)
