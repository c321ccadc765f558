"""Protocol simulations: BB84, E91-style QKD, dense coding, teleportation and
the CHSH game.

Every stochastic routine takes its own ``numpy.random.Generator``; nothing
touches global random state.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from qipkit import linalg
from qipkit.errors import InvalidStateError
from qipkit.qcircuit import apply_gate, standard_gate
from qipkit.qmeasure import bell_basis, projective_from_basis, von_neumann
from qipkit.qstate import PureState, bell_state

_S = 1 / math.sqrt(2)
# BASES[c][bit]: c = 0 is the H (computational) basis, c = 1 the T (Hadamard) basis
BASES = np.array(
    [
        [[1, 0], [0, 1]],
        [[_S, _S], [_S, -_S]],
    ],
    dtype=complex,
)


# -- BB84 ------------------------------------------------------------------

EVE_MODES = ("none", "intercept_resend", "fixed_basis")


@dataclass(frozen=True)
class BB84Config:
    n: int
    delta: float = 1.0
    eve: str = "none"
    channel_flip_prob: float = 0.0
    abort_threshold: float = 0.11
    seed: int = 0
    eve_basis: int = 0  # used only by the fixed-basis eavesdropper

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if self.eve not in EVE_MODES:
            raise ValueError(f"eve must be one of {EVE_MODES}, got {self.eve!r}")
        if not 0 <= self.channel_flip_prob <= 1:
            raise ValueError("channel_flip_prob must lie in [0, 1]")

    @property
    def block_length(self) -> int:
        return math.ceil((4 + self.delta) * self.n)


@dataclass(frozen=True, eq=False)
class ProtocolTranscript:
    alice_bits: np.ndarray
    alice_bases: np.ndarray
    bob_bases: np.ndarray
    bob_bits: np.ndarray
    sifted_indices: np.ndarray
    check_indices: np.ndarray
    key_indices: np.ndarray
    mismatch_count: int
    result: str  # "key", "aborted" or "repeat"
    eve_bases: Optional[np.ndarray] = None

    @property
    def check_error_rate(self) -> float:
        return self.mismatch_count / self.check_indices.size if self.check_indices.size else 0.0

    @property
    def sifted_fraction(self) -> float:
        return self.sifted_indices.size / self.alice_bits.size

    @property
    def sifted_error_rate(self) -> float:
        s = self.sifted_indices
        return float(np.mean(self.alice_bits[s] != self.bob_bits[s])) if s.size else 0.0

    @property
    def alice_key(self) -> np.ndarray:
        return self.alice_bits[self.key_indices]

    @property
    def bob_key(self) -> np.ndarray:
        return self.bob_bits[self.key_indices]

    @property
    def aborted(self) -> bool:
        return self.result == "aborted"


def _measure_qubits(states: np.ndarray, bases: np.ndarray, rng: np.random.Generator):
    """Measure each row of ``states`` in its basis; returns outcomes and collapsed states."""
    vec0 = BASES[bases, 0]
    p0 = np.abs(np.einsum("ij,ij->i", vec0.conj(), states)) ** 2
    outcome = (rng.random(states.shape[0]) >= p0).astype(np.int64)
    return outcome, BASES[bases, outcome]


def bb84_run(config: BB84Config) -> ProtocolTranscript:
    """One BB84 session up to the check-bit comparison.

    Alice encodes random bits in random H/T bases, the qubits pass an optional
    eavesdropper and bit-flip channel, Bob measures in random bases, the
    parties sift, keep ``2n`` bits, compare ``n`` random check bits and abort
    when the mismatch fraction exceeds ``abort_threshold``. Reconciliation
    and privacy amplification are not simulated.
    """
    rng = np.random.default_rng(config.seed)
    n, big_n = config.n, config.block_length
    alice_bits = rng.integers(0, 2, big_n)
    alice_bases = rng.integers(0, 2, big_n)
    states = BASES[alice_bases, alice_bits].copy()

    eve_bases = None
    if config.eve == "intercept_resend":
        eve_bases = rng.integers(0, 2, big_n)
    elif config.eve == "fixed_basis":
        eve_bases = np.full(big_n, config.eve_basis, dtype=np.int64)
    if eve_bases is not None:
        _, states = _measure_qubits(states, eve_bases, rng)

    if config.channel_flip_prob > 0:
        flips = rng.random(big_n) < config.channel_flip_prob
        states[flips] = states[flips][:, ::-1]

    bob_bases = rng.integers(0, 2, big_n)
    bob_bits, _ = _measure_qubits(states, bob_bases, rng)

    sifted = np.flatnonzero(alice_bases == bob_bases)
    empty = np.array([], dtype=np.int64)
    if sifted.size < 2 * n:
        return ProtocolTranscript(
            alice_bits, alice_bases, bob_bases, bob_bits, sifted, empty, empty, 0, "repeat", eve_bases
        )
    kept = sifted[: 2 * n]
    pick = np.zeros(2 * n, dtype=bool)
    pick[rng.choice(2 * n, size=n, replace=False)] = True
    check, key = kept[pick], kept[~pick]
    mismatches = int(np.sum(alice_bits[check] != bob_bits[check]))
    result = "aborted" if mismatches / n > config.abort_threshold else "key"
    return ProtocolTranscript(
        alice_bits, alice_bases, bob_bases, bob_bits, sifted, check, key, mismatches, result, eve_bases
    )


# -- shared two-qubit measurement ----------------------------------------------

def _rot(angle):
    """Rows are ``<A_0|`` and ``<A_1|`` for the real basis at ``angle``; vectorised over angles."""
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([np.stack([c, s], -1), np.stack([-s, c], -1)], -2)


def measure_pairs(states: np.ndarray, alice_angles, bob_angles, rng: np.random.Generator):
    """Alice measures qubit 0, then Bob measures qubit 1 of the collapsed state.

    ``states`` has shape ``(m, 4)``; the angle arrays have length ``m``.
    Returns ``(a, b)`` outcome arrays.
    """
    m = states.shape[0]
    psi = states.reshape(m, 2, 2)
    ra = _rot(np.asarray(alice_angles, dtype=float) * np.ones(m))
    rb = _rot(np.asarray(bob_angles, dtype=float) * np.ones(m))
    # cond[r, i, :] = (<A_i| (x) I) psi_r
    cond = np.einsum("rij,rjk->rik", ra, psi)
    pa = np.sum(np.abs(cond) ** 2, axis=2)
    a = (rng.random(m) >= pa[:, 0] / pa.sum(axis=1)).astype(np.int64)
    bob = cond[np.arange(m), a]
    bob /= np.linalg.norm(bob, axis=1, keepdims=True)
    pb0 = np.abs(np.einsum("rj,rj->r", rb[:, 0, :], bob)) ** 2
    b = (rng.random(m) >= pb0).astype(np.int64)
    return a, b


# -- E91 -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class E91Result:
    alice_key: np.ndarray
    bob_key: np.ndarray
    test_rounds: int
    test_wins: int
    eve: str

    @property
    def key_agreement(self) -> float:
        return float(np.mean(self.alice_key == self.bob_key)) if self.alice_key.size else 1.0

    @property
    def ones_fraction(self) -> float:
        return float(np.mean(self.alice_key)) if self.alice_key.size else 0.0

    @property
    def chsh_win_rate(self) -> float:
        return self.test_wins / self.test_rounds if self.test_rounds else 0.0


def e91_run(pairs: int, test_fraction: float, eve: str, rng: np.random.Generator) -> E91Result:
    """Entanglement-based key distribution with a CHSH test on a random subset.

    ``eve="measure_both"`` measures both halves of every pair in the
    computational basis before distribution, leaving shared classical bits.
    """
    if pairs < 4:
        raise ValueError("need at least 4 pairs")
    if eve not in ("none", "measure_both"):
        raise ValueError(f"eve must be 'none' or 'measure_both', got {eve!r}")
    if not 0 <= test_fraction <= 1:
        raise ValueError("test_fraction must lie in [0, 1]")
    states = np.tile(bell_state(0).amplitudes, (pairs, 1))
    if eve == "measure_both":
        zero = np.zeros(pairs)
        a, _ = measure_pairs(states, zero, zero, rng)
        states = np.zeros((pairs, 4), dtype=complex)
        states[np.arange(pairs), 3 * a] = 1.0

    n_test = int(round(pairs * test_fraction))
    is_test = np.zeros(pairs, dtype=bool)
    is_test[rng.choice(pairs, size=n_test, replace=False)] = True

    key_states = states[~is_test]
    zeros = np.zeros(key_states.shape[0])
    ka, kb = measure_pairs(key_states, zeros, zeros, rng)

    q = ChshStrategy.quantum()
    x = rng.integers(0, 2, n_test)
    y = rng.integers(0, 2, n_test)
    ta, tb = measure_pairs(states[is_test], np.take(q.alice_angles, x), np.take(q.bob_angles, y), rng)
    wins = int(np.sum((ta ^ tb) == (x & y)))
    return E91Result(ka, kb, n_test, wins, eve)


# -- dense coding ------------------------------------------------------------

_X = standard_gate("X")
_Z = standard_gate("Z")
DENSE_ENCODING = {
    "00": linalg.I2,
    "01": _X,
    "10": _Z,
    "11": _Z @ _X,
}


def dense_code(bits: str) -> PureState:
    """Alice's local action on her half of the shared Bell pair."""
    if bits not in DENSE_ENCODING:
        raise ValueError(f"message must be one of 00, 01, 10, 11; got {bits!r}")
    v = apply_gate(np.array(bell_state(0).amplitudes), DENSE_ENCODING[bits], [0], 2)
    return PureState(v)


def dense_decode(state: PureState) -> str:
    """Bell-basis measurement; the outcome is deterministic for encoded states."""
    dist = von_neumann(state, projective_from_basis(bell_basis()))
    i = int(np.argmax(dist.probs))
    if dist.probs[i] < 1 - linalg.ATOL:
        raise InvalidStateError(f"state is not a Bell state (best outcome probability {dist.probs[i]:.6f})")
    return format(i, "02b")


# -- teleportation -----------------------------------------------------------

# Bob's fix-up for Alice's outcome (a, A): undo I, X, Z, ZX respectively
_BOB_FIX = {
    (0, 0): linalg.I2,
    (0, 1): _X,
    (1, 0): _Z,
    (1, 1): _X @ _Z,
}


@dataclass(frozen=True, eq=False)
class TeleportResult:
    bob_state: PureState
    bits: tuple
    bob_before_correction: PureState
    alice_state: PureState
    outcome_probs: np.ndarray


def teleport(psi: PureState, rng: Optional[np.random.Generator] = None, forced: Optional[tuple] = None) -> TeleportResult:
    """Teleport a qubit using a shared Bell pair.

    Qubits are ordered (a, A, B): Alice's input, Alice's half of the pair and
    Bob's half. ``forced`` fixes Alice's measurement outcome instead of
    sampling it with ``rng``.
    """
    if psi.dim != 2:
        raise InvalidStateError("teleport expects a single-qubit state")
    v = np.kron(psi.amplitudes, bell_state(0).amplitudes)
    v = apply_gate(v, standard_gate("CNOT"), [0, 1], 3)
    v = apply_gate(v, standard_gate("H"), [0], 3)
    blocks = v.reshape(4, 2)
    probs = np.sum(np.abs(blocks) ** 2, axis=1)
    if forced is not None:
        m = 2 * forced[0] + forced[1]
    else:
        if rng is None:
            raise ValueError("pass rng or forced")
        cdf = np.cumsum(probs)
        m = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), 3)
    bits = (m >> 1, m & 1)
    before = PureState(blocks[m] / np.linalg.norm(blocks[m]))
    after = PureState(_BOB_FIX[bits] @ before.amplitudes)
    return TeleportResult(after, bits, before, PureState.basis(m, 4), probs)


# -- CHSH game ---------------------------------------------------------------

@dataclass(frozen=True)
class ChshStrategy:
    """Either deterministic answer tables or measurement angles per input.

    Angles ``t`` denote the real basis ``{cos t|0> + sin t|1>, -sin t|0> + cos t|1>}``.
    """

    kind: str
    a_table: tuple = (0, 0)
    b_table: tuple = (0, 0)
    alice_angles: tuple = (0.0, math.pi / 4)
    # Bob's basis for input y is Alice's basis for x = y rotated by pi/8 and -3pi/8
    bob_angles: tuple = (math.pi / 8, math.pi / 4 - 3 * math.pi / 8)

    def __post_init__(self):
        if self.kind not in ("classical", "quantum"):
            raise ValueError(f"kind must be 'classical' or 'quantum', got {self.kind!r}")

    @classmethod
    def classical(cls, a_table=(0, 0), b_table=(0, 0)) -> "ChshStrategy":
        return cls("classical", tuple(a_table), tuple(b_table))

    @classmethod
    def quantum(cls, alice_angles=(0.0, math.pi / 4), bob_angles=(math.pi / 8, -math.pi / 8)) -> "ChshStrategy":
        return cls("quantum", alice_angles=tuple(alice_angles), bob_angles=tuple(bob_angles))


@dataclass(frozen=True)
class GameResult:
    wins: int
    trials: int

    @property
    def win_rate(self) -> float:
        return self.wins / self.trials


def chsh_joint_probabilities(alice_angle: float, bob_angle: float) -> np.ndarray:
    """``P[a, b]`` for local measurements of the shared pair ``(|00> + |11>)/sqrt 2``."""
    ra, rb = _rot(alice_angle), _rot(bob_angle)
    phi = bell_state(0).amplitudes.reshape(2, 2)
    amp = ra @ phi @ rb.T
    return np.abs(amp) ** 2


def chsh_exact_win_probability(s: ChshStrategy) -> float:
    total = 0.0
    for x, y in itertools.product((0, 1), repeat=2):
        if s.kind == "classical":
            total += float((s.a_table[x] ^ s.b_table[y]) == (x & y))
        else:
            p = chsh_joint_probabilities(s.alice_angles[x], s.bob_angles[y])
            total += sum(p[a, b] for a in (0, 1) for b in (0, 1) if (a ^ b) == (x & y))
    return total / 4


def chsh_enumerate_classical() -> dict:
    """Evaluate all 16 deterministic strategies."""
    scores = {}
    for a0, a1, b0, b1 in itertools.product((0, 1), repeat=4):
        s = ChshStrategy.classical((a0, a1), (b0, b1))
        scores[((a0, a1), (b0, b1))] = chsh_exact_win_probability(s)
    best = max(scores.values())
    worst = min(scores.values())
    return {
        "best": best,
        "worst": worst,
        "argmax": [k for k, v in scores.items() if v == best],
        "scores": scores,
    }


def chsh_monte_carlo(s: ChshStrategy, trials: int, rng: np.random.Generator) -> GameResult:
    """Play ``trials`` rounds; quantum rounds measure a fresh Bell pair each time."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    x = rng.integers(0, 2, trials)
    y = rng.integers(0, 2, trials)
    if s.kind == "classical":
        a = np.take(s.a_table, x)
        b = np.take(s.b_table, y)
    else:
        states = np.broadcast_to(bell_state(0).amplitudes, (trials, 4))
        a, b = measure_pairs(states, np.take(s.alice_angles, x), np.take(s.bob_angles, y), rng)
    return GameResult(int(np.sum((a ^ b) == (x & y))), trials)
