import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qipkit import qinfo
from qipkit.errors import QipkitError
from qipkit.qmeasure import (
    Povm,
    computational_basis,
    hadamard_basis,
    preset_measurement,
    projective_from_basis,
    psi01_states,
    trine_povm,
)
from qipkit.qstate import (
    KET0,
    KET1,
    DensityMatrix,
    Ensemble,
    PureState,
    bell_state,
    density_from_pure,
    maximally_mixed,
    partial_trace,
    random_density,
    random_pure,
    random_unitary,
    reduce_to_qubits,
    tensor_density,
)

from oracles import brute_compression, entropy_bits, is_typical

seeds = st.integers(min_value=0, max_value=2**32 - 1)
BSC_P = 0.5 - math.sqrt(3) / 4


def random_povm(dim, k, rng):
    raw = []
    for _ in range(k):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        raw.append(g.conj().T @ g)
    w, v = np.linalg.eigh(sum(raw))
    s = (v / np.sqrt(w)) @ v.conj().T
    return Povm(tuple(s @ r @ s for r in raw))


class TestShannon:
    def test_examples(self):
        assert qinfo.shannon_entropy([0.5, 0.5]) == 1
        assert qinfo.shannon_entropy([1, 0]) == 0
        assert qinfo.binary_entropy(BSC_P) == pytest.approx(1 - 0.6454211, abs=1e-7)

    def test_validation(self):
        with pytest.raises(ValueError):
            qinfo.shannon_entropy([0.5, 0.6])
        with pytest.raises(ValueError):
            qinfo.binary_entropy(1.5)


class TestVonNeumann:
    def test_examples(self):
        assert qinfo.von_neumann_entropy(KET0) == 0
        assert qinfo.von_neumann_entropy(maximally_mixed(2)) == pytest.approx(1, abs=1e-12)
        e = qinfo.psi01_ensemble()
        assert qinfo.von_neumann_entropy(qinfo.density_from_ensemble(e)) == pytest.approx(0.8112781, abs=1e-7)

    @given(seeds, st.integers(2, 6))
    def test_properties_1_to_3(self, seed, dim):
        rng = np.random.default_rng(seed)
        rho = random_density(dim, int(rng.integers(1, dim + 1)), rng)
        s = qinfo.von_neumann_entropy(rho)
        assert s == pytest.approx(entropy_bits(rho.matrix), abs=1e-9)
        assert -1e-12 <= s <= math.log2(dim) + 1e-9
        assert (s < 1e-7) == qinfo.is_pure(rho) if hasattr(qinfo, "is_pure") else True
        u = random_unitary(dim, rng)
        assert qinfo.von_neumann_entropy(DensityMatrix(u @ rho.matrix @ u.conj().T)) == pytest.approx(s, abs=1e-9)

    def test_maximum_only_at_identity(self, rng):
        for dim in (2, 3, 4):
            assert qinfo.von_neumann_entropy(maximally_mixed(dim)) == pytest.approx(math.log2(dim), abs=1e-12)
            assert qinfo.von_neumann_entropy(random_density(dim, dim, rng)) < math.log2(dim) - 1e-6

    @given(seeds)
    def test_additivity_and_subadditivity(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_density(2, 2, rng), random_density(3, 3, rng)
        sab = qinfo.von_neumann_entropy(tensor_density(a, b))
        assert sab == pytest.approx(qinfo.von_neumann_entropy(a) + qinfo.von_neumann_entropy(b), abs=1e-8)
        psi = random_pure(2 * 3 * 2, rng)
        rho_ab = partial_trace(psi, 6, 2, "A")
        s_a = qinfo.von_neumann_entropy(partial_trace(rho_ab, 2, 3, "A"))
        s_b = qinfo.von_neumann_entropy(partial_trace(rho_ab, 2, 3, "B"))
        assert qinfo.von_neumann_entropy(rho_ab) <= s_a + s_b + 1e-8

    def test_bell_anomaly(self):
        rho = density_from_pure(bell_state(0))
        assert qinfo.von_neumann_entropy(rho) == pytest.approx(0, abs=1e-12)
        for keep in "AB":
            assert qinfo.von_neumann_entropy(partial_trace(rho, 2, 2, keep)) == pytest.approx(1, abs=1e-12)

    def test_strong_subadditivity(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            rho = random_density(8, int(rng.integers(1, 9)), rng)
            s = qinfo.von_neumann_entropy
            lhs = s(rho) + s(reduce_to_qubits(rho, [1]))
            rhs = s(reduce_to_qubits(rho, [0, 1])) + s(reduce_to_qubits(rho, [1, 2]))
            assert lhs <= rhs + 1e-7


class TestDistances:
    def test_fidelity_examples(self, rng):
        rho = random_density(3, 2, rng)
        assert qinfo.fidelity(rho, rho) == pytest.approx(1, abs=1e-9)
        assert qinfo.fidelity(KET0, KET1) == pytest.approx(0, abs=1e-12)
        assert qinfo.fidelity(KET0, maximally_mixed(2)) == pytest.approx(0.5, abs=1e-12)

    def test_trace_distance_examples(self, rng):
        rho = random_density(3, 2, rng)
        assert qinfo.trace_distance(rho, rho) == pytest.approx(0, abs=1e-12)
        assert qinfo.trace_distance(KET0, KET1) == pytest.approx(1, abs=1e-12)
        assert qinfo.trace_distance(KET0, maximally_mixed(2)) == pytest.approx(0.5, abs=1e-12)

    @given(seeds, st.integers(2, 4))
    def test_symmetry_range_triangle(self, seed, dim):
        rng = np.random.default_rng(seed)
        a, b, c = (random_density(dim, int(rng.integers(1, dim + 1)), rng) for _ in range(3))
        f = qinfo.fidelity(a, b)
        assert 0 <= f <= 1 + 1e-9
        assert f == pytest.approx(qinfo.fidelity(b, a), abs=1e-9)
        d = qinfo.trace_distance
        assert 0 <= d(a, b) <= 1 + 1e-12
        assert d(a, c) <= d(a, b) + d(b, c) + 1e-12

    @given(seeds)
    def test_pure_state_fidelity(self, seed):
        rng = np.random.default_rng(seed)
        psi, rho = random_pure(3, rng), random_density(3, 3, rng)
        expect = np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes).real
        assert qinfo.fidelity(psi, rho) == pytest.approx(expect, abs=1e-9)

    @given(seeds, st.integers(2, 4))
    def test_fuchs_van_de_graaf(self, seed, dim):
        # with root fidelity sqrt(F): 1 - sqrt(F) <= D <= sqrt(1 - F)
        rng = np.random.default_rng(seed)
        a, b = (random_density(dim, int(rng.integers(1, dim + 1)), rng) for _ in range(2))
        f = qinfo.fidelity(a, b)
        d = qinfo.trace_distance(a, b)
        assert 1 - math.sqrt(f) <= d + 1e-9
        assert d <= math.sqrt(max(0.0, 1 - f)) + 1e-9

    def test_squared_fidelity_lower_bound_fails_for_mixed_states(self):
        # the reading 1 - F <= D with F the squared fidelity is not a theorem
        a = DensityMatrix(np.diag([0.5, 0.5, 0.0]))
        b = DensityMatrix(np.diag([0.0, 0.5, 0.5]))
        f, d = qinfo.fidelity(a, b), qinfo.trace_distance(a, b)
        assert f == pytest.approx(0.25) and d == pytest.approx(0.5)
        assert 1 - f > d

    def test_projection_fidelity(self):
        psi = PureState([0.6, 0.8])
        assert qinfo.projection_fidelity(psi, np.diag([1, 0])) == pytest.approx(0.36 ** 2)


class TestChannels:
    def test_bsc(self):
        e = qinfo.psi01_ensemble()
        ch = qinfo.induced_channel(e, projective_from_basis(computational_basis(1)))
        assert ch.transition[0, 1] == pytest.approx(BSC_P, abs=1e-12)
        assert ch.transition[1, 0] == pytest.approx(BSC_P, abs=1e-12)
        assert qinfo.mutual_information(e.probs, ch) == pytest.approx(0.6454211, abs=1e-7)

    def test_identity_and_constant(self):
        e = Ensemble.uniform([KET0, KET1])
        ch = qinfo.induced_channel(e, projective_from_basis(computational_basis(1)))
        assert np.allclose(ch.transition, np.eye(2))
        assert qinfo.mutual_information([0.5, 0.5], ch) == pytest.approx(1)
        const = qinfo.ClassicalChannel([[0.3, 0.7], [0.3, 0.7]])
        assert qinfo.mutual_information([0.5, 0.5], const) == pytest.approx(0, abs=1e-12)

    def test_trine_erasure(self):
        e = qinfo.psi01_ensemble()
        ch = qinfo.induced_channel(e, trine_povm())
        # brute force Tr(E_i rho_a): the third outcome is the erasure symbol
        psi0, psi1 = psi01_states()
        eff = trine_povm().effects
        brute = np.array([[np.vdot(s.amplitudes, E @ s.amplitudes).real for E in eff] for s in (psi0, psi1)])
        assert np.allclose(ch.transition, brute, atol=1e-12)
        erasure = ch.transition[0, 2]
        assert erasure == pytest.approx(ch.transition[1, 2], abs=1e-12)
        assert erasure == pytest.approx(0.5, abs=1e-12)
        mi = qinfo.mutual_information(e.probs, ch)
        assert mi == pytest.approx(1 - erasure, abs=1e-12)
        assert mi <= qinfo.holevo_chi(e) + 1e-9

    def test_channel_validation(self):
        with pytest.raises(ValueError):
            qinfo.ClassicalChannel([[0.5, 0.6]])
        with pytest.raises(ValueError):
            qinfo.mutual_information([1.0], qinfo.ClassicalChannel([[1, 0], [0, 1]]))


class TestHolevo:
    def test_examples(self):
        assert qinfo.holevo_chi(qinfo.psi01_ensemble()) == pytest.approx(0.8112781, abs=1e-7)
        rho = DensityMatrix(np.diag([0.3, 0.7]))
        assert qinfo.holevo_chi(Ensemble(((rho, 1.0),))) == pytest.approx(0, abs=1e-12)
        assert qinfo.holevo_chi(Ensemble.uniform([KET0, KET1])) == pytest.approx(1)

    @given(seeds, st.integers(2, 3), st.integers(2, 4), st.integers(2, 4))
    def test_bound(self, seed, dim, k, outcomes):
        rng = np.random.default_rng(seed)
        states = [random_density(dim, int(rng.integers(1, dim + 1)), rng) for _ in range(k)]
        e = Ensemble(tuple(zip(states, rng.dirichlet(np.ones(k)))))
        ch = qinfo.induced_channel(e, random_povm(dim, outcomes, rng))
        assert qinfo.mutual_information(e.probs, ch) <= qinfo.holevo_chi(e) + 1e-9

    def test_accessible_info(self):
        e = qinfo.psi01_ensemble()
        comp = projective_from_basis(computational_basis(1))
        had = projective_from_basis(hadamard_basis(1))
        bits, idx = qinfo.accessible_info_over(e, [comp])
        assert bits == pytest.approx(0.6454211, abs=1e-7) and idx == 0
        bits, idx = qinfo.accessible_info_over(e, [had, comp, trine_povm()])
        assert bits == pytest.approx(0.6454211, abs=1e-7) and idx == 1
        assert bits <= 0.8112781
        trivial = Povm((np.eye(2),))
        assert qinfo.accessible_info_over(e, [trivial])[0] == pytest.approx(0, abs=1e-12)
        with pytest.raises(ValueError):
            qinfo.accessible_info_over(e, [])


class TestTypicalSet:
    def test_uniform_source(self):
        ts = qinfo.typical_set([0.5, 0.5], 6, 0.01)
        assert len(ts) == 64 and ts.total_prob == pytest.approx(1)

    def test_deterministic_source(self):
        ts = qinfo.typical_set([1.0, 0.0], 7, 0.1)
        assert ts.strings() == ["0000000"]
        assert ts.total_prob == 1

    def test_brute_membership(self):
        lam, n, eps = (0.75, 0.25), 10, 0.2
        s = qinfo.shannon_entropy(lam)
        ts = qinfo.typical_set(lam, n, eps)
        expect = [
            z for z in range(2 ** n)
            if is_typical(math.prod(lam[(z >> (n - 1 - k)) & 1] for k in range(n)), n, s, eps)
        ]
        assert list(ts.members) == expect
        total = sum(math.prod(lam[(z >> (n - 1 - k)) & 1] for k in range(n)) for z in expect)
        assert ts.total_prob == pytest.approx(total, abs=1e-12)
        assert ts.total_prob + ts.complement_prob == pytest.approx(1, abs=1e-12)

    @given(st.floats(0.05, 0.95), st.integers(1, 16), st.floats(0.01, 0.5))
    def test_size_bounds(self, l0, n, eps):
        ts = qinfo.typical_set([l0, 1 - l0], n, eps)
        assert len(ts) <= ts.size_upper_bound * (1 + 1e-12)
        if ts.total_prob >= 1 - eps:
            assert len(ts) >= ts.size_lower_bound * (1 - 1e-12)

    @pytest.mark.parametrize("lam,eps", [((0.75, 0.25), 0.3), ((0.8, 0.2), 0.3), ((0.6, 0.4), 0.1)])
    def test_complement_vanishes_eventually(self, lam, eps):
        # first n with Pr(A^C) <= eps; it must stay there up to the enumeration limit
        threshold = next(n for n in range(1, 25) if qinfo.typical_set(lam, n, eps).complement_prob <= eps)
        assert qinfo.typical_set(lam, threshold, eps).complement_prob <= eps
        tail = [qinfo.typical_set(lam, n, eps).complement_prob for n in range(threshold, 25)]
        assert max(tail) <= eps

    def test_limits(self):
        with pytest.raises(QipkitError):
            qinfo.typical_set([0.5, 0.5], 25, 0.1)
        with pytest.raises(ValueError):
            qinfo.typical_set([0.5, 0.5], 4, 0)


class TestTypicalSubspace:
    def test_examples(self):
        _, dim, _ = qinfo.typical_subspace(Ensemble.uniform([KET0, KET1]), 6, 0.1)
        assert dim == 64
        _, dim, prob = qinfo.typical_subspace(Ensemble(((PureState([0.6, 0.8]), 1.0),)), 6, 0.1)
        assert dim == 1 and prob == pytest.approx(1)

    def test_psi01_n12(self):
        e = qinfo.psi01_ensemble()
        idx, dim, _ = qinfo.typical_subspace(e, 12, 0.1)
        bound = 2 ** (12 * (0.8112781244591329 + 0.1))
        assert dim <= bound
        # by enumeration: strings with k ones are typical for k in {3}
        assert dim == math.comb(12, 3)
        assert bound == pytest.approx(1958.234, abs=1e-3)

    def test_source_must_be_pure_qubits(self):
        with pytest.raises(QipkitError):
            qinfo.typical_subspace(Ensemble(((maximally_mixed(2), 1.0),)), 4, 0.1)


class TestCompression:
    @pytest.mark.parametrize("n,eps", [(3, 0.2), (4, 0.15), (5, 0.3), (6, 0.25)])
    def test_against_brute_force(self, n, eps):
        e = qinfo.psi01_ensemble()
        r = qinfo.average_projection_fidelity(e, n, eps)
        avg, bound, dim, _ = brute_compression([s.amplitudes for s in e.states], e.probs, n, eps)
        assert r.avg_fidelity == pytest.approx(avg, abs=1e-9)
        assert r.bound_fidelity == pytest.approx(bound, abs=1e-9)
        assert r.dim == dim
        assert r.avg_fidelity >= r.bound_fidelity - 1e-9

    def test_non_symmetric_source(self, rng):
        states = [random_pure(2, rng) for _ in range(3)]
        e = Ensemble(tuple(zip(states, (0.5, 0.3, 0.2))))
        r = qinfo.average_projection_fidelity(e, 5, 0.2)
        avg, bound, _, _ = brute_compression([s.amplitudes for s in states], e.probs, 5, 0.2)
        assert r.avg_fidelity == pytest.approx(avg, abs=1e-9)
        assert r.avg_fidelity >= bound - 1e-9

    def test_trivial_cases(self):
        r = qinfo.average_projection_fidelity(qinfo.psi01_ensemble(), 6, 5.0)
        assert r.avg_fidelity == pytest.approx(1, abs=1e-12)
        pure = Ensemble(((PureState([0.6, 0.8]), 1.0),))
        assert qinfo.average_projection_fidelity(pure, 6, 0.1).avg_fidelity == pytest.approx(1, abs=1e-12)

    def test_monte_carlo_matches_exact(self, rng):
        states = [random_pure(2, rng) for _ in range(2)]
        e = Ensemble(tuple(zip(states, (0.7, 0.3))))
        exact = qinfo.average_projection_fidelity(e, 8, 0.2)
        mc = qinfo.average_projection_fidelity(e, 8, 0.2, mode="monte_carlo", rng=rng, trials=40000)
        assert abs(mc.avg_fidelity - exact.avg_fidelity) <= 5 * mc.stderr + 1e-12

    def test_errors(self):
        e = qinfo.psi01_ensemble()
        with pytest.raises(ValueError):
            qinfo.average_projection_fidelity(e, 4, 0.1, mode="nope")
        with pytest.raises(ValueError):
            qinfo.average_projection_fidelity(e, 4, 0.1, mode="monte_carlo")
        with pytest.raises(QipkitError):
            qinfo.average_projection_fidelity(Ensemble.uniform([KET0, KET1, PureState([0.6, 0.8])]), 20, 0.1)
