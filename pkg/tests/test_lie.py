import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pegrowth import lie
from pegrowth.matcore import fronorm, nilpotent_shift, span_rank, unit_vector

J2 = nilpotent_shift(2)
E21 = np.outer(unit_vector(2, 1), unit_vector(2, 0))  # e_2 e_1'
ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


def small(d):
    return arrays(np.float64, (d, d),
                  elements=st.floats(-2.0, 2.0, allow_nan=False, width=64))


def random_controllable(rng, d, m=1):
    from pegrowth.control import kalman_rank
    while True:
        a = rng.standard_normal((d, d))
        b = rng.standard_normal((d, m))
        if kalman_rank(a, b) == d:
            return a, b


class TestBracket:
    def test_self_vanishes(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(lie.bracket(m, m), np.zeros((2, 2)))

    def test_sl2_generators(self):
        np.testing.assert_array_equal(lie.bracket(J2, E21), np.diag([1.0, -1.0]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            lie.bracket(np.eye(2), np.eye(3))

    @settings(max_examples=25, deadline=None)
    @given(small(4), small(4))
    def test_antisymmetry(self, m, n):
        np.testing.assert_allclose(lie.bracket(m, n), -lie.bracket(n, m),
                                   atol=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(small(3), small(3), small(3))
    def test_jacobi(self, a, b, c):
        total = (lie.bracket(a, lie.bracket(b, c))
                 + lie.bracket(b, lie.bracket(c, a))
                 + lie.bracket(c, lie.bracket(a, b)))
        assert fronorm(total) <= 1e-10 * (1 + fronorm(a)) * (1 + fronorm(b)) * (1 + fronorm(c))

    @settings(max_examples=20, deadline=None)
    @given(small(3), small(3), small(3), st.floats(-2, 2), st.floats(-2, 2))
    def test_bilinearity(self, a, b, c, x, y):
        lhs = lie.bracket(x * a + y * b, c)
        rhs = x * lie.bracket(a, c) + y * lie.bracket(b, c)
        assert fronorm(lhs - rhs) <= 1e-10 * (1 + fronorm(lhs) + fronorm(rhs))


class TestClosure:
    def test_abelian(self):
        assert lie.lie_closure([np.eye(2)]).dim == 1

    def test_sl2(self):
        basis = lie.lie_closure([J2, E21])
        assert basis.dim == 3
        assert basis.all_traceless

    def test_full_gl3_from_chain(self):
        k = np.array([[1.0, 1.0, 1.0]])
        e3 = unit_vector(3, 2).reshape(3, 1)
        assert lie.lie_closure([nilpotent_shift(3), e3 @ k]).dim == 9

    def test_orthonormality(self):
        basis = lie.lie_closure([J2, E21])
        g = np.array([[np.sum(a * b) for b in basis.basis] for a in basis.basis])
        assert np.max(np.abs(g - np.eye(basis.dim))) <= 1e-10

    def test_conjugation_invariance(self):
        rng = np.random.default_rng(8)
        for _ in range(5):
            gens = [rng.standard_normal((3, 3)) for _ in range(2)]
            p = np.eye(3) + 0.4 * rng.standard_normal((3, 3))
            pinv = np.linalg.inv(p)
            d1 = lie.lie_closure(gens).dim
            d2 = lie.lie_closure([p @ g @ pinv for g in gens]).dim
            assert d1 == d2

    def test_depth_budget_error(self):
        with pytest.raises(lie.LieClosureError) as err:
            lie.lie_closure([J2, E21], max_depth=1)
        assert err.value.partial.dim >= 2

    def test_matches_all_pairs_bruteforce(self):
        # independent closure: bracket all pairs until the span stabilises
        rng = np.random.default_rng(3)
        for _ in range(5):
            gens = [rng.standard_normal((3, 3)) for _ in range(2)]
            mats = list(gens)
            dim = span_rank(mats)
            while True:
                extra = [lie.bracket(x, y) for i, x in enumerate(mats)
                         for y in mats[i + 1:]]
                new = span_rank(mats + extra)
                if new == dim:
                    break
                mats += extra
                dim = new
            assert lie.lie_closure(gens).dim == dim


class TestLarc:
    def test_chain_pair(self):
        cert = lie.check_larc(J2, unit_vector(2, 1).reshape(2, 1), [[1.0, 1.0]])
        assert cert.verdict and cert.dim == 4

    def test_zero_system(self):
        cert = lie.check_larc(np.zeros((3, 3)), np.zeros((3, 1)), [[1.0, 1.0, 1.0]])
        assert not cert.verdict and cert.dim == 0

    def test_triangular_pair_fails(self):
        cert = lie.check_larc(np.diag([1.0, 2.0]), unit_vector(2, 1).reshape(2, 1),
                              [[0.0, 1.0]])
        assert not cert.verdict and cert.dim < 4


class TestLarc0:
    def test_sl2_pair(self):
        cert = lie.check_larc0(J2, unit_vector(2, 1).reshape(2, 1), [[1.0, 0.0]])
        assert cert.verdict and cert.dim == 3

    def test_identity_a_fails(self):
        cert = lie.check_larc0(np.eye(2), np.zeros((2, 1)), [[1.0, 1.0]])
        assert not cert.verdict

    def test_generic_controllable_d3(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            a, b = random_controllable(rng, 3)
            k = rng.standard_normal((1, 3))
            assert lie.check_larc0(a, b, k).verdict


class TestPlarc:
    def test_rotation_without_input(self):
        cert = lie.check_plarc(ROT, np.zeros((2, 1)), [[0.0, 0.0]])
        assert cert.verdict

    def test_diagonal_fails_at_eigendirections(self):
        cert = lie.check_plarc(np.diag([1.0, 2.0]), np.zeros((2, 1)), [[1.0, 1.0]])
        assert not cert.verdict
        assert len(cert.failing_samples) > 0

    def test_follows_from_larc(self):
        cert = lie.check_plarc(J2, unit_vector(2, 1).reshape(2, 1), [[1.0, 1.0]])
        assert cert.verdict

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            lie.check_plarc(ROT, np.zeros((2, 1)), [[0.0, 0.0]], samples=2)

    def test_json_shape(self):
        cert = lie.check_plarc(np.diag([1.0, 2.0]), np.zeros((2, 1)), [[1.0, 1.0]])
        obj = cert.to_json()
        assert set(obj) == {"kind", "verdict", "dim", "failing_samples", "tol"}


class TestIrreducible:
    def test_sl2_irreducible(self):
        assert lie.check_irreducible(lie.lie_closure([J2, E21]))

    def test_diagonal_span_reducible(self):
        basis = lie.lie_closure([np.diag([1.0, -1.0])])
        assert not lie.check_irreducible(basis)

    def test_chain_closure_irreducible(self):
        k = np.array([[1.0, 1.0, 1.0]])
        e3 = unit_vector(3, 2).reshape(3, 1)
        assert lie.check_irreducible(lie.lie_closure([nilpotent_shift(3), e3 @ k]))


class TestChainAudit:
    def test_chain_pair_all_hold(self):
        audit = lie.inclusion_chain_audit(J2, unit_vector(2, 1).reshape(2, 1),
                                          [[1.0, 1.0]], shift=0.0)
        assert audit.larc_shifted.verdict and audit.larc0.verdict
        assert audit.plarc.verdict and audit.ok

    def test_identity_a_vacuous(self):
        audit = lie.inclusion_chain_audit(np.eye(2), unit_vector(2, 1).reshape(2, 1),
                                          [[1.0, 0.0]], shift=0.5)
        assert not audit.larc_shifted.verdict
        assert audit.ok

    def test_random_controllable_no_violations(self):
        rng = np.random.default_rng(4)
        for i in range(15):
            a, b = random_controllable(rng, 3)
            k = rng.standard_normal((1, 3))
            shift = float(rng.uniform(-1.0, 1.0))
            audit = lie.inclusion_chain_audit(a, b, k, shift=shift, seed=i)
            assert audit.ok, audit.violations
