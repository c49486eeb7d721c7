import numpy as np
import pytest

from pegrowth import projective as prj
from pegrowth import rates
from pegrowth.signals import PESignal, SignalClass

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
ZERO_IN = (np.zeros((2, 1)), np.zeros((1, 2)))
CLS = SignalClass(1.0, 0.4)
RANGE = (CLS.floor, 1.0)

# controllable saddle with a proper invariant arc (verified PLARC)
SADDLE = (np.array([[1.0, 0.0], [0.0, -1.0]]),
          np.array([[1.0], [1.0]]),
          np.array([[-0.6, 0.2]]))


class TestProjPoint:
    def test_canonical_sign(self):
        u = prj.proj_point([-1.0, 2.0])
        assert u[0] > 0
        np.testing.assert_allclose(np.linalg.norm(u), 1.0, atol=1e-12)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            prj.proj_point([0.0, 0.0])


class TestProjectField:
    def test_identity_projects_to_zero(self):
        q = prj.proj_point([1.0, 2.0, -1.0])
        np.testing.assert_allclose(prj.project_field(np.eye(3), q),
                                   np.zeros(3), atol=1e-14)

    def test_rotation_at_e1(self):
        out = prj.project_field(ROT, [1.0, 0.0])
        np.testing.assert_allclose(out, [0.0, 1.0], atol=1e-14)

    def test_saddle_at_diagonal(self):
        q = prj.proj_point([1.0, 1.0])
        out = prj.project_field(np.diag([1.0, -1.0]), q)
        # radial part cancels; tangent pushes toward e1
        assert out[0] > 0 and out[1] < 0
        np.testing.assert_allclose(out @ q, 0.0, atol=1e-14)

    def test_shift_invariance(self):
        rng = np.random.default_rng(1)
        m = rng.standard_normal((3, 3))
        q = prj.proj_point(rng.standard_normal(3))
        for lam in (-2.0, 0.5, 10.0):
            np.testing.assert_allclose(
                prj.project_field(m + lam * np.eye(3), q),
                prj.project_field(m, q), atol=1e-10)


class TestAngleDynamics:
    def test_pure_rotation(self):
        f, g = prj.angle_dynamics_d2(ROT, *ZERO_IN)
        for theta in np.linspace(0, np.pi, 7):
            assert f(theta, 0.3) == pytest.approx(1.0, abs=1e-12)
            assert g(theta, 0.3) == pytest.approx(0.0, abs=1e-12)

    def test_diagonal_formulas(self):
        a_, b_ = 0.7, -1.2
        f, g = prj.angle_dynamics_d2(np.diag([a_, b_]), *ZERO_IN)
        for theta in np.linspace(0, np.pi, 9):
            assert f(theta, 1.0) == pytest.approx(
                (b_ - a_) * np.sin(theta) * np.cos(theta), abs=1e-12)
            assert g(theta, 1.0) == pytest.approx(
                a_ * np.cos(theta) ** 2 + b_ * np.sin(theta) ** 2, abs=1e-12)

    def test_pi_periodicity(self):
        a, b, k = SADDLE
        f, g = prj.angle_dynamics_d2(a, b, k)
        rng = np.random.default_rng(3)
        for theta in rng.uniform(0, np.pi, 10):
            assert f(theta + np.pi, 0.5) == pytest.approx(f(theta, 0.5), abs=1e-12)
            assert g(theta + np.pi, 0.5) == pytest.approx(g(theta, 0.5), abs=1e-12)

    def test_radial_integral_reproduces_log_growth(self):
        a, b, k = SADDLE
        alpha = 0.8
        f, g = prj.angle_dynamics_d2(a, b, k)
        x0 = np.array([np.cos(0.3), np.sin(0.3)])
        t_end, n = 2.0, 4000
        dt = t_end / n
        theta, ell = 0.3, 0.0

        def step(th, el):
            # joint RK4 on (theta, log radius)
            k1 = (f(th, alpha), g(th, alpha))
            k2 = (f(th + 0.5 * dt * k1[0], alpha), g(th + 0.5 * dt * k1[0], alpha))
            k3 = (f(th + 0.5 * dt * k2[0], alpha), g(th + 0.5 * dt * k2[0], alpha))
            k4 = (f(th + dt * k3[0], alpha), g(th + dt * k3[0], alpha))
            return (th + dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                    el + dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))

        for _ in range(n):
            theta, ell = step(theta, ell)
        s = PESignal.constant(alpha, period=1.0)
        x_t = rates.fundamental_solution(a, b, k, s, t_end) @ x0
        assert ell == pytest.approx(np.log(np.linalg.norm(x_t)), abs=1e-6)


class TestInvariantSet:
    def test_rotation_whole_circle(self):
        res = prj.invariant_control_set_d2(ROT, *ZERO_IN, RANGE, resolution=1024)
        assert res.applicable and res.arcs.whole and res.n_sinks == 1

    def test_saddle_single_arc(self):
        a, b, k = SADDLE
        res = prj.invariant_control_set_d2(a, b, k, RANGE, resolution=2048)
        assert res.applicable and not res.arcs.whole
        assert len(res.arcs.arcs) == 1
        lo, hi = res.arcs.arcs[0]
        assert 0.0 < hi - lo < np.pi / 2

    def test_weak_input_arc_near_attractor(self):
        # near-autonomous saddle: invariant set hugs the attracting axis
        a = np.diag([1.0, -1.0])
        b = np.array([[1.0], [1.0]])
        k = 0.05 * np.array([[-1.0, 0.5]])
        res = prj.invariant_control_set_d2(a, b, k, RANGE, resolution=4096)
        assert res.applicable and not res.arcs.whole
        # projectively the dominant eigendirection attracts: theta = 0 here
        assert res.arcs.contains(0.0, inflate=0.05)
        assert not res.arcs.contains(np.pi / 2, inflate=0.05)
        assert res.arcs.measure() < 0.2

    def test_not_applicable_without_plarc(self):
        res = prj.invariant_control_set_d2(np.diag([1.0, 2.0]), *ZERO_IN, RANGE,
                                           resolution=512)
        assert not res.applicable and res.arcs is None

    def test_forward_invariance_audit(self):
        a, b, k = SADDLE
        res = prj.invariant_control_set_d2(a, b, k, RANGE, resolution=2048)
        pts = prj.boundary_points(res.arcs, 40, 2048)
        audit = prj.forward_invariance_audit(a, b, k, RANGE, res.arcs, pts,
                                             n_signals=20, horizon=6.0,
                                             resolution=2048, seed=0)
        assert audit.ok, audit.max_excursion


class TestSteering:
    def test_rotation_reaches_quickly(self):
        st = prj.steer_d2([1.0, 0.0], [1.0, 1.0], ROT, *ZERO_IN, RANGE,
                          resolution=1024)
        assert st.tau <= np.pi
        assert st.final_distance <= np.pi / 1024 + 1e-12

    def test_trivial_target(self):
        st = prj.steer_d2([1.0, 1.0], [1.0, 1.0], ROT, *ZERO_IN, RANGE)
        assert st.tau == 0.0

    def test_steered_signal_values_admissible(self):
        a, b, k = SADDLE
        res = prj.invariant_control_set_d2(a, b, k, RANGE, resolution=2048)
        lo, hi = res.arcs.arcs[0]
        target = prj.point_of(0.5 * (lo + hi))
        st = prj.steer_d2([1.0, 0.0], target, a, b, k, RANGE, resolution=2048)
        assert set(np.unique(st.signal.values)) <= {RANGE[0], RANGE[1]}

    def test_random_pairs_within_bound(self):
        rng = np.random.default_rng(6)
        target = prj.point_of(1.0)
        bound = prj.steering_time_bound(ROT, *ZERO_IN, RANGE, target,
                                        resolution=1024, mesh=24)
        for _ in range(10):
            q0 = prj.point_of(rng.uniform(0, np.pi))
            st = prj.steer_d2(q0, target, ROT, *ZERO_IN, RANGE, resolution=1024)
            assert st.tau <= bound

    def test_closes_the_splice_loop(self):
        # steering output is admissible input for the periodic splice
        from pegrowth.signals import splice_periodic, validate_pe
        a, b, k = SADDLE
        res = prj.invariant_control_set_d2(a, b, k, RANGE, resolution=2048)
        lo, hi = res.arcs.arcs[0]
        st = prj.steer_d2([0.0, 1.0], prj.point_of(0.5 * (lo + hi)), a, b, k,
                          RANGE, resolution=2048)
        if st.tau == 0.0:
            pytest.skip("start coincided with target")
        out = splice_periodic(PESignal.constant(1.0), 1.0, st.signal, st.tau, CLS)
        assert validate_pe(out, CLS).valid


def test_unreachable_raises():
    # pure saddle with no input: from a generic angle the flow never reaches
    # the repelling axis
    a = np.diag([1.0, -1.0])
    with pytest.raises((prj.SteeringError, Exception)):
        prj.steer_d2([1.0, 1.0], [0.0, 1.0], a, *ZERO_IN, RANGE,
                     resolution=512, max_time=5.0)
