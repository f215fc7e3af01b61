import numpy as np
import pytest
from conftest import all_kind_objectives, random_operator, random_snapshots, rotation_snapshots

from mzdmd import (
    MemoryInit,
    Objective,
    SingularMatrixError,
    SnapshotPair,
    cayley_M,
    dmd_fit,
    expm,
    fd_gradient,
    matpow,
    memory_kernel_closed,
    memory_kernel_trapezoid,
    mz_memory_matrix,
    objective_gradient,
    objective_value,
    solve,
    tmodel_memory_matrix,
)


class TestSnapshotPair:
    def test_from_snapshots_shapes(self):
        x = np.arange(8.0).reshape(2, 4)
        s = SnapshotPair.from_snapshots(x, 0.1)
        np.testing.assert_array_equal(s.x_minus, x[:, :-1])
        np.testing.assert_array_equal(s.x_plus, x[:, 1:])
        assert s.dim == 2 and s.cols == 3

    def test_validation(self):
        with pytest.raises(ValueError):
            SnapshotPair(np.ones((2, 3)), np.ones((2, 4)), 0.1)
        with pytest.raises(ValueError):
            SnapshotPair(np.ones((2, 3)), np.ones((2, 3)), 0.0)
        with pytest.raises(ValueError):
            SnapshotPair(np.full((2, 2), np.nan), np.ones((2, 2)), 0.1)

    def test_objective_requires_memory(self):
        s = SnapshotPair(np.ones((2, 3)), np.ones((2, 3)), 0.1)
        with pytest.raises(ValueError):
            Objective("mz-dmd", s)
        with pytest.raises(ValueError):
            Objective("bogus", s)
        Objective("plain-dmd", s)  # memory optional for the plain kind


class TestDmdFit:
    def test_constant_data_fixed_point(self):
        e1 = np.array([1.0, 0.0])
        x = np.tile(e1[:, None], (1, 5))
        a = dmd_fit(SnapshotPair.from_snapshots(x, 0.1))
        np.testing.assert_allclose(a @ e1, e1, atol=1e-12)

    def test_recovers_rotation_on_data_span(self):
        s, a_true = rotation_snapshots(n_snapshots=3)
        a = dmd_fit(s)
        np.testing.assert_allclose(a, a_true, atol=1e-12)

    def test_minimizes_least_squares(self):
        rng = np.random.default_rng(0)
        s = random_snapshots(rng, d=2, cols=20)
        a = dmd_fit(s)
        base = objective_value(Objective("plain-dmd", s), a)
        for _ in range(10):
            perturbed = a + 1e-3 * rng.standard_normal((2, 2))
            assert objective_value(Objective("plain-dmd", s), perturbed) >= base


class TestCayleyMap:
    def test_fixed_points(self):
        np.testing.assert_allclose(cayley_M(np.eye(2)), np.eye(2), atol=1e-14)
        np.testing.assert_allclose(cayley_M(np.zeros((2, 2))), 3 * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(cayley_M(3 * np.eye(2)), np.zeros((2, 2)), atol=1e-14)

    @pytest.mark.parametrize("seed", range(5))
    def test_equivalent_form(self, seed):
        # I - 2(A-I)(A+I)^-1 coincides with (3I - A)(A+I)^-1
        rng = np.random.default_rng(seed)
        a = random_operator(rng, 3)
        eye = np.eye(3)
        alt = solve((a + eye).T, (3 * eye - a).T).T
        assert np.abs(cayley_M(a) - alt).max() <= 1e-12

    def test_eigenvalue_minus_one_is_singular(self):
        with pytest.raises(SingularMatrixError):
            cayley_M(np.diag([-1.0, 2.0]))


class TestMemoryMatrices:
    def test_zero_memory_gives_zero_matrix(self):
        a = np.array([[0.5, 0.1], [-0.2, 0.4]])
        mem = MemoryInit.zero(2)
        np.testing.assert_array_equal(mz_memory_matrix(a, mem, 6), np.zeros((2, 6)))
        np.testing.assert_array_equal(
            tmodel_memory_matrix(a, mem, 0.1, 6), np.zeros((2, 6))
        )

    def test_first_column_exactly_zero(self):
        rng = np.random.default_rng(1)
        a = random_operator(rng, 2)
        mem = MemoryInit(rng.standard_normal(2))
        assert np.all(mz_memory_matrix(a, mem, 5)[:, 0] == 0.0)
        assert np.all(tmodel_memory_matrix(a, mem, 0.1, 5)[:, 0] == 0.0)

    def test_scalar_memory_column(self):
        # A = [3]: the transfer map vanishes, so column 1 is -e^2 before the
        # (A - I)^{-1} = 1/2 factor
        mem = MemoryInit(np.array([1.0]))
        mtil = mz_memory_matrix(np.array([[3.0]]), mem, 2)
        assert mtil[0, 1] == pytest.approx(-np.exp(2.0) / 2.0, rel=1e-12)

    def test_tmodel_identity_operator(self):
        mem = MemoryInit(np.array([1.0, 0.0]))
        g = tmodel_memory_matrix(np.eye(2), mem, 0.1, 3)
        np.testing.assert_allclose(g[:, 2], [0.2, 0.0], atol=1e-15)

    def test_tmodel_scalar_column(self):
        mem = MemoryInit(np.array([1.0]))
        g = tmodel_memory_matrix(np.array([[2.0]]), mem, 0.1, 4)
        assert g[0, 3] == pytest.approx(0.3 * np.exp(3.0), rel=1e-12)

    def test_mz_singular_at_eigenvalue_one(self):
        mem = MemoryInit(np.array([1.0, 1.0]))
        with pytest.raises(SingularMatrixError):
            mz_memory_matrix(np.diag([1.0, 0.5]), mem, 4)


def _naive_objective(kind, s, mem, a):
    """Elementwise recomputation used as an independent oracle: fresh expm
    per column, matrix powers by matpow, explicit double loop for the norm."""
    d, cols = s.dim, s.cols
    eye = np.eye(d)
    residual = np.zeros((d, cols))
    for j in range(cols):
        residual[:, j] = s.x_plus[:, j] - a @ s.x_minus[:, j]
        if j >= 1 and kind != "plain-dmd":
            wj = expm(float(j) * (a - eye))
            if kind == "mz-dmd":
                col = np.linalg.solve(a - eye, wj @ ((matpow(cayley_M(a), j) - eye) @ mem.n))
                residual[:, j] += s.dt**2 * col
            else:
                residual[:, j] -= s.dt * (j * s.dt) * (wj @ mem.n)
    total = 0.0
    for i in range(d):
        for j in range(cols):
            total += residual[i, j] ** 2
    return total


class TestObjectiveValue:
    def test_mz_with_zero_memory_equals_plain(self):
        rng = np.random.default_rng(2)
        s = random_snapshots(rng)
        a = random_operator(rng, 2)
        plain = objective_value(Objective("plain-dmd", s), a)
        assert objective_value(Objective("mz-dmd", s, MemoryInit.zero(2)), a) == plain
        assert objective_value(Objective("t-model", s, MemoryInit.zero(2)), a) == plain

    def test_exact_linear_data_is_zero(self):
        s, a_true = rotation_snapshots(n_snapshots=6)
        value = objective_value(Objective("mz-dmd", s, MemoryInit.zero(2)), a_true)
        assert value <= 1e-28

    @pytest.mark.parametrize("kind", ["plain-dmd", "mz-dmd", "t-model"])
    def test_matches_naive_recomputation(self, kind):
        rng = np.random.default_rng(3)
        s = random_snapshots(rng, cols=7)
        mem = MemoryInit.sample(2, 1.0, rng)
        a = random_operator(rng, 2)
        obj = Objective(kind, s, mem)
        naive = _naive_objective(kind, s, mem, a)
        assert objective_value(obj, a) == pytest.approx(naive, rel=1e-10)


class TestObjectiveGradient:
    def test_stationary_at_least_squares_solution(self):
        rng = np.random.default_rng(4)
        s = random_snapshots(rng, d=2, cols=30)
        a = dmd_fit(s)
        grad = objective_gradient(Objective("plain-dmd", s), a)
        bound = 1e-8 * np.linalg.norm(s.x_minus, "fro") ** 2
        assert np.linalg.norm(grad, "fro") <= bound

    @pytest.mark.parametrize("kind", ["plain-dmd", "mz-dmd", "t-model"])
    @pytest.mark.parametrize("seed", range(4))
    def test_matches_central_differences_2x2(self, kind, seed):
        rng = np.random.default_rng(seed)
        snaps = random_snapshots(rng)
        mem = MemoryInit.sample(2, 1.0, rng)
        obj = Objective(kind, snaps, mem)
        a = random_operator(rng, 2)
        analytic = objective_gradient(obj, a)
        numeric = fd_gradient(obj, a, h=1e-6)
        scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
        assert np.linalg.norm(analytic - numeric) / scale <= 1e-5

    @pytest.mark.parametrize("kind", ["mz-dmd", "t-model"])
    def test_matches_central_differences_4x4(self, kind):
        rng = np.random.default_rng(11)
        snaps = random_snapshots(rng, d=4, cols=8)
        obj = Objective(kind, snaps, MemoryInit.sample(4, 1.0, rng))
        a = random_operator(rng, 4)
        analytic = objective_gradient(obj, a)
        numeric = fd_gradient(obj, a, h=1e-6)
        scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
        assert np.linalg.norm(analytic - numeric) / scale <= 1e-5

    def test_zero_memory_gradient_reduces_exactly(self):
        rng = np.random.default_rng(5)
        s = random_snapshots(rng)
        a = random_operator(rng, 2)
        base = objective_gradient(Objective("plain-dmd", s), a)
        for kind in ("mz-dmd", "t-model"):
            other = objective_gradient(Objective(kind, s, MemoryInit.zero(2)), a)
            np.testing.assert_array_equal(other, base)


class TestFdGradient:
    def test_quadratic_callable(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((3, 3))
        grad = fd_gradient(lambda x: float(np.sum(x * x)), a, h=1e-6)
        assert np.abs(grad - 2 * a).max() <= 1e-8

    def test_plain_dmd_matches_closed_form(self):
        rng = np.random.default_rng(7)
        s = random_snapshots(rng, cols=12)
        a = random_operator(rng, 2)
        numeric = fd_gradient(Objective("plain-dmd", s), a)
        closed = -2.0 * (s.x_plus - a @ s.x_minus) @ s.x_minus.T
        assert np.abs(numeric - closed).max() <= 1e-6

    def test_step_size_consistency(self):
        rng = np.random.default_rng(8)
        obj = all_kind_objectives(rng)[2]
        a = random_operator(rng, 2)
        coarse = fd_gradient(obj, a, h=1e-4)
        fine = fd_gradient(obj, a, h=1e-6)
        assert np.abs(coarse - fine).max() <= 1e-4


class TestMemoryKernels:
    def test_zero_start_stays_zero(self):
        lam = np.array([0.3 + 0.2j, -0.5 + 0.0j])
        for fn in (memory_kernel_closed, memory_kernel_trapezoid):
            out = fn(lam, np.zeros(2), 10, 0.1)
            np.testing.assert_array_equal(out, np.zeros((10, 2), dtype=complex))

    def test_zero_generator_is_constant(self):
        m0 = np.array([1.0 + 1.0j, -2.0 + 0.0j])
        for fn in (memory_kernel_closed, memory_kernel_trapezoid):
            out = fn(np.zeros(2), m0, 7, 0.1)
            np.testing.assert_allclose(out, np.tile(m0, (7, 1)), atol=1e-14)

    def test_scalar_first_step(self):
        out = memory_kernel_closed(np.array([1.0]), np.array([1.0]), 1, 0.1)
        expected = np.exp(0.1) * (1.0 - 0.1 / 1.05)
        assert out[0, 0] == pytest.approx(expected, rel=1e-14)
        assert abs(out[0, 0] - 1.0) < 1e-4  # the scalar oracle lands near 1

    @pytest.mark.parametrize("seed", range(5))
    def test_closed_matches_trapezoid(self, seed):
        rng = np.random.default_rng(seed)
        lam = -rng.uniform(0.2, 1.0, 4) + 1j * rng.uniform(-1.0, 1.0, 4)
        m0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        closed = memory_kernel_closed(lam, m0, 50, 0.1)
        direct = memory_kernel_trapezoid(lam, m0, 50, 0.1)
        assert np.abs(closed - direct).max() <= 1e-10

    def test_singular_denominator(self):
        with pytest.raises(SingularMatrixError):
            memory_kernel_closed(np.array([-20.0]), np.array([1.0]), 3, 0.1)


@pytest.mark.parametrize("seed", range(3))
def test_telescoped_power_sum_identity(seed):
    # M^n + I + 2 sum_{k<n} M^k telescopes to (M^n - I)(-2/(dt*lam)) for the
    # diagonal transfer map; this is the simplification behind the memory
    # correction columns
    rng = np.random.default_rng(seed)
    dt = 0.1
    lam = -rng.uniform(0.2, 1.0, 4) + 1j * rng.uniform(-1.0, 1.0, 4)
    m = 1.0 - dt * lam / (1.0 + 0.5 * dt * lam)
    partial = np.zeros(4, dtype=complex)
    for k in range(1, 50):
        partial += m**k
        n = k + 1
        lhs = m**n + 1.0 + 2.0 * partial
        rhs = (m**n - 1.0) * (-2.0 / (dt * lam))
        assert np.abs(lhs - rhs).max() <= 1e-10
