import numpy as np
import pytest
from sklearn.datasets import make_moons

from errssl.application.use_cases import (
    SolveERRClassification,
    SolveERREmbedding,
    SolveIRR,
    kernel_for,
    solve_err_classification,
    solve_err_embedding,
)
from errssl.domain.dataset import (
    DataSet,
    RelationLabelSet,
    make_split,
    sample_relation_labels,
    target_encoding,
)
from errssl.domain.graph import graph_from_weights, knn_graph, laplacian
from errssl.domain.relreg import RelationshipKernel, adaptive_sigma_f, label_energy
from errssl.errors import GraphError
from errssl.models import EnergyConfig, KernelMode, LaplacianKind


@pytest.fixture
def moons_problem():
    points, labels = make_moons(n_samples=200, noise=0.1, random_state=1)
    ds = DataSet(points=points, labels=labels)
    op = laplacian(knn_graph(points, 101, None), LaplacianKind.SYMMETRIC)
    split = make_split(ds, 2, 0, seed=0, per_class=True)
    t, h = target_encoding(split, 1)
    return op, t, h


class TestClassification:
    def test_without_relationship_term_matches_irr_exactly(self, moons_problem):
        op, t, h = moons_problem
        config = EnergyConfig(lambda1=0.5, lambda2=0.0)
        solution = solve_err_classification(t, h, op, config, RelationshipKernel(1.0))
        assert np.array_equal(solution.f, SolveIRR(op)(t, h, 0.5))
        assert solution.iterations_used == 0
        assert solution.converged

    def test_energy_decreases(self, moons_problem):
        op, t, h = moons_problem
        f0 = SolveIRR(op)(t, h, 1.0)
        kernel = RelationshipKernel(adaptive_sigma_f(f0))
        config = EnergyConfig(lambda1=1.0, lambda2=5.0, cg_steps=10)
        solution = SolveERRClassification(op, kernel)(t, h, config)
        assert solution.iterations_used >= 1
        assert solution.energy < solution.energy_trace[0]
        assert np.all(np.diff(solution.energy_trace) < 0)

    def test_deterministic(self, moons_problem):
        op, t, h = moons_problem
        config = EnergyConfig(lambda1=1.0, lambda2=5.0, cg_steps=5)
        a = solve_err_classification(t, h, op, config, RelationshipKernel(0.5))
        b = solve_err_classification(t, h, op, config, RelationshipKernel(0.5))
        assert np.array_equal(a.f, b.f)
        assert a.energy_trace == b.energy_trace

    def test_equivariant_under_point_order(self, make_graph, rng):
        g = make_graph(12)
        h = np.zeros(12)
        h[[0, 5, 9]] = 1.0
        t = (h * np.array([1, 0, 0, 0, 0, -1, 0, 0, 0, 1, 0, 0]))[:, None].astype(float)
        perm = rng.permutation(12)
        W = g.W.toarray()
        permuted_op = laplacian(graph_from_weights(W[np.ix_(perm, perm)]))
        config = EnergyConfig(lambda1=1.0, lambda2=2.0, cg_steps=5)
        kernel = RelationshipKernel(1.0)
        base = solve_err_classification(t, h, laplacian(g), config, kernel)
        moved = solve_err_classification(t[perm], h[perm], permuted_op, config, kernel)
        restored = np.empty_like(moved.f)
        restored[perm] = moved.f
        np.testing.assert_allclose(restored, base.f, rtol=1e-6, atol=1e-10)


class TestEmbedding:
    @pytest.fixture
    def op(self, blobs):
        return laplacian(knn_graph(blobs.points, 31, None), LaplacianKind.SYMMETRIC)

    def test_spectral_target_shape(self, op):
        target = SolveERREmbedding(op).spectral_target(2)
        assert target.shape == (op.u, 2)

    def test_no_terms_returns_spectral_embedding(self, op):
        use_case = SolveERREmbedding(op)
        target = use_case.spectral_target(2)
        config = EnergyConfig(lambda1=0.0, lambda2=0.0, lambda3=0.0)
        solution = use_case(target, config, RelationLabelSet.empty())
        assert np.array_equal(solution.f, target)
        assert solution.iterations_used == 0

    def test_label_energy_decreases(self, op, blobs):
        use_case = SolveERREmbedding(op)
        target = use_case.spectral_target(2)
        labels = sample_relation_labels(blobs, 10, seed=0)
        kernel = kernel_for(target, None)
        config = EnergyConfig(lambda1=0.0, lambda2=0.0, lambda3=10.0, cg_steps=20)
        solution = use_case(target, config, labels, kernel)
        before, _ = label_energy(target, kernel, labels)
        after, _ = label_energy(solution.f, kernel, labels)
        assert after < before

    def test_deterministic(self, op, blobs):
        labels = sample_relation_labels(blobs, 6, seed=2)
        config = EnergyConfig(lambda1=0.0, lambda2=0.1, lambda3=10.0, cg_steps=5)
        a = solve_err_embedding(blobs, op, config, None, labels)
        b = solve_err_embedding(blobs, op, config, None, labels)
        assert np.array_equal(a.f, b.f)

    def test_sparse_relationships(self, op, blobs):
        config = EnergyConfig(lambda1=0.0, lambda2=0.1, lambda3=10.0, cg_steps=3, sparsity=5)
        solution = solve_err_embedding(blobs, op, config, None, RelationLabelSet.empty(), dim=3)
        assert solution.f.shape == (blobs.u, 3)
        assert solution.energy <= solution.energy_trace[0]

    def test_disconnected_graph_rejected(self):
        W = np.zeros((6, 6))
        W[:3, :3] = 1.0
        W[3:, 3:] = 1.0
        np.fill_diagonal(W, 0.0)
        with pytest.raises(GraphError, match="connected components"):
            SolveERREmbedding(laplacian(graph_from_weights(W)))


class TestKernelFor:
    def test_scalar_for_single_column(self):
        kernel = kernel_for(np.array([0.0, 1.0, 2.0]), 0.3)
        assert kernel.mode is KernelMode.SCALAR
        assert kernel.sigma_f_sq == 0.3

    def test_vector_with_adaptive_bandwidth(self):
        f = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        kernel = kernel_for(f, None)
        assert kernel.mode is KernelMode.VECTOR
        assert kernel.sigma_f_sq == pytest.approx(adaptive_sigma_f(f))
