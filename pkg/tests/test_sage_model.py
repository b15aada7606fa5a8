# tests/test_sage_model.py
import numpy as np
import pytest
from core.errors import DimensionError, InitError, StepError
from core.sage_model import (Batch, ForwardCache, Gradients, SageModel, backward, forward, init_model, load_model,
                             loss, neighbour_mean, adjacency, predict, save_model, step, train_step)
from core.sampler import GraphMetadata, NodeTypeInfo, SampledSubgraph
def make_batch(features, edge_pairs, num_targets, labels=None):
    features = np.asarray(features, dtype=np.float64)
    ids = list(range(features.shape[0]))
    labels = [0] * num_targets if labels is None else labels
    graph = SampledSubgraph(seed_ids=ids[:num_targets], local_index={i: i for i in ids},
                            edge_pairs=list(edge_pairs), node_features={i: features[i] for i in ids},
                            seed_labels=list(labels))
    return Batch.from_subgraph(graph)
def make_meta(feature_dim=8, num_classes=4):
    return GraphMetadata(node_types=[NodeTypeInfo('PAPER', ['id', 'features', 'label'], feature_dim, 10)],
                         num_classes=num_classes)
def random_batch(rng, num_nodes=20, num_targets=8, feature_dim=3, num_classes=3, isolated=(2, 5, 11)):
    features = rng.normal(size=(num_nodes, feature_dim))
    pairs = set()
    for src in range(num_nodes):
        if src in isolated:
            continue
        for dst in rng.choice(num_nodes, size=3, replace=False):
            pairs.add((src, int(dst)))
    labels = rng.integers(0, num_classes, size=num_targets).tolist()
    return make_batch(features, sorted(pairs), num_targets, labels)
def dense_forward(model, features, edge_pairs, num_targets):
    n = features.shape[0]
    adj = np.zeros((n, n))
    for src, dst in edge_pairs:
        adj[src, dst] = 1.0
    rows = adj.sum(axis=1, keepdims=True)
    norm = np.divide(adj, rows, out=np.zeros_like(adj), where=rows > 0)
    h = features
    for weights in model.layers:
        pre = np.hstack([h, norm @ h]) @ weights.T
        h = np.maximum(pre, 0.0) if model.activation == 'relu' else pre
    return h[:num_targets] @ model.classifier.T
class TestForward:
    def test_hand_computed_linear_layer(self):
        weights = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
        model = SageModel([weights], np.eye(2), activation='identity')
        batch = make_batch([[1.0, 0.0], [0.0, 2.0], [0.0, 4.0]], [(0, 1), (0, 2)], 1)
        np.testing.assert_allclose(forward(model, batch), [[1.0, 3.0]])
    def test_node_without_neighbours_sees_zero_mean(self):
        weights = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
        model = SageModel([weights], np.eye(2), activation='identity')
        batch = make_batch([[1.0, 0.0], [0.0, 2.0]], [], 1)
        np.testing.assert_allclose(forward(model, batch), [[1.0, 0.0]])
    def test_matches_dense_adjacency(self):
        rng = np.random.default_rng(3)
        batch = random_batch(rng)
        model = init_model(make_meta(3, 3), hidden_dim=5, num_layers=2, seed=1)
        expected = dense_forward(model, batch.features, batch.subgraph.edge_pairs, batch.num_targets)
        np.testing.assert_allclose(forward(model, batch), expected, rtol=1e-12, atol=1e-12)
    def test_edge_order_does_not_change_the_mean(self):
        rng = np.random.default_rng(5)
        h = rng.normal(size=(6, 3))
        pairs = [(0, 1), (0, 2), (1, 3), (0, 4), (4, 5)]
        forward_order = neighbour_mean(h, *adjacency(6, pairs))
        reverse_order = neighbour_mean(h, *adjacency(6, pairs[::-1]))
        assert np.array_equal(forward_order, reverse_order)
    def test_feature_width_mismatch(self):
        model = init_model(make_meta(4, 2), hidden_dim=3, num_layers=1, seed=0)
        with pytest.raises(DimensionError):
            forward(model, make_batch(np.zeros((2, 5)), [], 1))
    def test_batch_needs_labels(self):
        graph = SampledSubgraph(seed_ids=[0], local_index={0: 0}, node_features={0: np.zeros(2)},
                                seed_labels=[None])
        with pytest.raises(DimensionError):
            Batch.from_subgraph(graph)
class TestLoss:
    def test_uniform_logits(self):
        assert loss(np.zeros((5, 4)), [0, 1, 2, 3, 0]) == pytest.approx(np.log(4))
    def test_large_logits_stay_finite(self):
        value = loss(np.array([[1000.0, 0.0], [0.0, 1000.0]]), [0, 1])
        assert value == pytest.approx(0.0, abs=1e-12)
    def test_label_out_of_range(self):
        with pytest.raises(DimensionError):
            loss(np.zeros((2, 3)), [0, 3])
class TestBackward:
    @pytest.mark.parametrize('activation', ['identity', 'relu'])
    def test_gradients_match_finite_differences(self, activation):
        rng = np.random.default_rng(11)
        batch = random_batch(rng)
        if activation == 'relu':
            # keep every pre-activation well away from the kink
            batch.features[:] = np.abs(batch.features) + 0.1
        model = init_model(make_meta(3, 3), hidden_dim=4, num_layers=2, seed=2, activation=activation)
        if activation == 'relu':
            model.layers = [np.abs(w) + 0.05 for w in model.layers]
        _, grads = train_step(model, batch)
        eps = 1e-4
        for weights, analytic in zip(model.parameters(), grads.arrays()):
            numeric = np.zeros_like(weights)
            for index in np.ndindex(weights.shape):
                original = weights[index]
                weights[index] = original + eps
                plus = loss(forward(model, batch), batch.labels)
                weights[index] = original - eps
                minus = loss(forward(model, batch), batch.labels)
                weights[index] = original
                numeric[index] = (plus - minus) / (2 * eps)
            np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-8)
    def test_loss_scale_scales_gradients(self):
        rng = np.random.default_rng(4)
        batch = random_batch(rng)
        model = init_model(make_meta(3, 3), hidden_dim=4, num_layers=2, seed=0)
        cache = ForwardCache(np.empty(0), np.empty(0), np.empty(0))
        logits = forward(model, batch, cache)
        half = backward(model, batch, logits, cache, loss_scale=0.5)
        _, full = train_step(model, batch)
        for a, b in zip(half.arrays(), full.arrays()):
            np.testing.assert_allclose(a * 2, b)
class TestModel:
    def test_init_shapes(self):
        model = init_model(make_meta(8, 4), hidden_dim=16, num_layers=2, seed=0)
        assert [w.shape for w in model.layers] == [(16, 16), (16, 32)]
        assert model.classifier.shape == (4, 16)
        assert (model.feature_dim, model.num_classes, model.num_layers) == (8, 4, 2)
    def test_same_seed_same_weights(self):
        first = init_model(make_meta(), hidden_dim=16, num_layers=2, seed=9)
        second = init_model(make_meta(), hidden_dim=16, num_layers=2, seed=9)
        assert first.digest() == second.digest()
        assert init_model(make_meta(), hidden_dim=16, num_layers=2, seed=10).digest() != first.digest()
    @pytest.mark.parametrize('meta, kwargs', [
        (make_meta(), {'num_layers': 0}),
        (make_meta(), {'hidden_dim': 0}),
        (make_meta(num_classes=0), {}),
        (GraphMetadata(node_types=[NodeTypeInfo('PAPER', ['id'], None, 3)], num_classes=2), {}),
        (make_meta(), {'activation': 'tanh'}),
    ])
    def test_init_errors(self, meta, kwargs):
        options = dict(hidden_dim=4, num_layers=1, seed=0)
        options.update(kwargs)
        with pytest.raises(InitError):
            init_model(meta, **options)
    def test_zero_learning_rate_is_a_no_op(self):
        batch = random_batch(np.random.default_rng(0))
        model = init_model(make_meta(3, 3), hidden_dim=4, num_layers=2, seed=0)
        before = model.digest()
        _, grads = train_step(model, batch)
        step(model, grads, lr=0.0)
        assert model.digest() == before
    def test_non_finite_gradient(self):
        model = init_model(make_meta(3, 3), hidden_dim=4, num_layers=1, seed=0)
        grads = Gradients([np.full_like(model.layers[0], np.nan)], np.zeros_like(model.classifier))
        before = model.digest()
        with pytest.raises(StepError):
            step(model, grads)
        assert model.digest() == before
    def test_gradient_shape_mismatch(self):
        model = init_model(make_meta(3, 3), hidden_dim=4, num_layers=1, seed=0)
        with pytest.raises(DimensionError):
            step(model, Gradients([np.zeros((2, 2))], np.zeros_like(model.classifier)))
    def test_steps_reduce_loss_on_a_fixed_batch(self):
        batch = random_batch(np.random.default_rng(8))
        model = init_model(make_meta(3, 3), hidden_dim=8, num_layers=2, seed=0, lr=0.5)
        first, grads = train_step(model, batch)
        for _ in range(30):
            step(model, grads)
            current, grads = train_step(model, batch)
        assert current < first
        assert predict(model, batch).shape == (batch.num_targets,)
    def test_save_and_load(self, tmp_path):
        model = init_model(make_meta(), hidden_dim=6, num_layers=3, seed=4, lr=0.05, fanouts=[5, 4, 3])
        loaded = load_model(save_model(model, tmp_path / 'model.npz'))
        assert loaded.digest() == model.digest()
        assert (loaded.activation, loaded.lr, loaded.fanouts) == ('relu', 0.05, [5, 4, 3])
