# tests/test_distributed.py
import numpy as np
import pytest
from core.distributed import (ClusterConfig, WorkerReport, allreduce_average, metric_records, partition_ids,
                              run_distributed)
from core.errors import DimensionError
from core.sage_model import Gradients
from core.trainer import TrainConfig, train
def grads_of(*arrays):
    return Gradients.from_arrays([np.asarray(a, dtype=np.float64) for a in arrays])
class TestAllreduce:
    def test_identical_gradients_are_unchanged(self):
        g = grads_of([[1.0, 2.0]], [3.0])
        averaged = allreduce_average([g, g, g])
        for a, b in zip(averaged.arrays(), g.arrays()):
            np.testing.assert_array_equal(a, b)
    def test_opposite_gradients_cancel(self):
        averaged = allreduce_average([grads_of([[1.5, -2.0]], [0.25]), grads_of([[-1.5, 2.0]], [-0.25])])
        assert all(not a.any() for a in averaged.arrays())
    def test_mean_of_three(self):
        averaged = allreduce_average([grads_of([0.0], [1.0]), grads_of([3.0], [1.0]), grads_of([6.0], [4.0])])
        np.testing.assert_allclose(averaged.layers[0], [3.0])
        np.testing.assert_allclose(averaged.classifier, [2.0])
    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            allreduce_average([grads_of([1.0, 2.0], [0.0]), grads_of([1.0], [0.0])])
    def test_inputs_are_not_modified(self):
        first = grads_of([1.0], [1.0])
        allreduce_average([first, grads_of([3.0], [3.0])])
        np.testing.assert_array_equal(first.layers[0], [1.0])
    def test_nothing_to_average(self):
        with pytest.raises(ValueError):
            allreduce_average([])
class TestPartition:
    def test_disjoint_and_covering(self):
        ids = list(range(103))
        parts = partition_ids(ids, 4, seed=1)
        assert sorted(s for part in parts for s in part) == ids
        assert [len(p) for p in parts] == [26, 26, 26, 25]
    def test_single_worker_takes_everything(self):
        assert sorted(partition_ids(list(range(10)), 1, seed=0)[0]) == list(range(10))
    def test_metric_rows_carry_global_batch_index(self):
        def rows(*batches):
            return [{'epoch': 0, 'batch': b, 'batch_time_ms': 1.0, 'sampled_nodes': 5, 'sampled_edges': 4,
                     'loss': 0.5} for b in batches]
        reports = [[WorkerReport(0, 0, 1.0, 2, 5.0, 4.0, 0.5, batch_records=rows(0, 2)),
                    WorkerReport(1, 0, 1.0, 2, 5.0, 4.0, 0.5, batch_records=rows(1, 3))]]
        assert [row['batch'] for row in metric_records(reports)] == [0, 1, 2, 3]
    @pytest.mark.parametrize('kwargs', [{'num_workers': 0}, {'batch_size': 0}, {'transport': 'carrier-pigeon'}])
    def test_cluster_validation(self, kwargs):
        with pytest.raises(ValueError):
            ClusterConfig(**kwargs).validate()
def full_neighbourhood_config(**overrides):
    # fanouts above every degree in the fixture graph so sampling keeps every neighbour
    values = dict(epochs=1, batch_size=16, fanouts=[100, 100], hidden_dim=8, lr=0.1, seed=3,
                  strategy='per-hop-chained')
    values.update(overrides)
    return TrainConfig(**values)
@pytest.mark.slow
class TestCluster:
    def test_one_worker_replays_local_training(self, sbm_store):
        cfg = TrainConfig(epochs=1, batch_size=16, fanouts=[3, 3], hidden_dim=8, lr=0.1, seed=3)
        local = train(sbm_store, cfg)
        remote = run_distributed(sbm_store, ClusterConfig(num_workers=1, batch_size=16), cfg)
        assert remote['model'].digest() == local['model'].digest()
        assert remote['reports'][0][0].batches == local['epochs'][0]['batches']
    def test_two_half_batches_match_one_full_batch(self, sbm_store):
        cfg = full_neighbourhood_config()
        single = run_distributed(sbm_store, ClusterConfig(num_workers=1, batch_size=16), cfg)
        pair = run_distributed(sbm_store, ClusterConfig(num_workers=2, batch_size=8), cfg)
        for a, b in zip(single['model'].parameters(), pair['model'].parameters()):
            np.testing.assert_allclose(a, b, rtol=1e-7, atol=1e-10)
        assert len(pair['reports'][0]) == 2
        assert [row['batch'] for row in pair['records']] == list(range(8))
    def test_socket_transport_matches_in_process(self, sbm_store):
        cfg = full_neighbourhood_config(strategy='global-limit', fanouts=[3, 3])
        direct = run_distributed(sbm_store, ClusterConfig(num_workers=2, batch_size=8), cfg)
        served = run_distributed(sbm_store, ClusterConfig(num_workers=2, batch_size=8, transport='socket'), cfg)
        assert direct['model'].digest() == served['model'].digest()
