# tests/test_bench.py
import numpy as np
import pandas as pd
import pytest
from storage import GraphStore
from core.bench import (BENCH_COLUMNS, BenchResult, bench_memory_sweep, bench_reader_sweep, bench_sample_distribution,
                        bench_worker_sweep, two_hop_path_counts, write_results)
from core.sampler import SamplingConfig
from core.trainer import TrainConfig
from conftest import build_store
@pytest.fixture
def ring_store(tmp_path):
    nodes = [(f"r{i}", [float(i)], 0) for i in range(12)]
    edges = [(f"r{i}", f"r{(i + 1) % 12}") for i in range(12)]
    path = build_store(tmp_path / 'ring', nodes, edges)
    with GraphStore(path, 'r') as store:
        yield store
def test_path_counts_on_the_tree(tree_store, sampling_cfg):
    counts = two_hop_path_counts(tree_store, ['s0', 's1', 's2'], sampling_cfg)
    assert len(counts) == 18
    assert all(counts[f"h{s}{a}"] == 2 for s in range(3) for a in range(2))
    assert counts['t120'] == 1
def test_ring_samples_every_node_evenly(ring_store, sampling_cfg):
    runs = 300
    frame, correlation = bench_sample_distribution(ring_store, [f"r{i}" for i in range(12)], runs, sampling_cfg,
                                                   max_neighbours=6)
    assert len(frame) == 12
    assert set(frame['two_hop_path_count']) == {2}
    # every node sits on exactly two of the twelve paths and half of them are kept
    expected = runs
    assert np.all(np.abs(frame['times_sampled'] - expected) <= 5 * np.sqrt(runs * 0.5))
    assert np.isnan(correlation)
def test_sampling_tracks_path_counts(tree_store, sampling_cfg):
    frame, correlation = bench_sample_distribution(tree_store, ['s0', 's1', 's2'], 200, sampling_cfg,
                                                   max_neighbours=5)
    assert list(frame.columns) == ['node_id', 'times_sampled', 'two_hop_path_count']
    assert correlation > 0.7
def test_memory_sweep(sbm_path):
    cfg = TrainConfig(batch_size=16, fanouts=[3, 3], hidden_dim=8, seed=0)
    results = bench_memory_sweep(sbm_path, [4 * 8192, 64 * 1024 * 1024], [16], cfg, max_batches=2)
    small, large = results
    assert (small.cache_size, large.cache_size) == (4 * 8192, 64 * 1024 * 1024)
    assert small.peak_tracked_bytes > 0 and small.peak_tracked_bytes == large.peak_tracked_bytes
    assert small.page_cache_misses >= large.page_cache_misses
    assert small.sampled_nodes == large.sampled_nodes
def test_write_results(tmp_path):
    path = write_results([BenchResult('memory', cache_size=1, batch_size=2)], tmp_path / 'bench' / 'out.csv')
    frame = pd.read_csv(path)
    assert list(frame.columns) == BENCH_COLUMNS
    assert frame.loc[0, 'scenario'] == 'memory'
@pytest.mark.slow
def test_worker_sweep(sbm_store):
    cfg = TrainConfig(batch_size=16, fanouts=[3, 3], hidden_dim=8, seed=0)
    results = bench_worker_sweep(sbm_store, [1, 2], cfg)
    assert [(r.workers, r.batch_size) for r in results] == [(1, 16), (2, 8)]
    assert all(r.epoch_time > 0 for r in results)
@pytest.mark.slow
def test_reader_sweep(sbm_path):
    cfg = SamplingConfig(fanouts=[3, 3])
    results = bench_reader_sweep(sbm_path, [1, 2], cfg, seeds=list(range(8)), max_neighbours=72, requests=2)
    assert [r.workers for r in results] == [1, 2]
    assert all(r.rows_per_sec > 0 for r in results)
