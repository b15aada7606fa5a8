# core/bench.py
"""
Desk-scale experiment sweeps.

  memory        batch time and peak tracked graph-data bytes per (page cache size, batch size)
  workers       wall epoch time of run_distributed per worker count
  readers       sampled rows per second with 1..N concurrent sampler processes
  distribution  how often each node is sampled versus its two-hop path count

Memory figures come from MemoryTracker allocation accounting, not process RSS.
"""
import time
import logging
from dataclasses import asdict, dataclass, replace
from multiprocessing import get_context
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
import numpy as np
import pandas as pd
from scipy import stats
from storage import PAGE_SIZE, GraphStore
from utils.memory_tracker import MemoryTracker
from utils.system_diagnostics import SystemDiagnostics
from .distributed import ClusterConfig, run_distributed
from .sampler import SamplingConfig, fetch_metadata, run_template, sample_two_hop
from .sage_model import init_model
from .trainer import TrainConfig, list_node_ids, split_holdout, train_epoch
logger = logging.getLogger(__name__)
BENCH_COLUMNS = ['scenario', 'cache_size', 'batch_size', 'workers', 'avg_batch_time', 'epoch_time',
                 'sampled_nodes', 'sampled_edges', 'peak_tracked_bytes', 'page_cache_hits', 'page_cache_misses',
                 'rows_per_sec', 'logical_cores']
TWO_HOP_PATHS_QUERY = """MATCH (a:$NODE_TYPE)-[r1:$REL_TYPE]->(b:$NODE_TYPE)-[r2:$REL_TYPE]->(c:$NODE_TYPE)
WHERE a.id IN $SEED_NODES
RETURN b.id AS hop1, c.id AS hop2"""
@dataclass
class BenchResult:
    scenario: str
    cache_size: int = 0
    batch_size: int = 0
    workers: int = 1
    avg_batch_time: float = 0.0
    epoch_time: float = 0.0
    sampled_nodes: float = 0.0
    sampled_edges: float = 0.0
    peak_tracked_bytes: int = 0
    page_cache_hits: int = 0
    page_cache_misses: int = 0
    rows_per_sec: float = 0.0
    logical_cores: int = 0
def _logical_cores() -> int:
    return int(SystemDiagnostics().get_cpu_info()['logical_cores'])
def bench_memory_sweep(store_path, cache_sizes: Sequence[int], batch_sizes: Sequence[int], cfg: TrainConfig,
                       max_batches: Optional[int] = None) -> List[BenchResult]:
    """One training epoch per (cache size in bytes, batch size); each run reopens the store with that cache"""
    results = []
    cores = _logical_cores()
    for cache_size in cache_sizes:
        for batch_size in batch_sizes:
            run_cfg = replace(cfg, batch_size=int(batch_size))
            memory = MemoryTracker("train-epoch")
            with GraphStore(store_path, 'r', int(cache_size)) as store:
                meta = fetch_metadata(store, run_cfg.node_type)
                model = init_model(meta, run_cfg.hidden_dim, len(run_cfg.fanouts), run_cfg.seed, run_cfg.node_type,
                                   run_cfg.lr, run_cfg.fanouts)
                train_ids, _ = split_holdout(list_node_ids(store, run_cfg.node_type), run_cfg.holdout_fraction,
                                             run_cfg.seed)
                if max_batches:
                    train_ids = train_ids[:max_batches * run_cfg.batch_size]
                started = time.perf_counter()
                report = train_epoch(store, model, run_cfg, train_ids, 0, memory)
                elapsed = time.perf_counter() - started
                cache = store.cache.stats()
            result = BenchResult('memory', int(cache_size), int(batch_size), 1, report['avg_batch_time'], elapsed,
                                 report['sampled_nodes'], report['sampled_edges'], memory.peak,
                                 cache['hits'], cache['misses'], 0.0, cores)
            logger.info(f"memory sweep: cache {cache_size // (1024 * 1024)} MiB, batch {batch_size}: "
                        f"{result.avg_batch_time * 1000:.1f} ms/batch, peak {result.peak_tracked_bytes} bytes")
            results.append(result)
    return results
def bench_worker_sweep(store: GraphStore, worker_counts: Sequence[int], cfg: TrainConfig,
                       batch_size: Optional[int] = None, transport: str = 'in-process',
                       sync_timeout: float = 120.0) -> List[BenchResult]:
    """
    One distributed epoch per worker count over a fixed total workload; the
    per-worker batch is the total batch divided by the worker count.
    """
    total_batch = batch_size or cfg.batch_size
    cores = _logical_cores()
    results = []
    for workers in worker_counts:
        cluster = ClusterConfig(int(workers), max(1, total_batch // int(workers)), transport, sync_timeout,
                                store.cache.capacity_pages * PAGE_SIZE)
        outcome = run_distributed(store, cluster, cfg, epochs=1)
        reports = outcome['reports'][0]
        result = BenchResult('workers', cluster.page_cache_bytes, cluster.batch_size, int(workers),
                             float(np.mean([r.epoch_time / max(1, r.batches) for r in reports])),
                             outcome['epoch_times'][0],
                             float(np.mean([r.sampled_nodes for r in reports])),
                             float(np.mean([r.sampled_edges for r in reports])), 0, 0, 0, 0.0, cores)
        logger.info(f"worker sweep: {workers} worker(s): epoch {result.epoch_time:.2f}s")
        results.append(result)
    return results
def _reader_job(args: Tuple[str, int, SamplingConfig, List[Any], int, int, int]) -> Tuple[int, float]:
    store_path, cache_bytes, cfg, seeds, max_neighbours, requests, reader = args
    rows = 0
    with GraphStore(store_path, 'r', cache_bytes) as store:
        started = time.perf_counter()
        for request in range(requests):
            graph = sample_two_hop(store, seeds, max_neighbours, cfg, sample_seed=reader * requests + request)
            rows += len(graph.hop1)
        elapsed = time.perf_counter() - started
    return rows, elapsed
def bench_reader_sweep(store_path, reader_counts: Sequence[int], cfg: SamplingConfig, seeds: Sequence[Any],
                       max_neighbours: int = 144, requests: int = 20,
                       cache_bytes: int = 64 * 1024 * 1024) -> List[BenchResult]:
    """Store-level sampled rows per second with N reader processes issuing two-hop samples concurrently"""
    ctx = get_context('spawn')
    cores = _logical_cores()
    results = []
    for readers in reader_counts:
        jobs = [(str(store_path), int(cache_bytes), cfg, list(seeds), int(max_neighbours), int(requests), r)
                for r in range(int(readers))]
        started = time.perf_counter()
        with ctx.Pool(processes=int(readers)) as pool:
            outcomes = pool.map(_reader_job, jobs)
        wall = time.perf_counter() - started
        # throughput over the slowest reader's sampling time excludes process start-up
        busy = max(elapsed for _, elapsed in outcomes) or wall
        total_rows = sum(rows for rows, _ in outcomes)
        result = BenchResult('readers', int(cache_bytes), len(seeds), int(readers), busy / max(1, requests), wall,
                             0.0, 0.0, 0, 0, 0, total_rows / busy if busy else 0.0, cores)
        logger.info(f"reader sweep: {readers} reader(s): {result.rows_per_sec:.0f} rows/s")
        results.append(result)
    return results
def two_hop_path_counts(store: GraphStore, seeds: Sequence[Any], cfg: SamplingConfig) -> Dict[Any, int]:
    """Number of seed-rooted two-hop paths through each node (as hop 1 or hop 2)"""
    counts: Dict[Any, int] = {}
    params = {'NODE_TYPE': cfg.node_type, 'REL_TYPE': cfg.rel_type, 'SEED_NODES': list(seeds)}
    for row in run_template(store, TWO_HOP_PATHS_QUERY, params):
        for node_id in (row['hop1'], row['hop2']):
            counts[node_id] = counts.get(node_id, 0) + 1
    return counts
def bench_sample_distribution(store: GraphStore, seeds: Sequence[Any], runs: int, cfg: SamplingConfig,
                              max_neighbours: Optional[int] = None) -> Tuple[pd.DataFrame, float]:
    """
    Sample `runs` times with seeds 0..runs-1 and count node appearances in the
    sampled rows. Returns the histogram frame and the Spearman rank correlation
    between times_sampled and two_hop_path_count.
    """
    limit = cfg.max_neighbours(len(seeds)) if max_neighbours is None else int(max_neighbours)
    sampled: Dict[Any, int] = {}
    for run in range(runs):
        graph = sample_two_hop(store, seeds, limit, cfg, sample_seed=run)
        for _, node_id, _ in graph.hop1 + graph.hop2:
            sampled[node_id] = sampled.get(node_id, 0) + 1
    paths = two_hop_path_counts(store, seeds, cfg)
    node_ids = sorted(set(paths) | set(sampled), key=lambda v: (str(type(v)), v))
    frame = pd.DataFrame({
        'node_id': node_ids,
        'times_sampled': [sampled.get(n, 0) for n in node_ids],
        'two_hop_path_count': [paths.get(n, 0) for n in node_ids],
    })
    if len(frame) > 1 and frame['times_sampled'].nunique() > 1 and frame['two_hop_path_count'].nunique() > 1:
        correlation = float(stats.spearmanr(frame['times_sampled'], frame['two_hop_path_count'])[0])
    else:
        correlation = float('nan')
    logger.info(f"Sample distribution over {runs} runs: {len(frame)} nodes, spearman {correlation:.3f}")
    return frame, correlation
def write_results(results: Sequence[BenchResult], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([asdict(r) for r in results], columns=BENCH_COLUMNS).to_csv(path, index=False)
    logger.info(f"Wrote {len(results)} bench rows to {path}")
    return path
