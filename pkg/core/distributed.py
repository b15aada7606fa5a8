# core/distributed.py
"""
Data-parallel training on one host.

The coordinator spawns N worker processes. Each worker owns a model replica
and a disjoint share of the training ids, and samples either straight from
the store (transport 'in-process') or through a sampling server the
coordinator starts (transport 'socket'). Every step is a rendezvous:
workers send gradients, the coordinator averages them in worker-index order
and sends the average back, every replica applies it and reports its weight
digest, and the coordinator checks the digests match its own replica.
"""
import time
import logging
import traceback
from dataclasses import dataclass, field, replace
from multiprocessing import get_context
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence
import numpy as np
from storage import GraphStore
from utils.process_manager import ProcessManager
from utils.system_diagnostics import SystemDiagnostics
from .errors import DimensionError, ReplicaDivergence, WorkerFailure
from .sage_model import Gradients, SageModel, init_model, step
from .sampler import fetch_metadata
from .sampling_server import SamplingClient, SamplingServer
from .trainer import TrainConfig, epoch_batches, list_node_ids, run_batch, split_holdout
logger = logging.getLogger(__name__)
TRANSPORTS = ('in-process', 'socket')
@dataclass
class ClusterConfig:
    num_workers: int = 1
    batch_size: int = 512
    transport: str = 'in-process'
    sync_timeout: float = 120.0
    page_cache_bytes: int = 64 * 1024 * 1024
    def validate(self):
        if self.num_workers < 1:
            raise ValueError("num_workers must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.transport not in TRANSPORTS:
            raise ValueError(f"unknown transport {self.transport!r} (expected one of {TRANSPORTS})")
@dataclass
class WorkerReport:
    worker_id: int
    epoch: int
    epoch_time: float
    batches: int
    sampled_nodes: float
    sampled_edges: float
    loss: float
    losses: List[float] = field(default_factory=list)
    batch_records: List[Dict[str, Any]] = field(default_factory=list)
def allreduce_average(grad_sets: Sequence[Gradients]) -> Gradients:
    """Entrywise mean; sums in the given (worker-index) order, then divides once"""
    if not grad_sets:
        raise ValueError("no gradients to average")
    reference = [g.shape for g in grad_sets[0].arrays()]
    totals = [g.copy() for g in grad_sets[0].arrays()]
    for grads in grad_sets[1:]:
        arrays = grads.arrays()
        if [g.shape for g in arrays] != reference:
            raise DimensionError(f"gradient shapes {[g.shape for g in arrays]} do not match {reference}")
        for total, g in zip(totals, arrays):
            total += g
    count = float(len(grad_sets))
    return Gradients.from_arrays([total / count for total in totals])
def partition_ids(train_ids: Sequence[Any], num_workers: int, seed: int, epoch: int = 0) -> List[List[Any]]:
    """Disjoint, covering split of the training ids for one epoch"""
    return [[s for _, batch in epoch_batches(train_ids, max(1, len(train_ids)), seed, epoch, num_workers, w)
             for s in batch] for w in range(num_workers)]
def _worker_main(worker_id: int, conn, store_path: str, address, cfg: TrainConfig, cluster: ClusterConfig,
                 arrays: List[np.ndarray], activation: str, train_ids: List[Any], epochs: int):
    """Entry point of a spawned worker; every message to the coordinator is a (kind, payload) tuple"""
    store = None
    source = None
    try:
        model = SageModel(arrays[:-1], arrays[-1], activation, cfg.lr, list(cfg.fanouts))
        if address is None:
            store = GraphStore(store_path, 'r', cluster.page_cache_bytes)
            source = store
        else:
            source = SamplingClient(address, timeout=cluster.sync_timeout)
        n = cluster.num_workers
        for epoch in range(epochs):
            started = time.perf_counter()
            batches = epoch_batches(train_ids, cluster.batch_size, cfg.seed, epoch, n, worker_id)
            steps = conn.recv()
            losses, nodes, edges, records = [], [], [], []
            for position in range(steps):
                if position < len(batches):
                    batch_index, seeds = batches[position]
                    batch_started = time.perf_counter()
                    value, grads, batch = run_batch(source, model, seeds, cfg, epoch, batch_index)
                    losses.append(value)
                    nodes.append(batch.subgraph.num_nodes)
                    edges.append(batch.subgraph.num_edges)
                    records.append({'epoch': epoch, 'batch': batch_index,
                                    'batch_time_ms': 1000 * (time.perf_counter() - batch_started),
                                    'sampled_nodes': nodes[-1], 'sampled_edges': edges[-1], 'loss': value})
                    conn.send(('grads', grads.arrays()))
                else:
                    conn.send(('idle', None))
                _, payload = conn.recv()
                step(model, Gradients.from_arrays(payload), cfg.lr)
                conn.send(('digest', model.digest()))
            conn.send(('report', WorkerReport(
                worker_id, epoch, time.perf_counter() - started, len(batches),
                float(np.mean(nodes)) if nodes else 0.0, float(np.mean(edges)) if edges else 0.0,
                float(np.mean(losses)) if losses else float('nan'), losses, records)))
    except Exception as e:
        try:
            conn.send(('error', f"{type(e).__name__}: {e}\n{traceback.format_exc()}"))
        except (OSError, EOFError):
            pass
    finally:
        if store is not None:
            store.close()
        if isinstance(source, SamplingClient):
            source.close()
        conn.close()
class Coordinator:
    """Owns the worker processes and the reference replica"""
    def __init__(self, cluster: ClusterConfig, cfg: TrainConfig, model: SageModel):
        self.cluster = cluster
        self.cfg = cfg
        self.model = model
        self.process_manager = ProcessManager()
        self.processes = []
        self.connections = []
    def start(self, store_path: Path, address, train_ids: List[Any], epochs: int):
        ctx = get_context('spawn')
        arrays = self.model.parameters()
        for worker_id in range(self.cluster.num_workers):
            parent, child = ctx.Pipe()
            process = ctx.Process(target=_worker_main, name=f"sage-worker-{worker_id}",
                                  args=(worker_id, child, str(store_path), address, self.cfg, self.cluster,
                                        arrays, self.model.activation, list(train_ids), epochs),
                                  daemon=True)
            process.start()
            child.close()
            self.process_manager.track_process(process.pid)
            self.processes.append(process)
            self.connections.append(parent)
        logger.info(f"Started {self.cluster.num_workers} worker process(es)")
    def _receive(self, worker_id: int, expected: str):
        conn = self.connections[worker_id]
        try:
            if not conn.poll(self.cluster.sync_timeout):
                raise WorkerFailure(worker_id, f"no message within {self.cluster.sync_timeout}s")
            kind, payload = conn.recv()
        except (EOFError, OSError) as e:
            raise WorkerFailure(worker_id, f"connection lost ({e})")
        if kind == 'error':
            raise WorkerFailure(worker_id, payload)
        if kind not in (expected, 'idle') or (kind == 'idle' and expected != 'grads'):
            raise WorkerFailure(worker_id, f"expected {expected!r}, got {kind!r}")
        return kind, payload
    def broadcast(self, message):
        for worker_id, conn in enumerate(self.connections):
            try:
                conn.send(message)
            except (OSError, BrokenPipeError) as e:
                raise WorkerFailure(worker_id, f"send failed ({e})")
    def run_epoch(self, epoch: int, steps: int) -> List[WorkerReport]:
        self.broadcast(steps)
        for position in range(steps):
            contributions = []
            for worker_id in range(self.cluster.num_workers):
                kind, payload = self._receive(worker_id, 'grads')
                if kind == 'grads':
                    contributions.append(Gradients.from_arrays(payload))
            if not contributions:
                raise WorkerFailure(-1, f"no worker contributed to step {position}")
            averaged = allreduce_average(contributions)
            self.broadcast(('update', averaged.arrays()))
            step(self.model, averaged, self.cfg.lr)
            expected = self.model.digest()
            for worker_id in range(self.cluster.num_workers):
                _, digest = self._receive(worker_id, 'digest')
                if digest != expected:
                    raise ReplicaDivergence(f"worker {worker_id} diverged at epoch {epoch} step {position}")
        return [self._receive(worker_id, 'report')[1] for worker_id in range(self.cluster.num_workers)]
    def shutdown(self, force: bool = False):
        if force:
            self.process_manager.force_exit()
        for process in self.processes:
            process.join(timeout=5 if not force else 1)
            if process.is_alive():
                process.terminate()
            self.process_manager.untrack_process(process.pid)
        for conn in self.connections:
            conn.close()
def metric_records(reports: List[List[WorkerReport]]) -> List[Dict[str, Any]]:
    """Per-batch metric rows from every worker, ordered by epoch then global batch index"""
    rows = [row for epoch in reports for report in epoch for row in report.batch_records]
    return sorted(rows, key=lambda row: (row['epoch'], row['batch']))
def run_distributed(store, cluster: ClusterConfig, cfg: TrainConfig, epochs: Optional[int] = None,
                    progress_callback: Optional[Callable[[int, int], Any]] = None) -> Dict[str, Any]:
    """
    Train with cluster.num_workers replicas. `store` is an open GraphStore (used
    for metadata, the id split and, with the socket transport, the sampling
    server). Returns per-epoch worker reports, wall epoch times and the model.
    """
    cluster.validate()
    epochs = cfg.epochs if epochs is None else epochs
    cfg = replace(cfg, batch_size=cluster.batch_size)
    cores = SystemDiagnostics().physical_cores()
    if cluster.num_workers > cores:
        logger.warning(f"{cluster.num_workers} workers on {cores} physical cores; expect no further speed-up")
    meta = fetch_metadata(store, cfg.node_type)
    model = init_model(meta, cfg.hidden_dim, len(cfg.fanouts), cfg.seed, cfg.node_type, cfg.lr, cfg.fanouts)
    train_ids, held_out = split_holdout(list_node_ids(store, cfg.node_type), cfg.holdout_fraction, cfg.seed)
    server = None
    address = None
    if cluster.transport == 'socket':
        server = SamplingServer(store, max_workers=cluster.num_workers)
        address = server.start()
    coordinator = Coordinator(cluster, cfg, model)
    reports: List[List[WorkerReport]] = []
    epoch_times: List[float] = []
    failed = True
    try:
        coordinator.start(store.path, address, train_ids, epochs)
        for epoch in range(epochs):
            steps = max(len(epoch_batches(train_ids, cluster.batch_size, cfg.seed, epoch, cluster.num_workers, w))
                        for w in range(cluster.num_workers))
            started = time.perf_counter()
            reports.append(coordinator.run_epoch(epoch, steps))
            epoch_times.append(time.perf_counter() - started)
            logger.info(f"Epoch {epoch}: {epoch_times[-1]:.2f}s wall with {cluster.num_workers} worker(s), "
                        f"loss {np.nanmean([r.loss for r in reports[-1]]):.4f}")
            if callable(progress_callback):
                progress_callback(epoch + 1, epochs)
        failed = False
    except (WorkerFailure, ReplicaDivergence) as e:
        logger.error(f"Distributed training aborted: {e}")
        raise
    finally:
        coordinator.shutdown(force=failed)
        if server is not None:
            server.stop()
    return {'status': 'success', 'model': model, 'reports': reports, 'epoch_times': epoch_times,
            'records': metric_records(reports),
            'epoch_time': float(np.mean(epoch_times)) if epoch_times else 0.0,
            'train_ids': train_ids, 'held_out': held_out, 'metadata': meta}
