# core/trainer.py
"""
Mini-batch training loop: seed batches -> sampler -> forward -> backward -> step.

Batch b of epoch e draws its neighbour sample from
SeedSequence([seed, e, b]); the distributed harness uses the same rule with
the global batch index, so a one-worker cluster replays train_epoch exactly.
"""
import time
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import numpy as np
import pandas as pd
from tqdm import tqdm
from storage import GraphStore
from utils.memory_tracker import MemoryTracker
from .errors import DimensionError
from .sage_model import Batch, SageModel, init_model, predict, step, train_step
from .sampler import SamplingConfig, fetch_metadata, run_template, sample
logger = logging.getLogger(__name__)
METRIC_COLUMNS = ['epoch', 'batch', 'batch_time_ms', 'sampled_nodes', 'sampled_edges', 'loss']
# sample draws for evaluation never collide with a training epoch
EVAL_EPOCH = 2 ** 32 - 1
NODE_IDS_QUERY = """MATCH (n:$NODE_TYPE)
RETURN n.id AS id"""
@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 512
    fanouts: List[int] = field(default_factory=lambda: [12, 12])
    hidden_dim: int = 64
    lr: float = 0.1
    strategy: str = 'global-limit'
    holdout_fraction: float = 0.2
    node_type: str = 'PAPER'
    rel_type: str = 'CITES'
    seed: int = 0
    @classmethod
    def from_config(cls, config, **overrides) -> "TrainConfig":
        """Build from a GlobalConfig; keyword overrides that are not None win"""
        values = dict(
            epochs=int(config.get_option('Training', 'epochs', 10)),
            batch_size=int(config.get_option('Training', 'batch_size', 512)),
            fanouts=config.get_fanouts(),
            hidden_dim=int(config.get_option('Training', 'hidden_dim', 64)),
            lr=float(config.get_option('Training', 'lr', 0.1)),
            strategy=str(config.get_option('Training', 'strategy', 'global-limit')),
            holdout_fraction=float(config.get_option('Training', 'holdout_fraction', 0.2)),
            node_type=str(config.get_option('Training', 'node_type', 'PAPER')),
            rel_type=str(config.get_option('Training', 'rel_type', 'CITES')),
            seed=config.get_seed(),
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
    def sampling(self) -> SamplingConfig:
        return SamplingConfig(list(self.fanouts), self.strategy, self.seed, self.node_type, self.rel_type)
def batch_seed(seed: int, epoch: int, batch_index: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(epoch), int(batch_index)]).generate_state(1)[0])
def list_node_ids(store: GraphStore, node_type: str) -> List[Any]:
    return [row['id'] for row in run_template(store, NODE_IDS_QUERY, {'NODE_TYPE': node_type})]
def split_holdout(node_ids: Sequence[Any], fraction: float, seed: int) -> Tuple[List[Any], List[Any]]:
    """Deterministic (train, held-out) split of node ids"""
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"holdout fraction must be in [0, 1), got {fraction}")
    order = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5EED])).permutation(len(node_ids))
    held = int(round(len(node_ids) * fraction))
    held_out = sorted(order[:held].tolist())
    train = sorted(order[held:].tolist())
    return [node_ids[i] for i in train], [node_ids[i] for i in held_out]
def epoch_batches(train_ids: Sequence[Any], batch_size: int, seed: int, epoch: int,
                  num_workers: int = 1, worker: int = 0) -> List[Tuple[int, List[Any]]]:
    """
    (global batch index, seed ids) for one worker. The epoch shuffle is shared by
    every worker; worker w takes every num_workers-th id of it and batch b of
    worker w has global index b * num_workers + w.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be positive")
    order = np.random.default_rng(np.random.SeedSequence([int(seed), int(epoch)])).permutation(len(train_ids))
    mine = [train_ids[i] for i in order[worker::num_workers]]
    return [(b * num_workers + worker, mine[start:start + batch_size])
            for b, start in enumerate(range(0, len(mine), batch_size))]
def make_batch(store: GraphStore, seeds: Sequence[Any], cfg: TrainConfig, sample_seed: int,
               memory: Optional[MemoryTracker] = None) -> Batch:
    subgraph = sample(store, seeds, cfg.sampling(), sample_seed, memory)
    batch = Batch.from_subgraph(subgraph)
    if memory is not None:
        memory.track(batch.features)
    return batch
def run_batch(store: GraphStore, model: SageModel, seeds: Sequence[Any], cfg: TrainConfig, epoch: int,
              batch_index: int, memory: Optional[MemoryTracker] = None):
    """Sample and differentiate one batch without updating; returns (loss, grads, batch)"""
    batch = make_batch(store, seeds, cfg, batch_seed(cfg.seed, epoch, batch_index), memory)
    value, grads = train_step(model, batch)
    return value, grads, batch
def train_epoch(store: GraphStore, model: SageModel, cfg: TrainConfig, train_ids: Sequence[Any], epoch: int = 0,
                memory: Optional[MemoryTracker] = None,
                progress_callback: Optional[Callable[[int, int], Any]] = None,
                show_progress: bool = False) -> Dict[str, Any]:
    """One pass over train_ids; returns per-batch averages plus the per-batch metric records"""
    batches = epoch_batches(train_ids, cfg.batch_size, cfg.seed, epoch)
    records = []
    with tqdm(total=len(batches), desc=f"Epoch {epoch}", unit="batch", disable=not show_progress) as pbar:
        for position, (batch_index, seeds) in enumerate(batches):
            started = time.perf_counter()
            mark = memory.current if memory is not None else 0
            value, grads, batch = run_batch(store, model, seeds, cfg, epoch, batch_index, memory)
            step(model, grads, cfg.lr)
            elapsed_ms = (time.perf_counter() - started) * 1000.0
            if memory is not None:
                memory.release(memory.current - mark)
            records.append({'epoch': epoch, 'batch': batch_index, 'batch_time_ms': elapsed_ms,
                            'sampled_nodes': batch.subgraph.num_nodes, 'sampled_edges': batch.subgraph.num_edges,
                            'loss': value})
            pbar.update(1)
            if callable(progress_callback):
                try:
                    if progress_callback(position + 1, len(batches)) is False:
                        logger.info("Training cancelled by progress callback")
                        break
                except Exception as e:
                    logger.error(f"Progress callback error: {e}")
    report = summarize(records)
    report['records'] = records
    logger.info(f"Epoch {epoch}: loss {report['loss']:.4f}, {report['avg_batch_time'] * 1000:.1f} ms/batch, "
                f"{report['sampled_nodes']:.1f} nodes / {report['sampled_edges']:.1f} edges per batch")
    return report
def summarize(records: List[Dict[str, Any]]) -> Dict[str, Any]:
    if not records:
        return {'batches': 0, 'avg_batch_time': 0.0, 'sampled_nodes': 0.0, 'sampled_edges': 0.0, 'loss': float('nan'),
                'total_sampled_nodes': 0, 'total_sampled_edges': 0}
    frame = pd.DataFrame(records)
    return {
        'batches': len(records),
        'avg_batch_time': float(frame['batch_time_ms'].mean()) / 1000.0,
        'sampled_nodes': float(frame['sampled_nodes'].mean()),
        'sampled_edges': float(frame['sampled_edges'].mean()),
        'loss': float(frame['loss'].mean()),
        'total_sampled_nodes': int(frame['sampled_nodes'].sum()),
        'total_sampled_edges': int(frame['sampled_edges'].sum()),
    }
def evaluate(store: GraphStore, model: SageModel, node_ids: Sequence[Any], cfg: TrainConfig,
             batch_size: Optional[int] = None) -> float:
    """Argmax accuracy over node_ids, sampled through the training pipeline with fixed per-batch seeds"""
    if not node_ids:
        return 0.0
    size = batch_size or cfg.batch_size
    correct = 0
    total = 0
    for index, start in enumerate(range(0, len(node_ids), size)):
        batch = make_batch(store, node_ids[start:start + size], cfg, batch_seed(cfg.seed, EVAL_EPOCH, index))
        correct += int(np.sum(predict(model, batch) == batch.labels))
        total += batch.num_targets
    accuracy = correct / total if total else 0.0
    logger.info(f"Accuracy {accuracy:.4f} over {total} nodes")
    return accuracy
def write_metrics(records: List[Dict[str, Any]], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(records, columns=METRIC_COLUMNS).to_csv(path, index=False)
    logger.info(f"Wrote {len(records)} batch metrics to {path}")
    return path
def train(store: GraphStore, cfg: TrainConfig, memory: Optional[MemoryTracker] = None,
          metrics_path=None, show_progress: bool = False,
          progress_callback: Optional[Callable[[int, int], Any]] = None) -> Dict[str, Any]:
    """Metadata -> init -> epochs; returns the model, the split, and the epoch summaries"""
    meta = fetch_metadata(store, cfg.node_type, memory)
    model = init_model(meta, cfg.hidden_dim, len(cfg.fanouts), cfg.seed, cfg.node_type, cfg.lr, cfg.fanouts)
    node_ids = list_node_ids(store, cfg.node_type)
    if not node_ids:
        raise DimensionError(f"no :{cfg.node_type} nodes to train on")
    train_ids, held_out = split_holdout(node_ids, cfg.holdout_fraction, cfg.seed)
    logger.info(f"Training on {len(train_ids)} nodes, holding out {len(held_out)}")
    epochs, records = [], []
    for epoch in range(cfg.epochs):
        report = train_epoch(store, model, cfg, train_ids, epoch, memory, progress_callback, show_progress)
        records.extend(report.pop('records'))
        epochs.append(report)
    if metrics_path is not None:
        write_metrics(records, metrics_path)
    return {'status': 'success', 'model': model, 'metadata': meta, 'train_ids': train_ids,
            'held_out': held_out, 'epochs': epochs, 'records': records}
