# core/sage_model.py
"""
Mean-aggregate GraphSAGE for node classification, in float64 numpy.

Each layer computes h' = act(W @ concat(h_self, mean(h_neighbours))) with no
bias; a linear classifier maps the last layer of the seed nodes to logits.
The neighbour mean sums in (src, dst) local-index order then divides, and a
node with no sampled neighbours gets the zero vector.
"""
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
import numpy as np
from .errors import DimensionError, InitError, StepError
from .sampler import GraphMetadata, SampledSubgraph
logger = logging.getLogger(__name__)
ACTIVATIONS = ('relu', 'identity')
@dataclass
class SageModel:
    layers: List[np.ndarray]
    classifier: np.ndarray
    activation: str = 'relu'
    lr: float = 0.1
    fanouts: List[int] = field(default_factory=lambda: [12, 12])
    @property
    def feature_dim(self) -> int:
        return self.layers[0].shape[1] // 2
    @property
    def num_classes(self) -> int:
        return self.classifier.shape[0]
    @property
    def num_layers(self) -> int:
        return len(self.layers)
    def parameters(self) -> List[np.ndarray]:
        return list(self.layers) + [self.classifier]
    def copy(self) -> "SageModel":
        return SageModel([w.copy() for w in self.layers], self.classifier.copy(), self.activation, self.lr,
                         list(self.fanouts))
    def digest(self) -> str:
        """Hash of every weight bit; equal digests mean bit-identical replicas"""
        sha = hashlib.sha256()
        for weights in self.parameters():
            sha.update(np.ascontiguousarray(weights).tobytes())
        return sha.hexdigest()
    @property
    def nbytes(self) -> int:
        return sum(int(w.nbytes) for w in self.parameters())
@dataclass
class Gradients:
    layers: List[np.ndarray]
    classifier: np.ndarray
    def arrays(self) -> List[np.ndarray]:
        return list(self.layers) + [self.classifier]
    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray]) -> "Gradients":
        return cls(list(arrays[:-1]), arrays[-1])
    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.arrays())
@dataclass
class Batch:
    subgraph: SampledSubgraph
    target_ids: List
    labels: np.ndarray
    features: np.ndarray
    @classmethod
    def from_subgraph(cls, subgraph: SampledSubgraph) -> "Batch":
        if subgraph.seed_labels is None or any(label is None for label in subgraph.seed_labels):
            raise DimensionError("every seed needs a class label")
        return cls(subgraph, list(subgraph.seed_ids), np.asarray(subgraph.seed_labels, dtype=np.int64),
                   subgraph.features())
    @property
    def num_targets(self) -> int:
        return len(self.target_ids)
@dataclass
class ForwardCache:
    src: np.ndarray
    dst: np.ndarray
    degree: np.ndarray
    inputs: List[np.ndarray] = field(default_factory=list)
    concats: List[np.ndarray] = field(default_factory=list)
    pre_activations: List[np.ndarray] = field(default_factory=list)
    seed_hidden: Optional[np.ndarray] = None
def _glorot(rng: np.random.Generator, fan_out: int, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))
def init_model(meta: GraphMetadata, hidden_dim: int, num_layers: int, seed: int, node_type: Optional[str] = None,
               lr: float = 0.1, fanouts: Optional[Sequence[int]] = None, activation: str = 'relu') -> SageModel:
    """Weights from metadata shapes only; the same seed always gives the same weights"""
    feature_dim = meta.feature_dim(node_type)
    if not feature_dim:
        raise InitError(f"no feature_dim in metadata for node type {node_type!r}")
    if num_layers < 1:
        raise InitError("num_layers must be at least 1")
    if hidden_dim < 1:
        raise InitError("hidden_dim must be positive")
    if meta.num_classes < 1:
        raise InitError("metadata reports no classes")
    if activation not in ACTIVATIONS:
        raise InitError(f"unknown activation {activation!r}")
    rng = np.random.default_rng(seed)
    layers = []
    width = feature_dim
    for _ in range(num_layers):
        layers.append(_glorot(rng, hidden_dim, 2 * width))
        width = hidden_dim
    classifier = _glorot(rng, meta.num_classes, hidden_dim)
    logger.info(f"Initialised SageModel: {feature_dim} -> {' -> '.join([str(hidden_dim)] * num_layers)} -> "
                f"{meta.num_classes} classes (seed {seed})")
    return SageModel(layers, classifier, activation, lr, list(fanouts or [12] * num_layers))
def adjacency(num_nodes: int, edge_pairs: Sequence[Tuple[int, int]]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Edge arrays sorted by (src, dst) plus each node's neighbour count"""
    if edge_pairs:
        pairs = np.asarray(sorted(edge_pairs), dtype=np.int64)
        src, dst = pairs[:, 0], pairs[:, 1]
    else:
        src = dst = np.empty(0, dtype=np.int64)
    degree = np.bincount(src, minlength=num_nodes).astype(np.float64)
    return src, dst, degree
def neighbour_mean(h: np.ndarray, src: np.ndarray, dst: np.ndarray, degree: np.ndarray) -> np.ndarray:
    total = np.zeros_like(h)
    np.add.at(total, src, h[dst])
    has = degree > 0
    total[has] /= degree[has, None]
    return total
def _activate(model: SageModel, x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0) if model.activation == 'relu' else x
def forward(model: SageModel, batch: Batch, cache: Optional[ForwardCache] = None) -> np.ndarray:
    """Logits for the batch seeds, which hold local indices 0..num_targets-1"""
    h = np.asarray(batch.features, dtype=np.float64)
    if h.ndim != 2 or h.shape[1] != model.feature_dim:
        raise DimensionError(f"features have shape {h.shape}, model expects width {model.feature_dim}")
    src, dst, degree = adjacency(h.shape[0], batch.subgraph.edge_pairs)
    if cache is not None:
        cache.src, cache.dst, cache.degree = src, dst, degree
    for weights in model.layers:
        z = np.concatenate([h, neighbour_mean(h, src, dst, degree)], axis=1)
        pre = z @ weights.T
        if cache is not None:
            cache.inputs.append(h)
            cache.concats.append(z)
            cache.pre_activations.append(pre)
        h = _activate(model, pre)
    seed_hidden = h[:batch.num_targets]
    if cache is not None:
        cache.seed_hidden = seed_hidden
    return seed_hidden @ model.classifier.T
def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)
def loss(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean cross-entropy via a max-shifted log-sum-exp"""
    labels = np.asarray(labels, dtype=np.int64)
    if logits.shape[0] != labels.shape[0]:
        raise DimensionError(f"{logits.shape[0]} logit rows for {labels.shape[0]} labels")
    if labels.size == 0:
        return 0.0
    if labels.min() < 0 or labels.max() >= logits.shape[1]:
        raise DimensionError(f"label out of range for {logits.shape[1]} classes")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    return float(np.mean(log_norm - shifted[np.arange(len(labels)), labels]))
def backward(model: SageModel, batch: Batch, logits: np.ndarray, cache: ForwardCache,
             loss_scale: float = 1.0) -> Gradients:
    """Exact gradients of loss_scale * loss(logits, batch.labels) using the cached forward pass"""
    count = logits.shape[0]
    dlogits = _softmax(logits)
    if count:
        dlogits[np.arange(count), batch.labels] -= 1.0
        dlogits *= loss_scale / count
    grad_classifier = dlogits.T @ cache.seed_hidden
    num_nodes = cache.inputs[0].shape[0]
    dh = np.zeros((num_nodes, model.classifier.shape[1]))
    dh[:count] = dlogits @ model.classifier
    grad_layers: List[np.ndarray] = [None] * model.num_layers
    for k in range(model.num_layers - 1, -1, -1):
        pre = cache.pre_activations[k]
        dpre = dh * (pre > 0) if model.activation == 'relu' else dh
        grad_layers[k] = dpre.T @ cache.concats[k]
        dz = dpre @ model.layers[k]
        width = cache.inputs[k].shape[1]
        dh = dz[:, :width].copy()
        dmean = dz[:, width:]
        if len(cache.src):
            np.add.at(dh, cache.dst, dmean[cache.src] / cache.degree[cache.src, None])
    return Gradients(grad_layers, grad_classifier)
def step(model: SageModel, grads: Gradients, lr: Optional[float] = None) -> SageModel:
    """In-place SGD update W <- W - lr * grad; returns the model"""
    lr = model.lr if lr is None else lr
    if not grads.is_finite():
        raise StepError("non-finite gradient")
    if len(grads.layers) != model.num_layers:
        raise DimensionError(f"{len(grads.layers)} layer gradients for {model.num_layers} layers")
    for weights, grad in zip(model.parameters(), grads.arrays()):
        if weights.shape != grad.shape:
            raise DimensionError(f"gradient shape {grad.shape} does not match weights {weights.shape}")
        weights -= lr * grad
    return model
def train_step(model: SageModel, batch: Batch) -> Tuple[float, Gradients]:
    cache = ForwardCache(np.empty(0), np.empty(0), np.empty(0))
    logits = forward(model, batch, cache)
    return loss(logits, batch.labels), backward(model, batch, logits, cache)
def predict(model: SageModel, batch: Batch) -> np.ndarray:
    return np.argmax(forward(model, batch), axis=1)
def save_model(model: SageModel, path) -> Path:
    path = Path(path)
    arrays: Dict[str, np.ndarray] = {f"layer_{i}": w for i, w in enumerate(model.layers)}
    arrays['classifier'] = model.classifier
    arrays['activation'] = np.array(model.activation)
    arrays['lr'] = np.array(model.lr)
    arrays['fanouts'] = np.asarray(model.fanouts, dtype=np.int64)
    with open(path, 'wb') as f:
        np.savez(f, **arrays)
    logger.info(f"Saved model to {path}")
    return path
def load_model(path) -> SageModel:
    with np.load(Path(path), allow_pickle=False) as data:
        count = sum(1 for key in data.files if key.startswith('layer_'))
        layers = [data[f"layer_{i}"].astype(np.float64) for i in range(count)]
        return SageModel(layers, data['classifier'].astype(np.float64), str(data['activation']),
                         float(data['lr']), [int(s) for s in data['fanouts']])
