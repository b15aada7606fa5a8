"""
Core modules for Graph Training DB: ingest, sampling, GraphSAGE training and the distributed harness
"""
from .errors import (GraphTrainingError, IngestError, MalformedRow, DecodeError, InitError, DimensionError,
                     StepError, WorkerFailure, ReplicaDivergence, ProtocolError)
from .ingest import EdgeFile, IngestSpec, NodeFile, load_csv
from .sbm_generator import SbmSpec, generate_sbm
from .sampler import (GraphMetadata, SampledSubgraph, SamplingConfig, decode, fetch_metadata, sample,
                      sample_k_hop_chained, sample_one_hop, sample_two_hop)
from .sage_model import Batch, Gradients, SageModel, init_model, load_model, save_model
from .trainer import TrainConfig, evaluate, train, train_epoch
from .distributed import ClusterConfig, WorkerReport, allreduce_average, run_distributed
from .sampling_server import SamplingClient, SamplingServer, serve_sampling
__all__ = ['GraphTrainingError', 'IngestError', 'MalformedRow', 'DecodeError', 'InitError', 'DimensionError',
           'StepError', 'WorkerFailure', 'ReplicaDivergence', 'ProtocolError', 'EdgeFile', 'IngestSpec', 'NodeFile',
           'load_csv', 'SbmSpec', 'generate_sbm', 'GraphMetadata', 'SampledSubgraph', 'SamplingConfig', 'decode',
           'fetch_metadata', 'sample', 'sample_k_hop_chained', 'sample_one_hop', 'sample_two_hop', 'Batch',
           'Gradients', 'SageModel', 'init_model', 'load_model', 'save_model', 'TrainConfig', 'evaluate', 'train',
           'train_epoch', 'ClusterConfig', 'WorkerReport', 'allreduce_average', 'run_distributed',
           'SamplingClient', 'SamplingServer', 'serve_sampling']
