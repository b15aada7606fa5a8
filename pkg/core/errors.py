"""Exceptions raised by ingest, sampling, training and the distributed harness."""
class GraphTrainingError(Exception):
    """Base class for every core-module failure"""
class IngestError(GraphTrainingError):
    pass
class MalformedRow(IngestError):
    def __init__(self, file, line: int, reason: str):
        self.file = str(file)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.file}:{line}: {reason}")
class DecodeError(GraphTrainingError):
    pass
class InitError(GraphTrainingError):
    pass
class DimensionError(GraphTrainingError):
    pass
class StepError(GraphTrainingError):
    pass
class WorkerFailure(GraphTrainingError):
    def __init__(self, worker_id: int, reason: str):
        self.worker_id = worker_id
        self.reason = reason
        super().__init__(f"worker {worker_id} failed: {reason}")
class ReplicaDivergence(GraphTrainingError):
    pass
class ProtocolError(GraphTrainingError):
    """Wire-level failure; `code` is the response error code"""
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(f"protocol error {code}: {message}")
